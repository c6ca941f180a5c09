// Copyright 2026 The holoreg Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance runner: one PASS/FAIL line per criterion, using the default
// study options. `acceptance --criterion N` runs a single criterion.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "holoreg/studies.hpp"

using namespace holoreg;

namespace {

std::string describe(const Check& c) {
  std::ostringstream os;
  os.precision(6);
  os << c.name << "=" << c.value << " (" << c.comparison << " " << c.threshold;
  if (c.comparison == "in") os << ".." << c.threshold_hi;
  os << ")";
  return os.str();
}

// Checks whose names are listed; an empty list takes all of them.
std::vector<Check> pick(const std::vector<Check>& checks, const std::vector<std::string>& names) {
  if (names.empty()) return checks;
  std::vector<Check> out;
  for (const auto& c : checks)
    for (const auto& n : names)
      if (c.name == n) out.push_back(c);
  return out;
}

struct Runner {
  std::optional<OrthogonalityResult> orth;
  std::optional<OptimizeStudyResult> opt;
  std::optional<CalibrationResult> cal;

  const OrthogonalityResult& orthogonality() {
    if (!orth) orth = orthogonality_study({});
    return *orth;
  }
  const OptimizeStudyResult& optimized() {
    if (!opt) opt = optimize_study({});
    return *opt;
  }
  const CalibrationResult& calibration() {
    if (!cal) cal = calibrate({});
    return *cal;
  }

  std::vector<Check> run(int criterion) {
    switch (criterion) {
      case 1: return pick(orthogonality().checks, {"lattice_max_overlap", "random_median_slope"});
      case 2: return pick(orthogonality().checks, {"angle_count", "max_angle_deg"});
      case 3: return enhancement_study({}).checks;
      case 4: return stirap_study({}).checks;
      case 5: return multiplex_study({}).checks;
      case 6: return pick(optimized().checks, {"swap_infidelity", "cphase_infidelity", "cphase_phase_error"});
      case 7: return pick(optimized().checks, {"swap_loss_probability"});
      case 8: return budget_study({}, calibration()).checks;
      default: return endtoend_study({}, calibration()).checks;
    }
  }
};

const char* kTitles[] = {"",
                         "orthogonality of lattice and random phase patterns",
                         "angle schedule for L = 5 mm",
                         "sqrt(N) collective enhancement",
                         "dark-state STIRAP transfer",
                         "multiplexed storage against the oracle",
                         "optimized SWAP and cphase",
                         "SWAP loss budget",
                         "operations within the coherence budget",
                         "end-to-end Bell circuit"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holoreg acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run one criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  Runner runner;
  bool all = true;
  for (int k = 1; k <= 9; ++k) {
    if (only != 0 && k != only) continue;
    std::string detail;
    bool pass = true;
    try {
      const auto checks = runner.run(k);
      pass = !checks.empty();
      for (const auto& c : checks) {
        pass = pass && c.pass;
        detail += (detail.empty() ? "" : "; ") + describe(c);
      }
    } catch (const Error& e) {
      pass = false;
      detail = std::string(e.category()) + ": " + e.what();
    }
    all = all && pass;
    std::cout << "criterion " << k << " " << (pass ? "PASS" : "FAIL") << "  " << kTitles[k] << "  [" << detail
              << "]" << std::endl;
  }
  return all ? 0 : 1;
}
