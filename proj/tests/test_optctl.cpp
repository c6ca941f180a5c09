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

#include <cmath>
#include <random>

#include "doctest.h"
#include "holoreg/optctl.hpp"

using namespace holoreg;

namespace {

double rosenbrock(const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    s += 100.0 * std::pow(x[i + 1] - x[i] * x[i], 2) + std::pow(1.0 - x[i], 2);
  return s;
}

void check_monotone(const OptimizationRecord& r) {
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
}

void check_rendered(const PulseParametrization& p) {
  const auto s = p.render();
  const auto& d = s.samples(channel::kDeltaCpb);
  CHECK(d.front() == p.start_value());
  CHECK(d.back() == p.end_value());
  for (double v : d) {
    CHECK(v >= p.lower());
    CHECK(v <= p.upper());
  }
  CHECK(s.duration() == doctest::Approx(p.duration()).epsilon(1e-15));
}

}  // namespace

TEST_CASE("ideal operators score zero") {
  GateReport r;
  r.achieved = LocalZ{0.4, -1.1}.matrix() * ideal_swap();
  r.fidelity = local_z_fidelity(r.achieved, ideal_swap());
  r.infidelity = 1.0 - r.fidelity.average;
  CHECK(gate_objective(r, GateTarget::swap) <= 1e-10);

  r.achieved = ideal_cz();
  r.fidelity = local_z_fidelity(r.achieved, ideal_cz());
  r.infidelity = 1.0 - r.fidelity.average;
  r.conditional_phase = conditional_phase(r.achieved);
  CHECK(gate_objective(r, GateTarget::cphase) <= 1e-10);
}

TEST_CASE("unoptimized cphase sweep scores between 1e-3 and 1e-1") {
  SystemParams p;
  const auto res = infidelity_objective(initial_parametrization(default_design(GateTarget::cphase), p),
                                        GateTarget::cphase, p);
  CHECK(res.diagnostic.empty());
  CHECK(res.value >= 1e-3);
  CHECK(res.value <= 1e-1);
}

TEST_CASE("parametrizations respect bounds and endpoints") {
  SystemParams p;
  const double g = p.g_c;
  auto init = default_swap_schedule(p, 10.0 / g, 10.0);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 30.0);
  for (auto base : {PulseParametrization::knots(init, 12, -20 * g, 20 * g, g),
                    PulseParametrization::fourier(init, 6, -20 * g, 20 * g, g)}) {
    check_rendered(base);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> c(base.size());
      for (double& v : c) v = n(rng);
      check_rendered(base.with(c));
    }
  }
  CHECK_THROWS_AS(PulseParametrization::knots(init, 4, -5 * g, 5 * g, g), InvalidArgument);
}

TEST_CASE("optimizer contract on analytic objectives") {
  OptimizeOptions o;
  o.budget = 4000;
  o.seed = 7;
  const std::vector<double> x0{-1.2, 1.0, 0.5};
  const auto a = optimize(rosenbrock, x0, o);
  CHECK(a.best_value < 1e-8);
  CHECK(a.evaluations <= o.budget);
  CHECK(a.initial_value == rosenbrock(x0));
  check_monotone(a);

  const auto b = optimize(rosenbrock, x0, o);
  CHECK(a.history == b.history);
  CHECK(a.best_parameters == b.best_parameters);
  CHECK(a.evaluations == b.evaluations);

  o.seed = 8;
  const auto c = optimize(rosenbrock, x0, o);
  CHECK(c.seed == 8);
  CHECK(c.best_parameters != a.best_parameters);

  o.target = 1e6;
  const auto d = optimize(rosenbrock, x0, o);
  CHECK(d.reached_target);
  CHECK(d.evaluations == 1);
  CHECK(d.best_parameters == x0);

  o.target = 0.0;
  const auto flat = optimize([](const std::vector<double>&) { return 1.0; }, x0, o);
  CHECK(flat.stagnated);
  CHECK(flat.best_value == 1.0);

  o.budget = 99;
  CHECK_THROWS_AS(optimize(rosenbrock, x0, o), InvalidArgument);
}

TEST_CASE("optimized cphase meets the fidelity and phase targets") {
  SystemParams p;
  const auto design = default_design(GateTarget::cphase);
  OptimizeOptions o;
  o.budget = 5000;
  const auto r = optimize_gate(initial_parametrization(design, p), GateTarget::cphase, p, o);
  CHECK(r.report.infidelity <= 1e-4);
  CHECK(std::abs(wrap_phase(r.report.conditional_phase - kPi)) <= 1e-3);
  CHECK(r.record.best_value < r.record.initial_value);
  check_monotone(r.record);
  check_rendered(r.best);

  // local-minimum certificate: 1% moves away from the best point cost more
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> sign(0, 1);
  const auto& c = r.best.coefficients();
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> moved = c;
    for (double& v : moved) v *= sign(rng) ? 1.01 : 0.99;
    CHECK(infidelity_objective(r.best.with(moved), GateTarget::cphase, p).value > r.record.best_value);
  }
}
