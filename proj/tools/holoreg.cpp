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

// holoreg command-line front-end. Every subcommand reads a strict JSON
// config, runs one study and writes summary.json, metadata.json and
// trace_*.csv into the output directory.
//
// Exit status: 0 all checks pass, 1 a check failed, 2 invalid invocation
// or config (nothing written), 3 numerical failure (diagnostic summary).

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "holoreg/studies.hpp"
#include "json.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace holoreg;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kSeedScheme = "splitmix64(seed ^ fnv1a64(component))";

// ---------------------------------------------------------------- config

std::string line_hint(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return "";
  return "line " + std::to_string(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n') + 1) +
         ": ";
}

// Strict view of one JSON object: every key must be consumed.
class Section {
 public:
  Section(const json& j, std::string path, const std::string& text) : j_(j), path_(std::move(path)), text_(text) {
    if (!j_.is_object()) fail(path_.empty() ? "config" : path_, "must be a JSON object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, double def) {
    if (!take(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number()) fail(key, "must be a number");
    return v.get<double>();
  }
  double positive(const std::string& key, double def) {
    const double v = number(key, def);
    if (!(v > 0.0)) fail(key, "must be positive");
    return v;
  }
  long long integer(const std::string& key, long long def) {
    if (!take(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) fail(key, "must be an integer");
    return v.get<long long>();
  }
  std::size_t count(const std::string& key, std::size_t def, std::size_t min = 1) {
    const long long v = integer(key, static_cast<long long>(def));
    if (v < static_cast<long long>(min)) fail(key, "must be at least " + std::to_string(min));
    return static_cast<std::size_t>(v);
  }
  std::string string(const std::string& key, const std::string& def) {
    if (!take(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_string()) fail(key, "must be a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> def) {
    if (!take(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_array() || v.empty()) fail(key, "must be a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail(key, "must be a non-empty array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  std::vector<long long> integers(const std::string& key, std::vector<long long> def, long long min) {
    if (!take(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_array() || v.empty()) fail(key, "must be a non-empty array of integers");
    std::vector<long long> out;
    for (const auto& x : v) {
      if (!x.is_number_integer() || x.get<long long>() < min)
        fail(key, "must be a non-empty array of integers >= " + std::to_string(min));
      out.push_back(x.get<long long>());
    }
    return out;
  }
  std::vector<std::string> strings(const std::string& key, std::vector<std::string> def) {
    if (!take(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_array() || v.empty()) fail(key, "must be a non-empty array of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
      if (!x.is_string()) fail(key, "must be a non-empty array of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }
  Section child(const std::string& key) {
    static const json empty = json::object();
    const bool present = take(key);
    return Section(present ? j_.at(key) : empty, qualified(key), text_);
  }

  // Rejects keys nobody asked for.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) fail(it.key(), "unknown key");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw ConfigError(line_hint(text_, key) + "'" + qualified(key) + "' " + why);
  }

 private:
  bool take(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
  const std::string& text_;
  std::set<std::string> used_;
};

SystemParams read_system(Section s) {
  SystemParams p;
  p.g_single = s.positive("g_single_rad_per_s", p.g_single);
  p.Delta = s.positive("raman_detuning_rad_per_s", p.Delta);
  p.omega_mw = s.positive("omega_mw_rad_per_s", p.omega_mw);
  p.n_ground = s.positive("n_ground", p.n_ground);
  p.g_c = s.positive("g_c_rad_per_s", p.g_c);
  p.kappa = s.number("kappa_rad_per_s", p.kappa);
  p.gamma_cpb = s.number("gamma_cpb_per_s", p.gamma_cpb);
  p.gamma_phi = s.number("gamma_phi_per_s", p.gamma_phi);
  if (p.kappa < 0.0 || p.gamma_cpb < 0.0 || p.gamma_phi < 0.0) s.fail("kappa_rad_per_s", "rates must be non-negative");
  s.finish();
  return p;
}

GateDesign read_design(Section s, GateTarget target, const SystemParams& p) {
  GateDesign d = default_design(target);
  d.duration_g = s.positive("duration_s", d.duration_g / p.g_c) * p.g_c;
  d.far_ratio = s.positive("far_ratio", d.far_ratio);
  d.n_knots = s.count("n_knots", d.n_knots);
  d.steepness = s.positive("steepness", d.steepness);
  d.bound_ratio = s.positive("bound_ratio", d.bound_ratio);
  if (d.far_ratio < kMinEndpointRatio) s.fail("far_ratio", "must be at least 10");
  if (d.bound_ratio < 1.0) s.fail("bound_ratio", "must be at least 1");
  s.finish();
  return d;
}

void read_optimizer(Section& s, OptimizeOptions& o) {
  o.budget = s.count("budget_evaluations", o.budget, 100);
  o.target = s.number("target_objective", o.target);
  o.initial_step = s.positive("initial_step", o.initial_step);
  o.polish_fraction = s.number("polish_fraction", o.polish_fraction);
  o.fd_step = s.positive("fd_step", o.fd_step);
  if (o.polish_fraction < 0.0 || o.polish_fraction >= 1.0) s.fail("polish_fraction", "must lie in [0, 1)");
}

CalibrationOptions read_calibration(Section s, const SystemParams& p, std::uint64_t seed) {
  CalibrationOptions c;
  c.params = p;
  c.seed = seed;
  c.stirap_window = s.positive("stirap_window_s", c.stirap_window);
  c.stirap_adiabaticity = s.positive("stirap_adiabaticity_rad", c.stirap_adiabaticity);
  c.readout_detuning = s.positive("readout_detuning_rad_per_s", c.readout_detuning);
  c.readout_probe = s.positive("readout_probe_s", c.readout_probe);
  read_optimizer(s, c.optimizer);
  c.swap = read_design(s.child("swap"), GateTarget::swap, p);
  c.cphase = read_design(s.child("cphase"), GateTarget::cphase, p);
  s.finish();
  return c;
}

// -------------------------------------------------------------- outputs

struct Artifacts {
  json summary;
  std::vector<std::pair<std::string, std::string>> traces;  // file name, CSV text
  json derived_seeds = json::object();
};

template <class T>
std::string csv_number(T v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json checks_json(const std::vector<Check>& checks) {
  json a = json::array();
  for (const auto& c : checks) {
    json j{{"name", c.name}, {"value", c.value}, {"comparison", c.comparison}, {"threshold", c.threshold}};
    if (c.comparison == "in") j["threshold_max"] = c.threshold_hi;
    j["pass"] = c.pass;
    a.push_back(j);
  }
  return a;
}

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(r);
  }
  return rows;
}

json report_json(const GateReport& r) {
  json j{{"target", r.target},
         {"infidelity", r.infidelity},
         {"average_fidelity", r.fidelity.average},
         {"process_fidelity", r.fidelity.process},
         {"worst_case_infidelity", r.fidelity.worst_case_infidelity},
         {"leakage", r.leakage},
         {"duration_s", r.duration},
         {"loss_probability", r.loss_estimate},
         {"local_z_alpha_rad", r.fidelity.correction.alpha},
         {"local_z_beta_rad", r.fidelity.correction.beta}};
  if (r.target == "cphase") {
    j["conditional_phase_rad"] = r.conditional_phase;
    j["population_loss"] = r.population_loss;
  }
  j["achieved"] = matrix_json(r.achieved);
  j["warnings"] = r.warnings;
  return j;
}

json budget_json(const BudgetReport& b) {
  return json{{"total_time_s", b.total_time},
              {"cpb_time_s", b.cpb_time},
              {"coherence_time_s", b.coherence_time},
              {"coherence_ratio", b.coherence_ratio},
              {"cpb_coherence_ratio", b.cpb_coherence_ratio},
              {"loss_additive", b.loss_additive},
              {"loss_product", b.loss_product},
              {"infidelity_additive", b.infidelity_additive},
              {"infidelity_product", b.infidelity_product},
              {"operations", b.operations},
              {"logical_gates", b.logical_gates}};
}

bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ----------------------------------------------------------- subcommands

Artifacts run_orthogonality(Section& s, std::uint64_t seed) {
  OrthogonalityOptions o;
  o.seed = seed;
  o.lattice_molecules = static_cast<std::int64_t>(s.count("lattice_molecules", 10000, 2));
  o.trap_length = s.positive("trap_length_m", o.trap_length);
  o.wavelength = s.positive("wavelength_m", o.wavelength);
  o.n_min = static_cast<int>(s.integer("n_min", o.n_min));
  o.n_max = static_cast<int>(s.integer("n_max", o.n_max));
  const auto rn = s.integers("random_molecules", {100, 1000, 10000, 100000}, 2);
  o.random_molecules.assign(rn.begin(), rn.end());
  o.random_geometries = s.count("random_geometries", o.random_geometries);
  o.random_n_min = static_cast<int>(s.integer("random_n_min", o.random_n_min));
  o.random_n_max = static_cast<int>(s.integer("random_n_max", o.random_n_max));
  o.overlap_threshold = s.positive("overlap_threshold", o.overlap_threshold);
  o.slope_target = s.number("slope_target", o.slope_target);
  o.slope_tolerance = s.positive("slope_tolerance", o.slope_tolerance);
  o.max_angle_deg = s.positive("max_angle_deg", o.max_angle_deg);
  if (o.n_max < o.n_min) s.fail("n_max", "must not be below n_min");
  if (o.random_n_max <= o.random_n_min) s.fail("random_n_max", "must exceed random_n_min");
  if (o.random_molecules.size() < 2) s.fail("random_molecules", "needs at least two values");
  s.finish();

  const auto r = orthogonality_study(o);
  Artifacts a;
  a.derived_seeds["orthogonality.random.<N>.<index>"] = "per geometry";
  a.summary["results"] = {{"lattice_molecules", o.lattice_molecules},
                          {"lattice_modes", r.lattice_modes},
                          {"lattice_max_overlap", r.lattice_crosstalk},
                          {"angle_count", r.angle_count},
                          {"max_angle_deg", r.max_angle_deg},
                          {"random_molecules", r.random_molecules},
                          {"random_median_overlap", r.random_median},
                          {"random_median_slope", r.slope}};
  a.summary["checks"] = checks_json(r.checks);
  std::string csv = "n_molecules,median_abs_overlap,inverse_sqrt_n\n";
  for (std::size_t i = 0; i < r.random_molecules.size(); ++i)
    csv += csv_number(r.random_molecules[i]) + "," + csv_number(r.random_median[i]) + "," +
           csv_number(1.0 / std::sqrt(r.random_molecules[i])) + "\n";
  a.traces.emplace_back("trace_random_overlap.csv", csv);
  csv = "n,theta_deg\n";
  for (std::size_t i = 0; i < r.angles_deg.size(); ++i)
    csv += std::to_string(o.n_min + static_cast<int>(i)) + "," + csv_number(r.angles_deg[i]) + "\n";
  a.traces.emplace_back("trace_angles.csv", csv);
  a.summary["pass"] = all_pass(r.checks);
  return a;
}

Artifacts run_enhancement(Section& s, const SystemParams& p) {
  EnhancementOptions o;
  o.params = p;
  const auto n = s.integers("molecules", {1, 4, 9}, 1);
  o.molecules.assign(n.begin(), n.end());
  o.trap_length = s.positive("trap_length_m", o.trap_length);
  o.tolerance = s.positive("tolerance_relative", o.tolerance);
  s.finish();
  const auto r = enhancement_study(o);
  Artifacts a;
  a.summary["results"] = {{"g_eff_rad_per_s", p.g_eff()},
                          {"collective_rate_rad_per_s", p.collective_rate()},
                          {"molecules", r.molecules},
                          {"fitted_rad_per_s", r.fitted},
                          {"expected_rad_per_s", r.expected},
                          {"relative_error", r.relative_error}};
  a.summary["checks"] = checks_json(r.checks);
  std::string csv = "n_molecules,fitted_rad_per_s,expected_rad_per_s,relative_error\n";
  for (std::size_t i = 0; i < r.molecules.size(); ++i)
    csv += std::to_string(r.molecules[i]) + "," + csv_number(r.fitted[i]) + "," + csv_number(r.expected[i]) + "," +
           csv_number(r.relative_error[i]) + "\n";
  a.traces.emplace_back("trace_enhancement.csv", csv);
  a.summary["pass"] = all_pass(r.checks);
  return a;
}

json stirap_json(const StirapTransfer& t) {
  return json{{"window_s", t.window},
              {"adiabaticity_rad", t.adiabaticity},
              {"transfer_efficiency", t.efficiency},
              {"peak_e_el", t.peak_e_el},
              {"return_error", t.return_error},
              {"peak_e_el_return", t.peak_e_el_return}};
}

Artifacts run_stirap(Section& s) {
  StirapOptions o;
  o.window = s.positive("window_s", o.window);
  o.adiabaticity = s.positive("adiabaticity_rad", o.adiabaticity);
  o.scan = s.numbers("scan_adiabaticity_rad", o.scan);
  o.samples = s.count("samples", o.samples, 16);
  o.efficiency_threshold = s.positive("efficiency_threshold", o.efficiency_threshold);
  o.peak_threshold = s.positive("peak_e_el_threshold", o.peak_threshold);
  o.return_threshold = s.positive("return_error_threshold", o.return_threshold);
  o.min_adiabaticity = s.positive("min_adiabaticity_rad", o.min_adiabaticity);
  for (double v : o.scan)
    if (!(v > 0.0)) s.fail("scan_adiabaticity_rad", "entries must be positive");
  s.finish();
  const auto r = stirap_study(o);
  Artifacts a;
  json scan = json::array();
  for (const auto& t : r.scan) scan.push_back(stirap_json(t));
  a.summary["results"] = {{"operating_point", stirap_json(r.main)}, {"scan", scan}};
  a.summary["checks"] = checks_json(r.checks);
  std::string csv = "t_s,p_m,p_f,p_e_el\n";
  for (std::size_t i = 0; i < r.main.times.size(); ++i)
    csv += csv_number(r.main.times[i]) + "," + csv_number(r.main.p_m[i]) + "," + csv_number(r.main.p_f[i]) + "," +
           csv_number(r.main.p_e_el[i]) + "\n";
  a.traces.emplace_back("trace_stirap_populations.csv", csv);
  csv = "adiabaticity_rad,transfer_efficiency,peak_e_el,return_error\n";
  for (const auto& t : r.scan)
    csv += csv_number(t.adiabaticity) + "," + csv_number(t.efficiency) + "," + csv_number(t.peak_e_el) + "," +
           csv_number(t.return_error) + "\n";
  a.traces.emplace_back("trace_stirap_scan.csv", csv);
  a.summary["pass"] = all_pass(r.checks);
  return a;
}

Artifacts run_multiplex(Section& s) {
  MultiplexOptions o;
  const auto n = s.integers("molecules", {4, 8, 12}, 3);
  o.molecules.assign(n.begin(), n.end());
  o.focus = static_cast<int>(s.integer("focus_molecules", o.focus));
  auto& w = o.walkthrough;
  w.trap_length = s.positive("trap_length_m", w.trap_length);
  w.wavelength = s.positive("wavelength_m", w.wavelength);
  w.collective_rate = s.positive("collective_rate_rad_per_s", w.collective_rate);
  w.stirap_window = s.positive("stirap_window_s", w.stirap_window);
  w.stirap_adiabaticity = s.positive("stirap_adiabaticity_rad", w.stirap_adiabaticity);
  w.stirap_samples = s.count("stirap_samples", w.stirap_samples, 16);
  o.step_bound = s.positive("step_infidelity_bound", o.step_bound);
  o.slope_lo = s.number("slope_min", o.slope_lo);
  o.slope_hi = s.number("slope_max", o.slope_hi);
  o.naive_threshold = s.positive("naive_peak_e_el_threshold", o.naive_threshold);
  if (o.molecules.size() < 2) s.fail("molecules", "needs at least two values");
  if (std::find(o.molecules.begin(), o.molecules.end(), o.focus) == o.molecules.end())
    s.fail("focus_molecules", "must be one of the molecule counts");
  for (int m : o.molecules)
    if (m > 16) s.fail("molecules", "brute-force oracle supports at most 16 molecules");
  s.finish();
  const auto r = multiplex_study(o);
  Artifacts a;
  json runs = json::array();
  std::string csv = "variant,n_molecules,step,name,infidelity,deviation,peak_e_el,oracle_norm\n";
  auto add = [&](const WalkthroughResult& wr, const char* variant) {
    json steps = json::array();
    for (std::size_t i = 0; i < wr.steps.size(); ++i) {
      const auto& st = wr.steps[i];
      steps.push_back({{"name", st.name}, {"infidelity", st.infidelity}, {"peak_e_el", st.peak_e_el}});
      csv += std::string(variant) + "," + std::to_string(wr.n_molecules) + "," + std::to_string(i) + "," + st.name +
             "," + csv_number(st.infidelity) + "," + csv_number(st.deviation) + "," + csv_number(st.peak_e_el) + "," +
             csv_number(st.oracle_norm) + "\n";
    }
    runs.push_back({{"variant", variant},
                    {"n_molecules", wr.n_molecules},
                    {"max_infidelity", wr.max_infidelity},
                    {"max_deviation", wr.max_deviation},
                    {"peak_e_el", wr.peak_e_el},
                    {"steps", steps}});
  };
  for (const auto& wr : r.runs) add(wr, "protocol");
  add(r.naive, "naive");
  a.summary["results"] = {{"deviation_slope", r.slope}, {"runs", runs}};
  a.summary["checks"] = checks_json(r.checks);
  a.traces.emplace_back("trace_multiplex_steps.csv", csv);
  a.summary["pass"] = all_pass(r.checks);
  return a;
}

Artifacts run_gates(Section& s, const SystemParams& p) {
  GatesOptions o;
  o.params = p;
  o.swap_duration = s.positive("swap_duration_s", o.swap_duration);
  o.swap_far_ratio = s.positive("swap_far_ratio", o.swap_far_ratio);
  o.cphase_duration_g = s.positive("cphase_duration_s", o.cphase_duration_g / p.g_c) * p.g_c;
  o.cphase_far_ratio = s.positive("cphase_far_ratio", o.cphase_far_ratio);
  o.readout_detuning = s.positive("readout_detuning_rad_per_s", o.readout_detuning);
  o.readout_probe = s.positive("readout_probe_s", o.readout_probe);
  o.transfer_threshold = s.positive("transfer_threshold", o.transfer_threshold);
  o.objective_lo = s.positive("objective_min", o.objective_lo);
  o.objective_hi = s.positive("objective_max", o.objective_hi);
  o.rotation_threshold = s.positive("rotation_infidelity_threshold", o.rotation_threshold);
  o.readout_threshold = s.positive("readout_error_threshold", o.readout_threshold);
  s.finish();
  const auto r = gates_study(o);
  Artifacts a;
  a.summary["results"] = {{"swap", report_json(r.swap)},
                          {"swap_transfer", r.swap_transfer},
                          {"cphase", report_json(r.cphase)},
                          {"cphase_objective", r.cphase_objective},
                          {"rotation_x_pi", report_json(r.rotation)},
                          {"readout",
                           {{"chi_rad_per_s", r.readout.chi},
                            {"kappa_r_rad_per_s", r.readout.kappa_r},
                            {"n_bar", r.readout.n_bar},
                            {"probe_s", r.readout.probe_duration},
                            {"snr", r.readout.snr},
                            {"error", r.readout.error},
                            {"warning", r.readout.warning}}}};
  a.summary["checks"] = checks_json(r.checks);
  a.traces.emplace_back("trace_swap_schedule.csv", r.swap_schedule.to_csv());
  a.traces.emplace_back("trace_cphase_schedule.csv", r.cphase_schedule.to_csv());
  a.summary["pass"] = all_pass(r.checks);
  return a;
}

Artifacts run_optimize(Section& s, const SystemParams& p, std::uint64_t seed, const std::string& cli_target) {
  OptimizeStudyOptions o;
  o.params = p;
  o.seed = seed;
  read_optimizer(s, o.optimizer);
  o.objective.leakage_weight = s.number("leakage_weight", o.objective.leakage_weight);
  o.objective.phase_weight = s.number("phase_weight", o.objective.phase_weight);
  o.objective.step_factor = s.positive("step_factor", o.objective.step_factor);
  o.infidelity_threshold = s.positive("infidelity_threshold", o.infidelity_threshold);
  o.phase_threshold = s.positive("phase_threshold_rad", o.phase_threshold);
  o.loss_lo = s.positive("loss_min", o.loss_lo);
  o.loss_hi = s.positive("loss_max", o.loss_hi);
  auto targets = s.strings("targets", {"swap", "cphase"});
  const GateDesign swap = read_design(s.child("swap"), GateTarget::swap, p);
  const GateDesign cphase = read_design(s.child("cphase"), GateTarget::cphase, p);
  if (!cli_target.empty()) targets = {cli_target};
  o.designs.clear();
  for (const auto& t : targets) {
    GateTarget g;
    try {
      g = gate_target_from_string(t);
    } catch (const InvalidArgument&) {
      s.fail("targets", "entries must be \"swap\" or \"cphase\"");
    }
    o.designs.push_back(g == GateTarget::swap ? swap : cphase);
  }
  s.finish();
  const auto r = optimize_study(o);
  Artifacts a;
  json gates = json::array();
  for (const auto& g : r.gates) {
    const std::string name = to_string(g.design.target);
    a.derived_seeds["optimize." + name] = derive_seed(seed, "optimize." + name);
    const auto& rec = g.result.record;
    gates.push_back({{"target", name},
                     {"duration_s", g.design.duration_g / p.g_c},
                     {"n_knots", g.design.n_knots},
                     {"best_objective", rec.best_value},
                     {"initial_objective", rec.initial_value},
                     {"best_infidelity", g.result.report.infidelity},
                     {"evaluations", rec.evaluations},
                     {"stagnated", rec.stagnated},
                     {"reached_target", rec.reached_target},
                     {"best_parameters", rec.best_parameters},
                     {"report", report_json(g.result.report)}});
    std::string csv = "iteration,best_objective\n";
    for (std::size_t i = 0; i < rec.history.size(); ++i)
      csv += std::to_string(i) + "," + csv_number(rec.history[i]) + "\n";
    a.traces.emplace_back("trace_optimize_" + name + "_history.csv", csv);
    a.traces.emplace_back("trace_optimize_" + name + "_schedule.csv", g.result.best.render().to_csv());
  }
  a.summary["results"] = {{"gates", gates}};
  a.summary["checks"] = checks_json(r.checks);
  a.summary["pass"] = all_pass(r.checks);
  return a;
}

json calibration_json(const CalibrationResult& c) {
  return json{{"stirap", stirap_json(c.stirap)},
              {"swap", report_json(c.calibrated.swap)},
              {"cphase", report_json(c.calibrated.cphase)},
              {"readout_error", c.calibrated.readout.error},
              {"transfer_duration_s", c.calibrated.transfer_duration()}};
}

Artifacts run_budget(Section& s, const SystemParams& p, std::uint64_t seed) {
  BudgetStudyOptions o;
  o.qubits = s.count("qubits", o.qubits);
  o.gates = s.count("gates", o.gates);
  o.gate_threshold = s.positive("gate_threshold", o.gate_threshold);
  o.calibration = read_calibration(s.child("calibration"), p, seed);
  s.finish();
  const auto cal = calibrate(o.calibration);
  const auto r = budget_study(o, cal);
  Artifacts a;
  a.derived_seeds["budget.circuit"] = derive_seed(seed, "budget.circuit");
  a.derived_seeds["optimize.swap"] = derive_seed(seed, "optimize.swap");
  a.derived_seeds["optimize.cphase"] = derive_seed(seed, "optimize.cphase");
  a.summary["results"] = {{"budget", budget_json(r.report)},
                          {"mean_gate_time_s", r.mean_gate_time},
                          {"mean_cpb_gate_time_s", r.mean_cpb_gate_time},
                          {"max_gates_within_coherence", r.max_gates},
                          {"max_gates_within_coherence_cpb_only", r.max_gates_cpb},
                          {"coupling_cycles_g_c_times_coherence", r.coupling_cycles},
                          {"calibration", calibration_json(cal)}};
  a.summary["checks"] = checks_json(r.checks);
  // per primitive kind totals
  const auto circuit = random_circuit(o.qubits, o.gates, derive_seed(seed, "budget.circuit"));
  const auto seq = compile(circuit, o.qubits, cal.calibrated);
  std::map<std::string, std::pair<std::size_t, double>> kinds;
  for (const auto& prim : seq) {
    auto& k = kinds[to_string(prim.kind)];
    ++k.first;
    k.second += prim.duration;
  }
  std::string csv = "primitive,count,total_time_s\n";
  for (const auto& [k, v] : kinds) csv += k + "," + std::to_string(v.first) + "," + csv_number(v.second) + "\n";
  a.traces.emplace_back("trace_budget_primitives.csv", csv);
  a.summary["pass"] = all_pass(r.checks);
  return a;
}

Artifacts run_endtoend(Section& s, const SystemParams& p, std::uint64_t seed) {
  EndToEndOptions o;
  o.shots = s.count("shots", o.shots, 0);
  o.unit_threshold = s.positive("unit_threshold", o.unit_threshold);
  o.calibrated_threshold = s.positive("calibrated_threshold", o.calibrated_threshold);
  o.calibration = read_calibration(s.child("calibration"), p, seed);
  s.finish();
  const auto cal = calibrate(o.calibration);
  const auto r = endtoend_study(o, cal);
  Artifacts a;
  a.derived_seeds["endtoend.readout"] = derive_seed(seed, "endtoend.readout");
  a.derived_seeds["optimize.swap"] = derive_seed(seed, "optimize.swap");
  a.derived_seeds["optimize.cphase"] = derive_seed(seed, "optimize.cphase");
  a.summary["results"] = {{"bell_fidelity_unit", r.unit_fidelity},
                          {"bell_fidelity_calibrated", r.calibrated_fidelity},
                          {"shots", o.shots},
                          {"counts", {{"00", r.counts[0]}, {"01", r.counts[1]}, {"10", r.counts[2]}, {"11", r.counts[3]}}},
                          {"zz_parity", r.parity},
                          {"budget", budget_json(r.budget)},
                          {"calibration", calibration_json(cal)}};
  a.summary["checks"] = checks_json(r.checks);
  a.traces.emplace_back("trace_endtoend.csv", trace_to_csv(r.trace));
  a.summary["pass"] = all_pass(r.checks);
  return a;
}

// ------------------------------------------------------------------ main

struct Invocation {
  std::string subcommand;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string target;
};

int run(const Invocation& inv, int argc, char** argv) {
  const auto started = std::chrono::steady_clock::now();
  std::string text;
  json root;
  try {
    std::ifstream in(inv.config, std::ios::binary);
    if (!in) throw ConfigError("cannot open config '" + inv.config + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      const auto pos = std::min<std::size_t>(e.byte, text.size());
      const auto line = std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n') + 1;
      throw ConfigError("line " + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
    }
  } catch (const ConfigError& e) {
    std::cerr << "holoreg: " << inv.config << ": " << e.what() << "\n";
    return 2;
  }

  Artifacts art;
  std::uint64_t seed = 0;
  try {
    Section top(root, "", text);
    const std::string experiment = top.string("experiment", inv.subcommand);
    if (experiment != inv.subcommand)
      top.fail("experiment", "names '" + experiment + "' but the subcommand is '" + inv.subcommand + "'");
    const long long cfg_seed = top.integer("seed", 0);
    if (cfg_seed < 0) top.fail("seed", "must be non-negative");
    seed = inv.seed.value_or(static_cast<std::uint64_t>(cfg_seed));
    const SystemParams params = read_system(top.child("system"));
    params.validate();
    Section block = top.child(inv.subcommand);
    top.finish();

    const std::string& c = inv.subcommand;
    if (c == "orthogonality") art = run_orthogonality(block, seed);
    else if (c == "enhancement") art = run_enhancement(block, params);
    else if (c == "stirap") art = run_stirap(block);
    else if (c == "multiplex") art = run_multiplex(block);
    else if (c == "gates") art = run_gates(block, params);
    else if (c == "optimize") art = run_optimize(block, params, seed, inv.target);
    else if (c == "budget") art = run_budget(block, params, seed);
    else art = run_endtoend(block, params, seed);
  } catch (const ConfigError& e) {
    std::cerr << "holoreg: " << inv.config << ": " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "holoreg: " << inv.config << ": invalid parameters: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    json diag{{"subcommand", inv.subcommand},
              {"seed", seed},
              {"status", "error"},
              {"error_category", e.category()},
              {"error", e.what()}};
    art.summary = diag;
    art.traces.clear();
    std::cerr << "holoreg: " << inv.subcommand << " failed (" << e.category() << "): " << e.what() << "\n";
  }

  const bool failed_numerically = art.summary.contains("status");
  json summary;
  if (failed_numerically) {
    summary = art.summary;
  } else {
    summary = json{{"subcommand", inv.subcommand}, {"seed", seed}, {"status", "ok"}};
    summary["pass"] = art.summary["pass"];
    summary["checks"] = art.summary["checks"];
    summary["results"] = art.summary["results"];
  }

  const fs::path out = inv.out.empty() ? fs::path("holoreg_" + inv.subcommand) : fs::path(inv.out);
  std::vector<std::string> args(argv, argv + argc);
  json meta{{"tool", "holoreg"},
            {"version", kVersion},
            {"subcommand", inv.subcommand},
            {"config_path", inv.config},
            {"argv", args},
            {"seed", seed},
            {"seed_scheme", kSeedScheme},
            {"derived_seeds", art.derived_seeds},
            {"finished_utc", utc_now()},
            {"wall_time_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()}};
  std::vector<std::string> files{"summary.json"};
  for (const auto& t : art.traces) files.push_back(t.first);
  meta["files"] = files;
  try {
    fs::create_directories(out);
    for (const auto& [name, csv] : art.traces) write_atomic(out / name, csv);
    write_atomic(out / "summary.json", summary.dump(2) + "\n");
    write_atomic(out / "metadata.json", meta.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "holoreg: cannot write artifacts to " << out << ": " << e.what() << "\n";
    return 3;
  }
  if (failed_numerically) return 3;
  const bool pass = summary["pass"].get<bool>();
  for (const auto& c : summary["checks"])
    std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << " = "
              << c["value"].dump() << " (" << c["comparison"].get<std::string>() << " " << c["threshold"].dump()
              << (c.contains("threshold_max") ? " .. " + c["threshold_max"].dump() : "") << ")\n";
  std::cout << inv.subcommand << ": " << (pass ? "pass" : "FAIL") << ", artifacts in " << out.string() << "\n";
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holoreg: holographic quantum register simulator and pulse optimizer"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Invocation inv;
  const std::vector<std::pair<const char*, const char*>> subcommands{
      {"orthogonality", "phase-pattern overlaps on the lattice and on random positions"},
      {"enhancement", "sqrt(N) collective cavity coupling"},
      {"stirap", "dark-state STIRAP transfer m -> f and back"},
      {"multiplex", "two-qubit storage walkthrough against the brute-force oracle"},
      {"gates", "unoptimized SWAP, cphase, rotation and readout baselines"},
      {"optimize", "optimal-control SWAP and cphase pulses"},
      {"budget", "coherence budget of a compiled random circuit"},
      {"endtoend", "Bell circuit through the full register"}};
  for (const auto& [name, help] : subcommands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", inv.config, "JSON config file")->required();
    sub->add_option("--out", inv.out, "output directory (default holoreg_<subcommand>)");
    sub->add_option("--seed", inv.seed, "root seed, overrides the config");
    if (std::string(name) == "optimize")
      sub->add_option("--target", inv.target, "optimize only this gate")->check(CLI::IsMember({"swap", "cphase"}));
    sub->callback([&inv, n = std::string(name)] { inv.subcommand = n; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return run(inv, argc, argv);
}
