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

#include "holoreg/studies.hpp"

#include <algorithm>
#include <cmath>

namespace holoreg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double median(std::vector<double> v) {
  require(!v.empty(), "median of an empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

WaveVector beam(double wavelength) { return WaveVector(kTwoPi / wavelength, 0.0, 0.0); }

Check make_check(std::string name, double value, double threshold, const char* cmp, bool pass) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.threshold = threshold;
  c.comparison = cmp;
  c.pass = pass;
  return c;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(root ^ h);
}

Check check_le(std::string name, double value, double threshold) {
  return make_check(std::move(name), value, threshold, "<=", value <= threshold);
}
Check check_ge(std::string name, double value, double threshold) {
  return make_check(std::move(name), value, threshold, ">=", value >= threshold);
}
Check check_lt(std::string name, double value, double threshold) {
  return make_check(std::move(name), value, threshold, "<", value < threshold);
}
Check check_gt(std::string name, double value, double threshold) {
  return make_check(std::move(name), value, threshold, ">", value > threshold);
}
Check check_in(std::string name, double value, double lo, double hi) {
  Check c = make_check(std::move(name), value, lo, "in", value >= lo && value <= hi);
  c.threshold_hi = hi;
  return c;
}

OrthogonalityResult orthogonality_study(const OrthogonalityOptions& o) {
  require(o.lattice_molecules >= 2, "lattice needs at least two molecules");
  require(o.random_molecules.size() >= 2 && o.random_geometries >= 1, "random study needs two N values and a geometry");
  OrthogonalityResult r;

  auto lattice = std::make_shared<const EnsembleGeometry>(make_lattice(o.lattice_molecules, o.trap_length));
  const auto lattice_angles = angle_schedule(lattice_period_length(*lattice), o.wavelength, o.n_min, o.n_max);
  const auto reg = build_register(lattice, beam(o.wavelength), lattice_angles, 1.0 - 1e-9);
  r.lattice_crosstalk = reg.crosstalk_bound();
  r.lattice_modes = reg.size();

  const auto angles = angle_schedule(o.trap_length, o.wavelength, o.n_min, o.n_max);
  r.angle_count = angles.size();
  for (double a : angles) {
    r.angles_deg.push_back(a * 180.0 / kPi);
    r.max_angle_deg = std::max(r.max_angle_deg, std::abs(a) * 180.0 / kPi);
  }

  const auto random_angles = angle_schedule(o.trap_length, o.wavelength, o.random_n_min, o.random_n_max);
  for (std::int64_t n : o.random_molecules) {
    std::vector<double> mags;
    for (std::size_t s = 0; s < o.random_geometries; ++s) {
      const auto seed = derive_seed(o.seed, "orthogonality.random." + std::to_string(n) + "." + std::to_string(s));
      auto geom = std::make_shared<const EnsembleGeometry>(make_uniform_random(n, o.trap_length, seed));
      const auto rr = build_register(geom, beam(o.wavelength), random_angles, 1.0 - 1e-9);
      const auto m = offdiagonal_magnitudes(rr.gram());
      mags.insert(mags.end(), m.begin(), m.end());
    }
    r.random_molecules.push_back(static_cast<double>(n));
    r.random_median.push_back(median(std::move(mags)));
  }
  r.slope = loglog_slope(r.random_molecules, r.random_median);

  r.checks.push_back(check_le("lattice_max_overlap", r.lattice_crosstalk, o.overlap_threshold));
  r.checks.push_back(check_in("random_median_slope", r.slope, o.slope_target - o.slope_tolerance,
                              o.slope_target + o.slope_tolerance));
  const double expected = static_cast<double>(o.n_max - o.n_min + 1);
  r.checks.push_back(check_in("angle_count", static_cast<double>(r.angle_count), expected, expected));
  r.checks.push_back(check_le("max_angle_deg", r.max_angle_deg, o.max_angle_deg));
  return r;
}

EnhancementResult enhancement_study(const EnhancementOptions& o) {
  require(!o.molecules.empty(), "enhancement study needs at least one N");
  EnhancementResult r;
  const double g = o.params.g_eff();
  for (int n : o.molecules) {
    require(n >= 1, "molecule counts must be positive");
    const double f = collective_rabi_frequency(make_lattice(n, o.trap_length), g);
    const double e = std::sqrt(static_cast<double>(n)) * g;
    r.molecules.push_back(n);
    r.fitted.push_back(f);
    r.expected.push_back(e);
    r.relative_error.push_back(std::abs(f - e) / e);
    r.checks.push_back(check_le("relative_error_N" + std::to_string(n), r.relative_error.back(), o.tolerance));
  }
  return r;
}

StirapResult stirap_study(const StirapOptions& o) {
  StirapResult r;
  r.main = measure_stirap(o.window, o.adiabaticity, o.samples);
  for (double a : o.scan) r.scan.push_back(measure_stirap(o.window, a, o.samples));
  r.checks.push_back(check_ge("adiabaticity", o.adiabaticity, o.min_adiabaticity));
  r.checks.push_back(check_ge("transfer_efficiency", r.main.efficiency, o.efficiency_threshold));
  r.checks.push_back(check_le("peak_e_el", r.main.peak_e_el, o.peak_threshold));
  r.checks.push_back(check_le("return_error", r.main.return_error, o.return_threshold));
  return r;
}

MultiplexResult multiplex_study(const MultiplexOptions& o) {
  require(o.molecules.size() >= 2, "multiplex study needs at least two N values");
  MultiplexResult r;
  std::vector<double> n;
  std::vector<double> dev;
  const WalkthroughResult* focus = nullptr;
  for (int m : o.molecules) {
    WalkthroughOptions w = o.walkthrough;
    w.n_molecules = m;
    w.naive = false;
    r.runs.push_back(run_walkthrough(w));
  }
  for (const auto& run : r.runs) {
    n.push_back(run.n_molecules);
    dev.push_back(run.max_deviation);
    if (run.n_molecules == o.focus) focus = &run;
  }
  require(focus != nullptr, "the focus N must be one of the studied N values");
  r.slope = loglog_slope(n, dev);
  double worst = 0.0;
  for (std::size_t i = 0; i < focus->steps.size(); ++i) {
    const double prev = i == 0 ? 0.0 : focus->steps[i - 1].infidelity;
    worst = std::max(worst, focus->steps[i].infidelity - prev);
  }
  WalkthroughOptions w = o.walkthrough;
  w.n_molecules = o.focus;
  w.naive = true;
  r.naive = run_walkthrough(w);
  r.checks.push_back(check_le("worst_step_infidelity_N" + std::to_string(o.focus), worst, o.step_bound));
  r.checks.push_back(check_in("deviation_slope", r.slope, o.slope_lo, o.slope_hi));
  r.checks.push_back(check_gt("naive_peak_e_el", r.naive.peak_e_el, o.naive_threshold));
  return r;
}

GatesResult gates_study(const GatesOptions& o) {
  GatesResult r;
  const auto& p = o.params;
  r.swap_schedule = default_swap_schedule(p, o.swap_duration, o.swap_far_ratio);
  r.swap = run_swap(r.swap_schedule, p);
  r.swap_transfer = std::min(std::norm(r.swap.achieved(2, 1)), std::norm(r.swap.achieved(1, 2)));
  r.cphase_schedule = default_cphase_schedule(p, o.cphase_duration_g / p.g_c, o.cphase_far_ratio);
  r.cphase = run_cphase(r.cphase_schedule, p);
  r.cphase_objective = gate_objective(r.cphase, GateTarget::cphase);
  r.rotation = cpb_rotation(RotationAxis::x, kPi, p);
  r.readout = readout_model(p.g_c, o.readout_detuning, o.readout_probe);
  r.checks.push_back(check_ge("swap_transfer", r.swap_transfer, o.transfer_threshold));
  r.checks.push_back(check_in("cphase_objective", r.cphase_objective, o.objective_lo, o.objective_hi));
  r.checks.push_back(check_le("rotation_pi_infidelity", r.rotation.infidelity, o.rotation_threshold));
  r.checks.push_back(check_lt("readout_error", r.readout.error, o.readout_threshold));
  return r;
}

OptimizeStudyResult optimize_study(const OptimizeStudyOptions& o) {
  require(!o.designs.empty(), "optimize study needs at least one gate");
  OptimizeStudyResult r;
  for (const auto& d : o.designs) {
    OptimizeOptions opt = o.optimizer;
    opt.seed = derive_seed(o.seed, std::string("optimize.") + to_string(d.target));
    OptimizedGate g{d, optimize_gate(initial_parametrization(d, o.params), d.target, o.params, opt, o.objective)};
    const std::string name = to_string(d.target);
    const auto& rep = g.result.report;
    r.checks.push_back(check_le(name + "_infidelity", rep.infidelity, o.infidelity_threshold));
    if (d.target == GateTarget::cphase) {
      r.checks.push_back(
          check_le("cphase_phase_error", std::abs(wrap_phase(rep.conditional_phase - kPi)), o.phase_threshold));
    } else {
      r.checks.push_back(check_in("swap_loss_probability", rep.loss_estimate, o.loss_lo, o.loss_hi));
    }
    r.gates.push_back(std::move(g));
  }
  return r;
}

CalibrationResult calibrate(const CalibrationOptions& o) {
  CalibrationResult r;
  r.stirap = measure_stirap(o.stirap_window, o.stirap_adiabaticity);
  auto run = [&](const GateDesign& d) {
    OptimizeOptions opt = o.optimizer;
    opt.seed = derive_seed(o.seed, std::string("optimize.") + to_string(d.target));
    return optimize_gate(initial_parametrization(d, o.params), d.target, o.params, opt).report;
  };
  require(o.swap.target == GateTarget::swap && o.cphase.target == GateTarget::cphase,
          "calibration designs must target swap and cphase");
  Calibration& c = r.calibrated;
  c.params = o.params;
  c.stirap_duration = o.stirap_window;
  c.transfer.stirap_efficiency = r.stirap.efficiency;
  c.swap = run(o.swap);
  c.cphase = run(o.cphase);
  c.readout = readout_model(o.params.g_c, o.readout_detuning, o.readout_probe);
  r.unit = Calibration::ideal(o.params, c.swap.duration, c.cphase.duration);
  r.unit.stirap_duration = o.stirap_window;
  r.unit.readout.probe_duration = o.readout_probe;
  return r;
}

BudgetStudyResult budget_study(const BudgetStudyOptions& o, const CalibrationResult& cal) {
  require(o.gates >= 1 && o.qubits >= 1, "budget study needs gates and qubits");
  BudgetStudyResult r;
  const auto circuit = random_circuit(o.qubits, o.gates, derive_seed(o.calibration.seed, "budget.circuit"));
  const auto seq = compile(circuit, o.qubits, cal.calibrated);
  r.report = budget(seq, cal.calibrated, circuit.gates.size());
  const double n = static_cast<double>(o.gates);
  r.mean_gate_time = r.report.total_time / n;
  r.mean_cpb_gate_time = r.report.cpb_time / n;
  r.max_gates = max_gates_within(r.mean_gate_time, r.report.coherence_time);
  r.max_gates_cpb = max_gates_within(r.mean_cpb_gate_time, r.report.coherence_time);
  r.coupling_cycles = o.calibration.params.g_c * r.report.coherence_time;
  r.checks.push_back(check_lt("coherence_budget_ratio", r.report.coherence_ratio, 1.0));
  r.checks.push_back(check_ge("max_gates_within_budget", static_cast<double>(r.max_gates), o.gate_threshold));
  return r;
}

EndToEndResult endtoend_study(const EndToEndOptions& o, const CalibrationResult& cal) {
  EndToEndResult r;
  auto geom = std::make_shared<const EnsembleGeometry>(make_lattice(400, 1e-3));
  const auto angles = angle_schedule(lattice_period_length(*geom), 500e-9, 1, 2);
  auto reg = std::make_shared<const ModeRegister>(build_register(geom, beam(500e-9), angles, 1e-9));
  const auto circuit = bell_circuit();
  const CVector target = reference_statevector(circuit);
  std::mt19937_64 rng(derive_seed(o.calibration.seed, "endtoend.readout"));

  const auto unit = execute(compile(circuit, 2, cal.unit), RegisterState::vacuum(reg), cal.unit, rng);
  r.unit_fidelity = logical_fidelity(unit.state, target);
  const auto calibrated =
      execute(compile(circuit, 2, cal.calibrated), RegisterState::vacuum(reg), cal.calibrated, rng);
  r.calibrated_fidelity = logical_fidelity(calibrated.state, target);
  r.budget = calibrated.budget;
  r.trace = calibrated.trace;

  LogicalCircuit meas;
  meas.n_qubits = 2;
  meas.measure(0).measure(1);
  const auto mseq = compile(meas, 2, cal.calibrated);
  for (std::size_t s = 0; s < o.shots; ++s) {
    const auto m = execute(mseq, calibrated.state, cal.calibrated, rng);
    const int b0 = m.outcomes.at(0).front() ? 1 : 0;
    const int b1 = m.outcomes.at(1).front() ? 1 : 0;
    ++r.counts[2 * b0 + b1];
  }
  if (o.shots > 0) {
    const double same = static_cast<double>(r.counts[0] + r.counts[3]);
    const double diff = static_cast<double>(r.counts[1] + r.counts[2]);
    r.parity = (same - diff) / static_cast<double>(o.shots);
  }
  r.checks.push_back(check_ge("bell_fidelity_unit", r.unit_fidelity, o.unit_threshold));
  r.checks.push_back(check_ge("bell_fidelity_calibrated", r.calibrated_fidelity, o.calibrated_threshold));
  return r;
}

}  // namespace holoreg
