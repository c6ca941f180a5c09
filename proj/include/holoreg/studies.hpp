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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "holoreg/dynamics.hpp"
#include "holoreg/gates.hpp"
#include "holoreg/optctl.hpp"
#include "holoreg/oracle.hpp"
#include "holoreg/protocol.hpp"

namespace holoreg {

// Per-component seed: splitmix64(root ^ fnv1a64(name)). Components are
// addressed by dotted names such as "optimize.swap".
std::uint64_t derive_seed(std::uint64_t root, std::string_view name);

// One checked claim: value compared against threshold.
struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string comparison;  // "<=", ">=", "<", ">", "in"
  double threshold_hi = 0.0;  // upper end for "in"
  bool pass = false;
};

Check check_le(std::string name, double value, double threshold);
Check check_ge(std::string name, double value, double threshold);
Check check_lt(std::string name, double value, double threshold);
Check check_gt(std::string name, double value, double threshold);
Check check_in(std::string name, double value, double lo, double hi);

// Phase-pattern orthogonality and the angle schedule.
struct OrthogonalityOptions {
  std::int64_t lattice_molecules = 10000;
  double trap_length = 5e-3;  // m
  double wavelength = 500e-9;  // m
  int n_min = -50;
  int n_max = 50;
  std::vector<std::int64_t> random_molecules{100, 1000, 10000, 100000};
  std::size_t random_geometries = 20;  // seeds per N
  int random_n_min = -10;              // mode range for the random study
  int random_n_max = 10;
  double overlap_threshold = 1e-12;
  double slope_target = -0.5;
  double slope_tolerance = 0.1;
  double max_angle_deg = 0.3;
  std::uint64_t seed = 0;
};

struct OrthogonalityResult {
  double lattice_crosstalk = 0.0;
  std::size_t lattice_modes = 0;
  std::size_t angle_count = 0;
  double max_angle_deg = 0.0;
  std::vector<double> angles_deg;
  std::vector<double> random_molecules;
  std::vector<double> random_median;
  double slope = 0.0;
  std::vector<Check> checks;
};

OrthogonalityResult orthogonality_study(const OrthogonalityOptions& o);

// sqrt(N) collective enhancement by brute-force propagation.
struct EnhancementOptions {
  std::vector<int> molecules{1, 4, 9};
  double trap_length = 1e-3;
  SystemParams params;  // supplies g_eff
  double tolerance = 1e-6;
};

struct EnhancementResult {
  std::vector<int> molecules;
  std::vector<double> fitted;
  std::vector<double> expected;
  std::vector<double> relative_error;
  std::vector<Check> checks;
};

EnhancementResult enhancement_study(const EnhancementOptions& o);

struct StirapOptions {
  double window = kDefaultStirapWindow;
  double adiabaticity = kDefaultStirapAdiabaticity;  // the checked operating point
  std::vector<double> scan{10.0 * kPi, 20.0 * kPi, 40.0 * kPi};
  std::size_t samples = 1001;
  double efficiency_threshold = 0.999;
  double peak_threshold = 1e-3;
  double return_threshold = 1e-3;
  double min_adiabaticity = 10.0 * kPi;
};

struct StirapResult {
  StirapTransfer main;
  std::vector<StirapTransfer> scan;
  std::vector<Check> checks;
};

StirapResult stirap_study(const StirapOptions& o);

struct MultiplexOptions {
  WalkthroughOptions walkthrough;
  std::vector<int> molecules{4, 8, 12};
  int focus = 8;
  double step_bound = 2e-2;
  double slope_lo = -1.3;
  double slope_hi = -0.7;
  double naive_threshold = 1e-2;
};

struct MultiplexResult {
  std::vector<WalkthroughResult> runs;
  WalkthroughResult naive;
  double slope = 0.0;
  std::vector<Check> checks;
};

MultiplexResult multiplex_study(const MultiplexOptions& o);

// Unoptimized baseline gates.
struct GatesOptions {
  SystemParams params;
  double swap_duration = 100e-9;
  double swap_far_ratio = 20.0;
  double cphase_duration_g = 10.0;  // units of 1 / g_c
  double cphase_far_ratio = 10.0;
  double readout_detuning = kTwoPi * 2e9;
  double readout_probe = 30e-9;
  double transfer_threshold = 0.99;
  double objective_lo = 1e-3;
  double objective_hi = 1e-1;
  double rotation_threshold = 3e-3;
  double readout_threshold = 1e-2;
};

struct GatesResult {
  GateReport swap;
  double swap_transfer = 0.0;  // min of |<e0|U|g1>|^2 and |<g1|U|e0>|^2
  PulseSchedule swap_schedule;
  GateReport cphase;
  double cphase_objective = 0.0;
  PulseSchedule cphase_schedule;
  GateReport rotation;
  ReadoutModel readout;
  std::vector<Check> checks;
};

GatesResult gates_study(const GatesOptions& o);

struct OptimizeStudyOptions {
  SystemParams params;
  std::vector<GateDesign> designs{default_design(GateTarget::swap), default_design(GateTarget::cphase)};
  OptimizeOptions optimizer;
  ObjectiveSettings objective;
  double infidelity_threshold = 1e-4;
  double phase_threshold = 1e-3;
  double loss_lo = 1e-5;
  double loss_hi = 1e-3;
  std::uint64_t seed = 0;
};

struct OptimizedGate {
  GateDesign design;
  GateOptimization result;
};

struct OptimizeStudyResult {
  std::vector<OptimizedGate> gates;
  std::vector<Check> checks;
};

OptimizeStudyResult optimize_study(const OptimizeStudyOptions& o);

// Calibrated building blocks for the protocol.
struct CalibrationOptions {
  SystemParams params;
  double stirap_window = kDefaultStirapWindow;
  double stirap_adiabaticity = kDefaultStirapAdiabaticity;
  GateDesign swap = default_design(GateTarget::swap);
  GateDesign cphase = default_design(GateTarget::cphase);
  OptimizeOptions optimizer;
  double readout_detuning = kTwoPi * 2e9;
  double readout_probe = 30e-9;
  std::uint64_t seed = 0;
};

struct CalibrationResult {
  Calibration calibrated;
  Calibration unit;  // exact gates and unit efficiencies, same durations
  StirapTransfer stirap;
};

CalibrationResult calibrate(const CalibrationOptions& o);

struct BudgetStudyOptions {
  CalibrationOptions calibration;
  std::size_t qubits = 100;
  std::size_t gates = 1000;
  double gate_threshold = 1000.0;
};

struct BudgetStudyResult {
  BudgetReport report;
  double mean_gate_time = 0.0;
  double mean_cpb_gate_time = 0.0;
  std::size_t max_gates = 0;      // total time within min(T1, T2)
  std::size_t max_gates_cpb = 0;  // CPB-busy time only
  double coupling_cycles = 0.0;   // g_c min(T1, T2)
  std::vector<Check> checks;
};

BudgetStudyResult budget_study(const BudgetStudyOptions& o, const CalibrationResult& cal);

struct EndToEndOptions {
  CalibrationOptions calibration;
  std::size_t shots = 2000;
  double unit_threshold = 0.999;
  double calibrated_threshold = 0.99;
};

struct EndToEndResult {
  double unit_fidelity = 0.0;
  double calibrated_fidelity = 0.0;
  BudgetReport budget;
  std::vector<TraceRow> trace;
  // sampled joint outcomes (q0, q1) of the calibrated circuit
  std::size_t counts[4] = {0, 0, 0, 0};
  double parity = 0.0;  // <Z0 Z1> estimate
  std::vector<Check> checks;
};

EndToEndResult endtoend_study(const EndToEndOptions& o, const CalibrationResult& cal);

}  // namespace holoreg
