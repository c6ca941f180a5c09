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

#include <array>
#include <random>
#include <string>
#include <vector>

#include "holoreg/collective.hpp"
#include "holoreg/common.hpp"
#include "holoreg/dynamics.hpp"
#include "holoreg/hilbert.hpp"
#include "holoreg/pulses.hpp"

namespace holoreg {

// Computational states of the CPB-cavity pair in gate order g0, g1, e0, e1
// (index 2 cpb + photons). |g,2> is the only leakage state reachable from
// them in the excitation-2 basis.
Basis gate_basis();
const std::array<BasisState, 4>& computational_states();
inline const BasisState kLeakState{2, false, {}};

CMatrix ideal_swap();
CMatrix ideal_cz();

enum class RotationAxis { x, y, z };
RotationAxis axis_from_string(const std::string& s);
const char* to_string(RotationAxis axis);
// exp(-i angle sigma_axis / 2) on (g, e)
CMatrix rotation_matrix(RotationAxis axis, double angle);

// Post-gate virtual-Z frame: phase alpha on CPB e, beta on one photon.
struct LocalZ {
  double alpha = 0.0;
  double beta = 0.0;
  CMatrix matrix() const;  // diag(1, e^{i beta}, e^{i alpha}, e^{i (alpha + beta)})
};

struct FidelityBreakdown {
  double average = 0.0;               // (Tr M M^dag + |Tr M|^2) / (d (d + 1))
  double process = 0.0;               // |Tr M|^2 / d^2
  double worst_case_infidelity = 0.0;  // 1 - min over states |<psi|M|psi>|^2
  CMatrix corrected;                   // D U
  LocalZ correction;
};

// M = V^dag U with no frame freedom.
FidelityBreakdown gate_fidelity(const CMatrix& u, const CMatrix& target);
// Same after the best post-gate local-Z frame on a 4x4 gate.
FidelityBreakdown local_z_fidelity(const CMatrix& u, const CMatrix& target);
// Distance from the origin to the convex hull of the eigenvalues of m.
double eigenvalue_hull_distance(const CMatrix& m);

// phi_e1 - phi_e0 - phi_g1 + phi_g0, wrapped to (-pi, pi].
double conditional_phase(const CMatrix& u);
double wrap_phase(double phi);

struct GateSettings {
  double tolerance = 1e-8;
  bool check_convergence = true;
  double max_step = 0.0;  // 0: derived from ||H||
  double leakage_warning = 1e-3;
};

struct GateReport {
  std::string target;
  CMatrix achieved;  // 4x4 (2x2 for rotations) block of the propagator
  CMatrix ideal;
  FidelityBreakdown fidelity;
  double infidelity = 0.0;  // 1 - average fidelity after local-Z correction
  double leakage = 0.0;     // mean population outside the subspace
  double duration = 0.0;
  double loss_estimate = 0.0;
  double conditional_phase = 0.0;  // cphase only
  double population_loss = 0.0;    // cphase: worst diagonal population deficit
  std::vector<std::string> warnings;
};

// Propagates g0, g1, e0, e1 under g_c (sigma^- c^dag + h.c.) + delta_cpb(t)
// sigma^+ sigma^- for the schedule's delta_cpb channel.
GateReport run_swap(const PulseSchedule& schedule, const SystemParams& params, const GateSettings& settings = {});
GateReport run_cphase(const PulseSchedule& schedule, const SystemParams& params,
                      const GateSettings& settings = {});

// Adiabatic conditional-phase rate (sqrt(d^2 + 8 g^2) - d) / 2 integrated
// over the schedule, with the sign of the accumulated dynamical phase.
double adiabatic_conditional_phase(const PulseSchedule& schedule, double g_c);

// Baseline sweeps. The cphase excursion depth is set by bisection so the
// adiabatic conditional phase is the nearest odd multiple of pi.
PulseSchedule default_swap_schedule(const SystemParams& params, double duration, double far_ratio,
                                    std::size_t n_samples = 801);
PulseSchedule default_cphase_schedule(const SystemParams& params, double duration, double far_ratio,
                                      std::size_t n_samples = 801);

struct RotationSettings {
  double idle_ratio = 20.0;  // delta_cpb / g_c while the drive is on
  double rabi = 0.0;         // rad/s; 0 means g_c / 2
  GateSettings gate;
};

// Square microwave pulse on the CPB, resonant with the dressed transition
// (delta + sqrt(delta^2 + 4 g^2)) / 2, simulated with the cavity attached.
// z rotations are virtual and exact.
GateReport cpb_rotation(RotationAxis axis, double angle, const SystemParams& params,
                        const RotationSettings& settings = {});

// Dispersive readout: chi = g_c^2 / delta, matched probe kappa_r = 2|chi|,
// photon number 0.1 n_crit with n_crit = delta^2 / (4 g_c^2).
struct ReadoutModel {
  double chi = 0.0;
  double kappa_r = 0.0;
  double n_bar = 0.0;
  double probe_duration = 0.0;
  double snr = 0.0;
  double error = 0.0;  // symmetric assignment error
  std::string warning;
};

ReadoutModel readout_model(double g_c, double delta_cpb, double probe_duration, double target_error = 1e-2);

struct ReadoutResult {
  bool reported_excited = false;
  bool cpb_excited = false;
  double p_excited = 0.0;
  RegisterState post;
};

// Samples the true CPB state by the Born rule, flips the record with the
// model's assignment error and collapses the register accordingly.
ReadoutResult readout(const RegisterState& state, const ReadoutModel& model, std::mt19937_64& rng);

}  // namespace holoreg
