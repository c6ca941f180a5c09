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

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "holoreg/common.hpp"
#include "holoreg/hilbert.hpp"
#include "holoreg/pulses.hpp"

namespace holoreg {

using Coefficient = std::function<double(double)>;

struct HamiltonianTerm {
  SparseOp op;            // Hermitian
  Coefficient coefficient;  // empty means constant 1
  std::string name;

  double at(double t) const { return coefficient ? coefficient(t) : 1.0; }
};

// H(t) = sum_k c_k(t) H_k with real coefficients and Hermitian H_k.
class TimeDependentHamiltonian {
 public:
  explicit TimeDependentHamiltonian(Eigen::Index dim) : dim_(dim) {}

  void add(SparseOp op, Coefficient coefficient = {}, std::string name = {});
  // Times where coefficients have kinks (schedule grid points). Steps never
  // straddle more than one grid interval.
  void add_breakpoints(const std::vector<double>& times);

  Eigen::Index dim() const { return dim_; }
  const std::vector<HamiltonianTerm>& terms() const { return terms_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  SparseOp at(double t) const;
  void apply(double t, const CMatrix& in, CMatrix& out) const;
  // Upper bound of ||H(t)|| over [t0, t1] from per-term row-sum norms and
  // coefficient samples at breakpoints and n uniform points.
  double norm_bound(double t0, double t1, std::size_t n = 257) const;

 private:
  Eigen::Index dim_;
  std::vector<HamiltonianTerm> terms_;
  std::vector<double> breakpoints_;
};

// Coefficient reading a schedule channel, scaled.
Coefficient schedule_channel(std::shared_ptr<const PulseSchedule> schedule, const std::string& channel,
                             double scale = 1.0);

enum class Integrator { automatic, rk4, magnus4 };

struct Observable {
  std::string name;
  SparseOp op;
};

struct PropagationOptions {
  double tolerance = 1e-8;
  Integrator integrator = Integrator::automatic;
  double max_step = 0.0;  // 0 derives it from ||H|| and the breakpoints
  std::size_t min_steps = 16;
  bool check_convergence = true;
  int max_refinements = 8;
  std::size_t max_block_for_magnus = 48;
  std::vector<Observable> observables;  // traced expectation values
  std::size_t trace_stride = 0;         // record every n-th step (0: none)
  std::optional<SparseOp> photon_number;  // for occupancy integrals
  std::optional<SparseOp> cpb_excited;
};

struct PropagationResult {
  CMatrix final_state;  // one column per propagated state
  double norm_drift = 0.0;
  std::vector<double> trace_times;
  std::map<std::string, std::vector<double>> traces;  // column-averaged
  double cavity_occupancy_integral = 0.0;             // photon*s, column-averaged
  double cpb_occupancy_integral = 0.0;                // s, column-averaged
  std::size_t steps = 0;
  double refinement_change = 0.0;  // ||psi_h - psi_{h/2}|| at acceptance

  CVector state() const { return final_state.col(0); }
};

// Propagates the columns of psi0 from t0 to t1. Fixed-step RK4 on sparse H,
// or fourth-order Magnus with exact exponentials on the dense blocks of the
// conserved-sparsity decomposition. With check_convergence the step is
// halved until the final state moves by less than tolerance.
PropagationResult propagate(const CMatrix& psi0, const TimeDependentHamiltonian& h, double t0, double t1,
                            const PropagationOptions& options = {});

// Optical storage Hamiltonian driven by the omega1/omega2 channels of a
// schedule. The pump carries phase pi, so the forward dark-state passage
// maps |m> to +|f>.
TimeDependentHamiltonian stirap_hamiltonian(const EnsembleGeometry& geom, const Basis& basis,
                                            std::shared_ptr<const PulseSchedule> schedule, const WaveVector& k1,
                                            const WaveVector& k2, const StorageDetunings& detunings = {});

struct StirapTransfer {
  double window = 0.0;
  double adiabaticity = 0.0;
  double efficiency = 0.0;    // |m> -> |f> population after the forward pair
  double peak_e_el = 0.0;     // largest e_el population during the forward pair
  double return_error = 0.0;  // 1 - |m> population after forward then inverted
  double peak_e_el_return = 0.0;
  // populations during the forward pair
  std::vector<double> times;
  std::vector<double> p_m;
  std::vector<double> p_f;
  std::vector<double> p_e_el;
};

// Forward then inverted standard STIRAP on one Lambda molecule (m, f, e_el).
StirapTransfer measure_stirap(double window, double adiabaticity, std::size_t n_samples = 1001);

// Connected components of the combined sparsity pattern of all terms.
std::vector<std::vector<Eigen::Index>> coupled_blocks(const TimeDependentHamiltonian& h);

struct LossRates {
  double kappa = 0.0;      // cavity decay, rad/s
  double gamma_cpb = 0.0;  // CPB relaxation 1/T1
};

// kappa * int <c^dag c> dt + gamma_cpb * int <sigma^+ sigma^-> dt
double loss_probability(const PropagationResult& result, const LossRates& rates);

struct RabiFit {
  double frequency = 0.0;  // coupling Omega in P(t) = cos^2(Omega t)
  double residual = 0.0;   // rms residual of the fit
};

// Fits y(t) = a + b cos(w t) + c sin(w t), returns w/2 (exchange coupling).
RabiFit fit_exchange_frequency(const std::vector<double>& t, const std::vector<double>& y);

// Exchange coupling between the cavity photon and the symmetric |m,0> state,
// measured by brute-force propagation of the Raman Hamiltonian on n_molecules
// equidistant molecules and a cosine fit.
double collective_rabi_frequency(const EnsembleGeometry& geom, double g_eff);

}  // namespace holoreg
