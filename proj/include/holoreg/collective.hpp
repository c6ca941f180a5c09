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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "holoreg/common.hpp"
#include "holoreg/hilbert.hpp"
#include "holoreg/phasegeom.hpp"

namespace holoreg {

// Integer combination sum_k c_k q_k of register modes, kept sorted by mode
// with zero coefficients dropped so equal momenta compare equal.
class Momentum {
 public:
  Momentum() = default;
  static Momentum mode(std::size_t k);

  Momentum operator+(const Momentum& o) const;
  Momentum operator-(const Momentum& o) const;
  bool is_zero() const { return terms_.empty(); }
  const std::vector<std::pair<std::uint32_t, int>>& terms() const { return terms_; }
  WaveVector evaluate(const ModeRegister& reg) const;
  std::string label() const;

  auto operator<=>(const Momentum&) const = default;

 private:
  std::vector<std::pair<std::uint32_t, int>> terms_;
};

struct ModeOccupation {
  std::uint32_t mode_index = 0;
  Level level = Level::f;  // f or m
  Momentum momentum;

  auto operator<=>(const ModeOccupation&) const = default;
};

// One effective basis configuration. Occupations are sorted by mode index,
// at most one per mode.
struct RegisterConfig {
  int photons = 0;  // 0 or 1
  bool cpb_excited = false;
  std::vector<ModeOccupation> occupations;

  const ModeOccupation* find(std::uint32_t mode) const;
  std::string label() const;
  auto operator<=>(const RegisterConfig&) const = default;
};

enum class SwapDirection { store, retrieve };

struct TransferSettings {
  double stirap_efficiency = 1.0;
  double swap_efficiency = 1.0;
  // Leakage from one cavity swap above which a warning is recorded.
  double leakage_bound = 1e-6;
};

// Sparse amplitude map over RegisterConfigs. A value type: every operation
// returns a new state. Population removed by imperfect transfers shows up as
// a norm deficit and is tallied in lost_population().
class RegisterState {
 public:
  using Amplitudes = std::map<RegisterConfig, Complex>;

  explicit RegisterState(std::shared_ptr<const ModeRegister> reg);

  static RegisterState vacuum(std::shared_ptr<const ModeRegister> reg);
  // Product state from per-qubit amplitudes (alpha_i, beta_i); qubits not
  // listed are |0>.
  static RegisterState product(std::shared_ptr<const ModeRegister> reg,
                               const std::map<std::size_t, std::pair<Complex, Complex>>& qubits);
  // Logical superposition sum_b amp_b |b>, keys are bit strings of length K.
  static RegisterState logical(std::shared_ptr<const ModeRegister> reg,
                               const std::map<std::vector<bool>, Complex>& amplitudes);

  const ModeRegister& reg() const { return *reg_; }
  std::shared_ptr<const ModeRegister> reg_ptr() const { return reg_; }
  const Amplitudes& amplitudes() const { return amps_; }
  Amplitudes& amplitudes() { return amps_; }
  std::size_t qubit_count() const { return reg_->size(); }

  double norm_squared() const;
  double lost_population() const { return lost_; }
  double leakage() const { return leakage_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::optional<std::size_t> shifted_back() const { return shifted_back_; }

  bool cavity_empty(double tol = 1e-14) const;
  bool cpb_idle(double tol = 1e-14) const;
  // True if mode j carries amplitude in any configuration.
  bool mode_occupied(std::size_t j, double tol = 1e-14) const;

  // Adds amp to a configuration, checking the hard-core constraint.
  void add(const RegisterConfig& c, Complex amp);
  // Drops amplitudes with |a| <= tol.
  void prune(double tol = 0.0);

  // Loads a qubit onto the empty cavity: |0> -> alpha|0> + beta|1>.
  RegisterState with_cavity_qubit(Complex alpha, Complex beta) const;

  // Amplitudes of logical basis states (cavity empty, CPB in g, every
  // occupation at (f, q_i)). Other configurations are ignored.
  std::map<std::vector<bool>, Complex> logical_amplitudes() const;
  // 2x2 reduced density matrix of logical qubit i.
  CMatrix reduced_qubit(std::size_t i) const;

  void note_loss(double p) { lost_ += p; }
  void note_leakage(double p) { leakage_ += p; }
  void warn(std::string w) { warnings_.push_back(std::move(w)); }
  void set_shifted_back(std::optional<std::size_t> j) { shifted_back_ = j; }

 private:
  std::shared_ptr<const ModeRegister> reg_;
  Amplitudes amps_;
  double lost_ = 0.0;
  double leakage_ = 0.0;
  std::vector<std::string> warnings_;
  std::optional<std::size_t> shifted_back_;
};

// <a|b> over matching configurations.
Complex inner_product(const RegisterState& a, const RegisterState& b);
// |<a|b>|^2 / (<a|a><b|b>)
double state_fidelity(const RegisterState& a, const RegisterState& b);

// Inverted STIRAP with k2_j: every (f, p) becomes (m, p - q_j).
RegisterState shift_back(const RegisterState& state, std::size_t j, double efficiency = 1.0);
// Forward STIRAP with k2_j: every (m, p) becomes (f, p + q_j). Must follow
// shift_back(j).
RegisterState shift_forward(const RegisterState& state, std::size_t j, double efficiency = 1.0);

// Raman exchange between the cavity photon and (m, 0) at the collective
// rate for the given duration (rotation angle rate * duration). Spectators
// at (m, p != 0) leak through the Gram factor |<0|p>|.
RegisterState cavity_mode_swap(const RegisterState& state, SwapDirection direction, double duration,
                               double collective_rate, const TransferSettings& settings = {});

// shift_back(j), cavity -> (m, 0) pi-pulse, shift_forward(j).
RegisterState store_qubit(const RegisterState& state, std::size_t j, double collective_rate,
                          const TransferSettings& settings = {});
// shift_back(j), (m, 0) -> cavity pi-pulse, shift_forward(j).
RegisterState retrieve_qubit(const RegisterState& state, std::size_t j, double collective_rate,
                             const TransferSettings& settings = {});

// Duration of the cavity <-> (m, 0) pi-pulse.
inline double swap_duration(double collective_rate) { return kPi / (2.0 * collective_rate); }

// Applies a 4x4 operator on (CPB, cavity) in the order g0, g1, e0, e1
// (index 2 cpb + photons). Amplitude leaving the subspace is dropped and
// counted as loss if the operator is not unitary.
RegisterState apply_field_operator(const RegisterState& state, const CMatrix& u4);

// Projects the CPB onto e (or g); returns the branch probability and the
// renormalized post-measurement state.
std::pair<double, RegisterState> project_cpb(const RegisterState& state, bool excited);

// JSON-ready snapshot rows: label and amplitude.
std::vector<std::pair<std::string, Complex>> snapshot(const RegisterState& state);

}  // namespace holoreg
