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

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "holoreg/common.hpp"
#include "holoreg/phasegeom.hpp"

namespace holoreg {

// Five-level molecule: hyperfine ground g, auxiliary m, storage f, the
// rotationally excited e and the electronically excited e_el.
enum class Level : std::uint8_t { g = 0, m = 1, f = 2, e = 3, e_el = 4 };

const char* to_string(Level level);
Level level_from_string(const std::string& s);

struct Excitation {
  std::uint32_t molecule = 0;
  Level level = Level::m;
  auto operator<=>(const Excitation&) const = default;
};

struct BasisState {
  int photons = 0;
  bool cpb_excited = false;
  std::vector<Excitation> excitations;  // sorted by molecule, level != g

  int excitation_number() const {
    return photons + (cpb_excited ? 1 : 0) + static_cast<int>(excitations.size());
  }
  std::optional<Level> level_of(std::uint32_t molecule) const;
  std::string label() const;
  auto operator<=>(const BasisState&) const = default;
};

struct BasisOptions {
  int n_molecules = 1;
  int n_max = 1;
  int excitation_cap = 2;
  bool include_cpb = false;
  std::vector<Level> levels{Level::m, Level::f, Level::e, Level::e_el};
  std::size_t max_states = 4'000'000;
};

// Excitation-bounded product basis, sorted lexicographically on
// (photons, cpb, excitation list). Immutable.
class Basis {
 public:
  explicit Basis(BasisOptions options);

  const BasisOptions& options() const { return options_; }
  std::size_t size() const { return states_.size(); }
  const BasisState& operator[](std::size_t i) const { return states_[i]; }
  const std::vector<BasisState>& states() const { return states_; }
  std::optional<std::size_t> index_of(const BasisState& s) const;
  std::size_t require_index(const BasisState& s) const;
  bool has_level(Level l) const;

 private:
  BasisOptions options_;
  std::vector<BasisState> states_;
};

// Closed-form size of the basis described by options.
std::uint64_t basis_size(const BasisOptions& options);

Basis enumerate_basis(int n_molecules, int n_max, int excitation_cap, bool include_cpb);

// Physical rates, all in rad/s unless noted.
struct SystemParams {
  double g_single = kTwoPi * 50e3;      // single-molecule cavity coupling g
  double Delta = kTwoPi * 100e6;        // one-photon Raman detuning
  double omega_mw = kTwoPi * 63.2455532e6;  // microwave Rabi frequency of the Raman leg
  double n_ground = 1e5;                // N0, molecules in g
  double g_c = kTwoPi * 200e6;          // CPB-cavity coupling
  double kappa = kTwoPi * 5e3;          // cavity decay
  double gamma_cpb = 1.0 / 4e-6;        // 1/T1
  double gamma_phi = 1.0 / 1e-6;        // 1/T2

  // Omega_MW g / (2 Delta)
  double g_eff() const { return omega_mw * g_single / (2.0 * Delta); }
  // sqrt(N0) g_eff, the cavity <-> |m,0> exchange rate
  double collective_rate() const { return std::sqrt(n_ground) * g_eff(); }
  void validate() const;
};

struct StorageDetunings {
  double one_photon = 0.0;  // on e_el
  double two_photon = 0.0;  // on f
};

// Omega1 e^{i k1.x_j}|e_el_j><m_j| + Omega2 e^{i k2.x_j}|e_el_j><f_j| + h.c.
// plus detunings. Complex Rabi frequencies carry the laser phases.
SparseOp build_optical_storage_hamiltonian(const EnsembleGeometry& geom, const Basis& basis, Complex omega1,
                                           const WaveVector& k1, Complex omega2, const WaveVector& k2,
                                           const StorageDetunings& detunings = {});

// g_eff (c^dag sum_j |g_j><m_j| + h.c.) - delta c^dag c. A complex g_eff
// carries the microwave phase: g_eff c^dag S^- + conj(g_eff) c S^+.
SparseOp build_raman_cavity_hamiltonian(const EnsembleGeometry& geom, const Basis& basis, Complex g_eff,
                                        double delta);

// g_c (sigma^- c^dag + sigma^+ c) + delta_cpb sigma^+ sigma^-
SparseOp build_cpb_hamiltonian(const Basis& basis, double g_c, double delta_cpb);

// Diagonal operator with entries f(state).
SparseOp diagonal_operator(const Basis& basis, const std::function<double(const BasisState&)>& f);
SparseOp photon_number_operator(const Basis& basis);
SparseOp cpb_excited_operator(const Basis& basis);
SparseOp level_population_operator(const Basis& basis, Level level);

// Amplitude vector of the collective state prod_k A^dag(level_k, p_k) |g...g>
// with A^dag(l, p) = N^{-1/2} sum_j e^{i p.x_j} |l_j><g_j|, normalized.
// photons/cpb select the field part. Returns the zero vector if the product
// vanishes (e.g. more excitations than molecules).
CVector collective_state(const EnsembleGeometry& geom, const Basis& basis, int photons, bool cpb_excited,
                         const std::vector<std::pair<Level, WaveVector>>& excitations);

// Coordinate-list CSV with header row,col,re,im.
std::string sparse_to_csv(const SparseOp& op);

}  // namespace holoreg
