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


#include "holoreg/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace holoreg {

namespace {

using Triplet = Eigen::Triplet<Complex>;

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void add_hermitian(std::vector<Triplet>& t, std::size_t row, std::size_t col, Complex value) {
  t.emplace_back(static_cast<int>(row), static_cast<int>(col), value);
  t.emplace_back(static_cast<int>(col), static_cast<int>(row), std::conj(value));
}

SparseOp from_triplets(std::size_t dim, const std::vector<Triplet>& t) {
  SparseOp op(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  op.setFromTriplets(t.begin(), t.end());
  op.makeCompressed();
  return op;
}

void check_geometry(const EnsembleGeometry& geom, const Basis& basis) {
  if (static_cast<int>(geom.size()) != basis.options().n_molecules) {
    std::ostringstream os;
    os << "geometry has " << geom.size() << " molecules but basis was built for "
       << basis.options().n_molecules;
    throw InvalidArgument(os.str());
  }
}

BasisState with_level(const BasisState& s, std::size_t slot, Level level) {
  BasisState out = s;
  out.excitations[slot].level = level;
  return out;
}

BasisState without(const BasisState& s, std::size_t slot) {
  BasisState out = s;
  out.excitations.erase(out.excitations.begin() + static_cast<std::ptrdiff_t>(slot));
  return out;
}

}  // namespace

const char* to_string(Level level) {
  switch (level) {
    case Level::g: return "g";
    case Level::m: return "m";
    case Level::f: return "f";
    case Level::e: return "e";
    case Level::e_el: return "e_el";
  }
  return "?";
}

Level level_from_string(const std::string& s) {
  if (s == "g") return Level::g;
  if (s == "m") return Level::m;
  if (s == "f") return Level::f;
  if (s == "e") return Level::e;
  if (s == "e_el") return Level::e_el;
  throw InvalidArgument("unknown molecular level '" + s + "'");
}

std::optional<Level> BasisState::level_of(std::uint32_t molecule) const {
  for (const auto& e : excitations)
    if (e.molecule == molecule) return e.level;
  return std::nullopt;
}

std::string BasisState::label() const {
  std::ostringstream os;
  os << "|" << photons << (cpb_excited ? ",e" : ",g");
  for (const auto& e : excitations) os << "," << to_string(e.level) << e.molecule;
  os << ">";
  return os.str();
}

std::uint64_t basis_size(const BasisOptions& o) {
  const auto levels = static_cast<std::uint64_t>(o.levels.size());
  std::uint64_t total = 0;
  for (int p = 0; p <= o.n_max; ++p) {
    for (int c = 0; c <= (o.include_cpb ? 1 : 0); ++c) {
      const int budget = o.excitation_cap - p - c;
      std::uint64_t pow = 1;
      for (int k = 0; k <= std::min(budget, o.n_molecules); ++k) {
        total += binomial(static_cast<std::uint64_t>(o.n_molecules), static_cast<std::uint64_t>(k)) * pow;
        pow *= levels;
      }
    }
  }
  return total;
}

Basis::Basis(BasisOptions options) : options_(std::move(options)) {
  require(options_.n_molecules >= 1, "basis needs n_molecules >= 1");
  require(options_.excitation_cap >= 1, "basis needs excitation_cap >= 1");
  require(options_.n_max >= 0, "basis needs n_max >= 0");
  auto& lv = options_.levels;
  std::sort(lv.begin(), lv.end());
  lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
  require(std::find(lv.begin(), lv.end(), Level::g) == lv.end(), "g is the reference level, not an excitation");

  const std::uint64_t count = basis_size(options_);
  if (count > options_.max_states) {
    std::ostringstream os;
    os << "basis of " << count << " states exceeds budget " << options_.max_states << " (n_molecules="
       << options_.n_molecules << ", n_max=" << options_.n_max << ", excitation_cap=" << options_.excitation_cap
       << ", levels=" << lv.size() << ", include_cpb=" << options_.include_cpb << ")";
    throw CapacityError(os.str());
  }
  states_.reserve(count);

  // Depth-first over molecules in increasing index; every prefix is valid.
  std::vector<Excitation> current;
  std::function<void(int, int, bool, std::uint32_t)> extend = [&](int p, int budget, bool c, std::uint32_t from) {
    states_.push_back(BasisState{p, c, current});
    if (budget == 0) return;
    for (auto j = from; j < static_cast<std::uint32_t>(options_.n_molecules); ++j) {
      for (Level l : lv) {
        current.push_back({j, l});
        extend(p, budget - 1, c, j + 1);
        current.pop_back();
      }
    }
  };
  for (int p = 0; p <= options_.n_max; ++p) {
    for (int c = 0; c <= (options_.include_cpb ? 1 : 0); ++c) {
      const int budget = options_.excitation_cap - p - c;
      if (budget < 0) continue;
      extend(p, budget, c == 1, 0);
    }
  }
  std::sort(states_.begin(), states_.end());
}

std::optional<std::size_t> Basis::index_of(const BasisState& s) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), s);
  if (it == states_.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

std::size_t Basis::require_index(const BasisState& s) const {
  auto idx = index_of(s);
  if (!idx) throw InvalidArgument("state " + s.label() + " is outside the basis");
  return *idx;
}

bool Basis::has_level(Level l) const {
  return std::find(options_.levels.begin(), options_.levels.end(), l) != options_.levels.end();
}

Basis enumerate_basis(int n_molecules, int n_max, int excitation_cap, bool include_cpb) {
  BasisOptions o;
  o.n_molecules = n_molecules;
  o.n_max = n_max;
  o.excitation_cap = excitation_cap;
  o.include_cpb = include_cpb;
  return Basis(o);
}

SparseOp build_optical_storage_hamiltonian(const EnsembleGeometry& geom, const Basis& basis, Complex omega1,
                                           const WaveVector& k1, Complex omega2, const WaveVector& k2,
                                           const StorageDetunings& detunings) {
  check_geometry(geom, basis);
  require(basis.has_level(Level::m) && basis.has_level(Level::f) && basis.has_level(Level::e_el),
          "optical storage Hamiltonian needs levels m, f and e_el in the basis");
  const auto& x = geom.positions();
  std::vector<Triplet> t;
  for (std::size_t b = 0; b < basis.size(); ++b) {
    const BasisState& s = basis[b];
    double diag = 0.0;
    for (std::size_t slot = 0; slot < s.excitations.size(); ++slot) {
      const auto& ex = s.excitations[slot];
      const Vec3& xj = x[ex.molecule];
      if (ex.level == Level::m && omega1 != 0.0) {
        const double ph = k1.components.dot(xj);
        const std::size_t to = basis.require_index(with_level(s, slot, Level::e_el));
        add_hermitian(t, to, b, omega1 * Complex(std::cos(ph), std::sin(ph)));
      } else if (ex.level == Level::f) {
        diag += detunings.two_photon;
        if (omega2 != 0.0) {
          const double ph = k2.components.dot(xj);
          const std::size_t to = basis.require_index(with_level(s, slot, Level::e_el));
          add_hermitian(t, to, b, omega2 * Complex(std::cos(ph), std::sin(ph)));
        }
      } else if (ex.level == Level::e_el) {
        diag += detunings.one_photon;
      }
    }
    if (diag != 0.0) t.emplace_back(static_cast<int>(b), static_cast<int>(b), Complex(diag, 0.0));
  }
  return from_triplets(basis.size(), t);
}

SparseOp build_raman_cavity_hamiltonian(const EnsembleGeometry& geom, const Basis& basis, Complex g_eff,
                                        double delta) {
  check_geometry(geom, basis);
  require(basis.options().n_max >= 1, "Raman coupling needs cavity photons in the basis");
  std::vector<Triplet> t;
  for (std::size_t b = 0; b < basis.size(); ++b) {
    const BasisState& s = basis[b];
    if (s.photons != 0 && delta != 0.0)
      t.emplace_back(static_cast<int>(b), static_cast<int>(b), Complex(-delta * s.photons, 0.0));
    if (s.photons + 1 > basis.options().n_max || g_eff == 0.0) continue;
    for (std::size_t slot = 0; slot < s.excitations.size(); ++slot) {
      if (s.excitations[slot].level != Level::m) continue;
      BasisState target = without(s, slot);
      target.photons += 1;
      const std::size_t to = basis.require_index(target);
      add_hermitian(t, to, b, g_eff * std::sqrt(static_cast<double>(target.photons)));
    }
  }
  return from_triplets(basis.size(), t);
}

SparseOp build_cpb_hamiltonian(const Basis& basis, double g_c, double delta_cpb) {
  require(basis.options().include_cpb, "CPB Hamiltonian needs a basis with the CPB");
  std::vector<Triplet> t;
  for (std::size_t b = 0; b < basis.size(); ++b) {
    const BasisState& s = basis[b];
    if (!s.cpb_excited) continue;
    if (delta_cpb != 0.0) t.emplace_back(static_cast<int>(b), static_cast<int>(b), Complex(delta_cpb, 0.0));
    if (g_c == 0.0 || s.photons + 1 > basis.options().n_max) continue;
    BasisState target = s;
    target.cpb_excited = false;
    target.photons += 1;
    const std::size_t to = basis.require_index(target);
    add_hermitian(t, to, b, g_c * std::sqrt(static_cast<double>(target.photons)));
  }
  return from_triplets(basis.size(), t);
}

SparseOp diagonal_operator(const Basis& basis, const std::function<double(const BasisState&)>& f) {
  std::vector<Triplet> t;
  for (std::size_t b = 0; b < basis.size(); ++b) {
    const double v = f(basis[b]);
    if (v != 0.0) t.emplace_back(static_cast<int>(b), static_cast<int>(b), Complex(v, 0.0));
  }
  return from_triplets(basis.size(), t);
}

SparseOp photon_number_operator(const Basis& basis) {
  return diagonal_operator(basis, [](const BasisState& s) { return static_cast<double>(s.photons); });
}

SparseOp cpb_excited_operator(const Basis& basis) {
  return diagonal_operator(basis, [](const BasisState& s) { return s.cpb_excited ? 1.0 : 0.0; });
}

SparseOp level_population_operator(const Basis& basis, Level level) {
  return diagonal_operator(basis, [level](const BasisState& s) {
    double n = 0.0;
    for (const auto& e : s.excitations) n += (e.level == level) ? 1.0 : 0.0;
    return n;
  });
}

CVector collective_state(const EnsembleGeometry& geom, const Basis& basis, int photons, bool cpb_excited,
                         const std::vector<std::pair<Level, WaveVector>>& excitations) {
  check_geometry(geom, basis);
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(basis.size()));
  psi(static_cast<Eigen::Index>(basis.require_index(BasisState{photons, cpb_excited, {}}))) = 1.0;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(geom.size()));
  for (const auto& [level, p] : excitations) {
    require(level != Level::g && basis.has_level(level), "collective excitation level not in basis");
    CVector next = CVector::Zero(psi.size());
    for (Eigen::Index b = 0; b < psi.size(); ++b) {
      if (psi(b) == 0.0) continue;
      const BasisState& s = basis[static_cast<std::size_t>(b)];
      for (std::uint32_t j = 0; j < geom.size(); ++j) {
        if (s.level_of(j)) continue;
        BasisState target = s;
        auto pos = std::lower_bound(target.excitations.begin(), target.excitations.end(), Excitation{j, Level::g});
        target.excitations.insert(pos, Excitation{j, level});
        const double ph = p.components.dot(geom.positions()[j]);
        next(static_cast<Eigen::Index>(basis.require_index(target))) +=
            psi(b) * Complex(std::cos(ph), std::sin(ph)) * inv_sqrt_n;
      }
    }
    psi = std::move(next);
  }
  const double n = psi.norm();
  if (n > 0.0) psi /= n;
  return psi;
}

std::string sparse_to_csv(const SparseOp& op) {
  std::ostringstream os;
  os.precision(17);
  os << "row,col,re,im\n";
  for (Eigen::Index r = 0; r < op.outerSize(); ++r)
    for (SparseOp::InnerIterator it(op, r); it; ++it)
      os << it.row() << "," << it.col() << "," << it.value().real() << "," << it.value().imag() << "\n";
  return os.str();
}

void SystemParams::validate() const {
  for (double v : {g_single, omega_mw, n_ground, g_c, kappa, gamma_cpb, gamma_phi}) {
    require(std::isfinite(v) && v >= 0.0, "system rates must be finite and non-negative");
  }
  require(std::isfinite(Delta) && Delta != 0.0, "Raman detuning Delta must be non-zero");
}

}  // namespace holoreg
