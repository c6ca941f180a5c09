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

#include "holoreg/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "holoreg/dynamics.hpp"
#include "holoreg/pulses.hpp"

namespace holoreg {

namespace {

class Oracle {
 public:
  explicit Oracle(const WalkthroughOptions& opt) : opt_(opt), basis_(make_basis(opt.n_molecules)) {
    require(opt.n_molecules >= 3, "walkthrough needs at least three molecules");
    geom_ = std::make_shared<const EnsembleGeometry>(make_lattice(opt.n_molecules, opt.trap_length));
    const double period = lattice_period_length(*geom_);
    std::vector<WaveVector> modes;
    for (int n = 1; n <= 2; ++n) modes.push_back(WaveVector(geom_->axis() * (kTwoPi * n / period)));
    reg_ = std::make_shared<const ModeRegister>(build_register_from_modes(geom_, modes, 1e-9));
    k1_ = WaveVector(kTwoPi / opt.wavelength, 0.0, 0.0);
    e_el_ = level_population_operator(basis_, Level::e_el);
  }

  std::shared_ptr<const ModeRegister> reg() const { return reg_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis_.size()); }

  CVector vacuum() const {
    CVector psi = CVector::Zero(dim());
    psi(static_cast<Eigen::Index>(basis_.require_index(BasisState{}))) = 1.0;
    return psi;
  }

  CVector embed(const RegisterState& s) {
    CVector out = CVector::Zero(dim());
    for (const auto& [c, a] : s.amplitudes()) {
      auto it = cache_.find(c);
      if (it == cache_.end()) {
        std::vector<std::pair<Level, WaveVector>> ex;
        for (const auto& o : c.occupations) ex.emplace_back(o.level, o.momentum.evaluate(*reg_));
        it = cache_.emplace(c, collective_state(*geom_, basis_, c.photons, false, ex)).first;
      }
      out += a * it->second;
    }
    return out;
  }

  // (alpha + beta c^dag) on the photon-free part; photon residue is dropped.
  void load(CVector& psi, Complex alpha, Complex beta) const {
    CVector out = CVector::Zero(dim());
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      const Complex a = psi(static_cast<Eigen::Index>(i));
      if (a == 0.0 || basis_[i].photons != 0) continue;
      out(static_cast<Eigen::Index>(i)) += alpha * a;
      BasisState up = basis_[i];
      up.photons = 1;
      if (auto k = basis_.index_of(up)) out(static_cast<Eigen::Index>(*k)) += beta * a;
    }
    psi = std::move(out);
  }

  // The optical Hamiltonian is a sum of one-molecule terms, so its exact
  // propagator is the product over molecules of P_j U P_j^dag, with U the
  // single-molecule propagator and P_j the diagonal laser-phase frame. U is
  // built segment by segment to sample the e_el population on the way.
  double stirap(CVector& psi, std::size_t j, StirapDirection dir) const {
    auto spec = StirapSpec::standard(opt_.stirap_window, opt_.stirap_adiabaticity, dir);
    auto sched = std::make_shared<const PulseSchedule>(
        stirap_schedule(spec, 0.0, opt_.stirap_window, opt_.stirap_samples));
    const WaveVector k2 = k1_ - reg_->mode(j);
    const auto single = std::make_shared<const EnsembleGeometry>(make_lattice(1, opt_.trap_length));
    const Basis one = make_basis(1, 0);
    auto h = stirap_hamiltonian(*single, one, sched, WaveVector(), WaveVector());
    std::array<Eigen::Index, 3> local{};  // rows of m, f, e_el in the one-molecule basis
    for (int l = 0; l < 3; ++l)
      local[static_cast<std::size_t>(l)] = static_cast<Eigen::Index>(
          one.require_index(BasisState{0, false, {{0, kLevels[static_cast<std::size_t>(l)]}}}));

    CMatrix u = CMatrix::Identity(static_cast<Eigen::Index>(one.size()), static_cast<Eigen::Index>(one.size()));
    double peak = 0.0;
    const double dt = opt_.stirap_window / static_cast<double>(kSegments);
    for (int seg = 0; seg < kSegments; ++seg) {
      u = propagate(u, h, seg * dt, (seg + 1) * dt).final_state;
      CMatrix u3(3, 3);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) u3(r, c) = u(local[static_cast<std::size_t>(r)], local[static_cast<std::size_t>(c)]);
      const CVector out = apply_product(psi, u3, k2);
      peak = std::max(peak, std::real(out.dot(e_el_ * out)));
      if (seg + 1 == kSegments) psi = out;
    }
    return peak;
  }

  void swap(CVector& psi, SwapDirection dir) const {
    const double g = opt_.collective_rate / std::sqrt(static_cast<double>(opt_.n_molecules));
    const Complex g_eff = dir == SwapDirection::store ? Complex(0.0, -g) : Complex(0.0, g);
    TimeDependentHamiltonian h(dim());
    h.add(build_raman_cavity_hamiltonian(*geom_, basis_, g_eff, 0.0));
    auto r = propagate(psi, h, 0.0, swap_duration(opt_.collective_rate));
    psi = r.final_state.col(0);
  }

 private:
  static constexpr int kSegments = 200;
  static constexpr std::array<Level, 3> kLevels{Level::m, Level::f, Level::e_el};

  static Basis make_basis(int n, int n_max = 1) {
    BasisOptions o;
    o.n_molecules = n;
    o.n_max = n_max;
    o.excitation_cap = 2;
    o.levels = {Level::m, Level::f, Level::e_el};
    return Basis(o);
  }

  // prod_j P_j u3 P_j^dag on every excited molecule; u3 acts on (m, f, e_el)
  // and leaves g alone.
  CVector apply_product(const CVector& psi, const CMatrix& u3, const WaveVector& k2) const {
    CVector out = CVector::Zero(dim());
    std::vector<std::array<Complex, 3>> phase(geom_->size());
    for (std::size_t m = 0; m < geom_->size(); ++m) {
      const Vec3& x = geom_->positions()[m];
      const double a1 = k1_.components.dot(x);
      const double a2 = k2.components.dot(x);
      phase[m] = {std::polar(1.0, -a1), std::polar(1.0, -a2), Complex(1.0)};
    }
    auto slot = [](Level l) { return l == Level::m ? 0 : (l == Level::f ? 1 : 2); };
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      const Complex a = psi(static_cast<Eigen::Index>(i));
      if (a == 0.0) continue;
      const BasisState& s = basis_[i];
      std::vector<std::pair<BasisState, Complex>> terms{{s, a}};
      for (std::size_t e = 0; e < s.excitations.size(); ++e) {
        const auto mol = s.excitations[e].molecule;
        const int c = slot(s.excitations[e].level);
        std::vector<std::pair<BasisState, Complex>> next;
        for (const auto& [t, amp] : terms) {
          for (int r = 0; r < 3; ++r) {
            const Complex w = phase[mol][static_cast<std::size_t>(r)] * u3(r, c) *
                              std::conj(phase[mol][static_cast<std::size_t>(c)]);
            if (w == 0.0) continue;
            BasisState t2 = t;
            t2.excitations[e].level = kLevels[static_cast<std::size_t>(r)];
            next.emplace_back(std::move(t2), amp * w);
          }
        }
        terms = std::move(next);
      }
      for (const auto& [t, amp] : terms) out(static_cast<Eigen::Index>(basis_.require_index(t))) += amp;
    }
    return out;
  }

  const WalkthroughOptions& opt_;
  Basis basis_;
  std::shared_ptr<const EnsembleGeometry> geom_;
  std::shared_ptr<const ModeRegister> reg_;
  WaveVector k1_;
  SparseOp e_el_;
  std::map<RegisterConfig, CVector> cache_;
};

double normalized_infidelity(const CVector& a, const CVector& b) {
  const double na = a.squaredNorm();
  const double nb = b.squaredNorm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  return std::max(0.0, 1.0 - std::norm(a.dot(b)) / (na * nb));
}

}  // namespace

WalkthroughResult run_walkthrough(const WalkthroughOptions& opt) {
  Oracle oracle(opt);
  WalkthroughResult res;
  res.n_molecules = opt.n_molecules;
  CVector psi = oracle.vacuum();
  RegisterState eff = RegisterState::vacuum(oracle.reg());
  const double rate = opt.collective_rate;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  auto record = [&](std::string name, double peak, bool compare) {
    WalkthroughStep st;
    st.name = std::move(name);
    st.peak_e_el = peak;
    st.oracle_norm = psi.norm();
    if (compare) {
      st.infidelity = normalized_infidelity(oracle.embed(eff), psi);
      st.deviation = std::sqrt(st.infidelity);
      res.max_infidelity = std::max(res.max_infidelity, st.infidelity);
      res.max_deviation = std::max(res.max_deviation, st.deviation);
    } else {
      st.infidelity = st.deviation = nan;
    }
    res.peak_e_el = std::max(res.peak_e_el, peak);
    res.steps.push_back(std::move(st));
  };

  auto store = [&](std::size_t j, bool with_shift_back, bool compare) {
    const std::string tag = "q" + std::to_string(j);
    if (with_shift_back) {
      const double p = oracle.stirap(psi, j, StirapDirection::inverted);
      if (compare) eff = shift_back(eff, j);
      record("shift_back " + tag, p, compare);
    }
    oracle.swap(psi, SwapDirection::store);
    if (compare) eff = cavity_mode_swap(eff, SwapDirection::store, swap_duration(rate), rate);
    record("swap store " + tag, 0.0, compare);
    const double p = oracle.stirap(psi, j, StirapDirection::forward);
    if (compare) eff = shift_forward(eff, j);
    record("shift_forward " + tag, p, compare);
  };

  oracle.load(psi, opt.alpha0, opt.beta0);
  eff = eff.with_cavity_qubit(opt.alpha0, opt.beta0);
  record("load q0", 0.0, true);
  store(0, true, true);

  oracle.load(psi, opt.alpha1, opt.beta1);
  eff = eff.with_cavity_qubit(opt.alpha1, opt.beta1);
  record("load q1", 0.0, true);

  if (opt.naive) {
    store(1, false, false);
    eff = RegisterState::product(oracle.reg(), {{0, {opt.alpha0, opt.beta0}}, {1, {opt.alpha1, opt.beta1}}});
    res.steps.back().infidelity = normalized_infidelity(oracle.embed(eff), psi);
    res.steps.back().deviation = std::sqrt(res.steps.back().infidelity);
    return res;
  }
  store(1, true, true);

  const double p0 = oracle.stirap(psi, 0, StirapDirection::inverted);
  eff = shift_back(eff, 0);
  record("shift_back q0", p0, true);
  oracle.swap(psi, SwapDirection::retrieve);
  eff = cavity_mode_swap(eff, SwapDirection::retrieve, swap_duration(rate), rate);
  record("swap retrieve q0", 0.0, true);
  const double p1 = oracle.stirap(psi, 0, StirapDirection::forward);
  eff = shift_forward(eff, 0);
  record("shift_forward q0", p1, true);
  return res;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "log-log fit needs positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace holoreg
