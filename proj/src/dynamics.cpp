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


#include "holoreg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace holoreg {

void TimeDependentHamiltonian::add(SparseOp op, Coefficient coefficient, std::string name) {
  require(op.rows() == dim_ && op.cols() == dim_, "Hamiltonian term has the wrong dimension");
  terms_.push_back({std::move(op), std::move(coefficient), std::move(name)});
}

void TimeDependentHamiltonian::add_breakpoints(const std::vector<double>& times) {
  breakpoints_.insert(breakpoints_.end(), times.begin(), times.end());
  std::sort(breakpoints_.begin(), breakpoints_.end());
  breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
}

SparseOp TimeDependentHamiltonian::at(double t) const {
  SparseOp sum(dim_, dim_);
  for (const auto& term : terms_) {
    const double c = term.at(t);
    if (c != 0.0) sum += Complex(c, 0.0) * term.op;
  }
  return sum;
}

void TimeDependentHamiltonian::apply(double t, const CMatrix& in, CMatrix& out) const {
  out.setZero(in.rows(), in.cols());
  for (const auto& term : terms_) {
    const double c = term.at(t);
    if (c != 0.0) out.noalias() += Complex(c, 0.0) * (term.op * in);
  }
}

namespace {

double row_sum_norm(const SparseOp& op) {
  double best = 0.0;
  for (Eigen::Index r = 0; r < op.outerSize(); ++r) {
    double s = 0.0;
    for (SparseOp::InnerIterator it(op, r); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

double TimeDependentHamiltonian::norm_bound(double t0, double t1, std::size_t n) const {
  std::vector<double> times;
  for (std::size_t i = 0; i < n; ++i) times.push_back(t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1));
  for (double b : breakpoints_)
    if (b >= t0 && b <= t1) times.push_back(b);
  double best = 0.0;
  std::vector<double> norms;
  for (const auto& term : terms_) norms.push_back(row_sum_norm(term.op));
  for (double t : times) {
    double s = 0.0;
    for (std::size_t k = 0; k < terms_.size(); ++k) s += std::abs(terms_[k].at(t)) * norms[k];
    best = std::max(best, s);
  }
  return best;
}

Coefficient schedule_channel(std::shared_ptr<const PulseSchedule> schedule, const std::string& channel,
                             double scale) {
  require(schedule != nullptr && schedule->has_channel(channel), "schedule lacks channel '" + channel + "'");
  return [schedule = std::move(schedule), channel, scale](double t) { return scale * schedule->value(channel, t); };
}

std::vector<std::vector<Eigen::Index>> coupled_blocks(const TimeDependentHamiltonian& h) {
  const Eigen::Index n = h.dim();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (const auto& term : h.terms()) {
    for (Eigen::Index r = 0; r < term.op.outerSize(); ++r) {
      for (SparseOp::InnerIterator it(term.op, r); it; ++it) {
        const Eigen::Index a = find(it.row());
        const Eigen::Index b = find(it.col());
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }
    }
  }
  std::map<Eigen::Index, std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<Eigen::Index>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

namespace {

struct DenseBlock {
  std::vector<Eigen::Index> index;
  std::vector<CMatrix> terms;  // restriction of each term
};

std::vector<DenseBlock> make_dense_blocks(const TimeDependentHamiltonian& h) {
  std::vector<DenseBlock> blocks;
  for (auto& members : coupled_blocks(h)) {
    DenseBlock b;
    b.index = std::move(members);
    const auto m = static_cast<Eigen::Index>(b.index.size());
    std::map<Eigen::Index, Eigen::Index> local;
    for (Eigen::Index i = 0; i < m; ++i) local[b.index[static_cast<std::size_t>(i)]] = i;
    for (const auto& term : h.terms()) {
      CMatrix d = CMatrix::Zero(m, m);
      for (Eigen::Index gi : b.index) {
        for (SparseOp::InnerIterator it(term.op, gi); it; ++it) d(local.at(it.row()), local.at(it.col())) = it.value();
      }
      b.terms.push_back(std::move(d));
    }
    blocks.push_back(std::move(b));
  }
  return blocks;
}

// exp(-i M) for Hermitian M.
CMatrix expm_hermitian(const CMatrix& m) {
  const Eigen::Index n = m.rows();
  if (n == 1) {
    CMatrix u(1, 1);
    const double a = m(0, 0).real();
    u(0, 0) = Complex(std::cos(a), -std::sin(a));
    return u;
  }
  if (n == 2) {
    const double a = 0.5 * (m(0, 0).real() + m(1, 1).real());
    const double bz = 0.5 * (m(0, 0).real() - m(1, 1).real());
    const Complex off = m(0, 1);
    const double r = std::sqrt(bz * bz + std::norm(off));
    const double sinc = r > 1e-8 ? std::sin(r) / r : 1.0 - r * r / 6.0;
    const Complex phase(std::cos(a), -std::sin(a));
    CMatrix u(2, 2);
    u(0, 0) = phase * Complex(std::cos(r), -sinc * bz);
    u(1, 1) = phase * Complex(std::cos(r), sinc * bz);
    u(0, 1) = phase * (-kI * sinc * off);
    u(1, 0) = phase * (-kI * sinc * std::conj(off));
    return u;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  const auto& w = es.eigenvalues();
  CVector ph(n);
  for (Eigen::Index i = 0; i < n; ++i) ph(i) = Complex(std::cos(w(i)), -std::sin(w(i)));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

struct Partition {
  std::vector<double> nodes;  // step boundaries
};

Partition make_partition(const TimeDependentHamiltonian& h, double t0, double t1, double max_step,
                         std::size_t min_steps) {
  std::vector<double> knots{t0};
  for (double b : h.breakpoints())
    if (b > t0 && b < t1) knots.push_back(b);
  knots.push_back(t1);
  const double span = t1 - t0;
  const double step = std::min(max_step, span / static_cast<double>(min_steps));
  Partition p;
  p.nodes.push_back(t0);
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double len = knots[k + 1] - knots[k];
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / step - 1e-9)));
    for (std::size_t i = 1; i <= n; ++i)
      p.nodes.push_back(i == n ? knots[k + 1] : knots[k] + len * static_cast<double>(i) / static_cast<double>(n));
  }
  return p;
}

Partition refine(const Partition& p) {
  Partition out;
  out.nodes.reserve(2 * p.nodes.size());
  out.nodes.push_back(p.nodes.front());
  for (std::size_t i = 1; i < p.nodes.size(); ++i) {
    out.nodes.push_back(0.5 * (p.nodes[i - 1] + p.nodes[i]));
    out.nodes.push_back(p.nodes[i]);
  }
  return out;
}

double expectation(const SparseOp& op, const CMatrix& psi) {
  if (psi.cols() == 0) return 0.0;
  const CMatrix opsi = op * psi;
  double s = 0.0;
  for (Eigen::Index c = 0; c < psi.cols(); ++c) s += psi.col(c).dot(opsi.col(c)).real();
  return s / static_cast<double>(psi.cols());
}

class Runner {
 public:
  Runner(const TimeDependentHamiltonian& h, const PropagationOptions& o, bool magnus)
      : h_(h), o_(o), magnus_(magnus) {
    if (magnus_) blocks_ = make_dense_blocks(h_);
  }

  PropagationResult run(const CMatrix& psi0, const Partition& p, bool record) const {
    PropagationResult r;
    CMatrix psi = psi0;
    auto sample = [&](double t, std::size_t step) {
      if (!record || o_.trace_stride == 0 || step % o_.trace_stride != 0) return;
      r.trace_times.push_back(t);
      for (const auto& obs : o_.observables) r.traces[obs.name].push_back(expectation(obs.op, psi));
    };
    double prev_n = o_.photon_number ? expectation(*o_.photon_number, psi) : 0.0;
    double prev_e = o_.cpb_excited ? expectation(*o_.cpb_excited, psi) : 0.0;
    sample(p.nodes.front(), 0);
    const std::size_t steps = p.nodes.size() - 1;
    for (std::size_t i = 0; i < steps; ++i) {
      const double ta = p.nodes[i];
      const double tb = p.nodes[i + 1];
      if (magnus_) magnus_step(psi, ta, tb);
      else rk4_step(psi, ta, tb);
      if (record) {
        if (o_.photon_number) {
          const double n = expectation(*o_.photon_number, psi);
          r.cavity_occupancy_integral += 0.5 * (prev_n + n) * (tb - ta);
          prev_n = n;
        }
        if (o_.cpb_excited) {
          const double e = expectation(*o_.cpb_excited, psi);
          r.cpb_occupancy_integral += 0.5 * (prev_e + e) * (tb - ta);
          prev_e = e;
        }
        const bool last = i + 1 == steps;
        if (last && o_.trace_stride != 0 && (i + 1) % o_.trace_stride != 0) {
          r.trace_times.push_back(tb);
          for (const auto& obs : o_.observables) r.traces[obs.name].push_back(expectation(obs.op, psi));
        } else {
          sample(tb, i + 1);
        }
      }
    }
    r.steps = steps;
    double drift = 0.0;
    for (Eigen::Index c = 0; c < psi.cols(); ++c)
      drift = std::max(drift, std::abs(psi.col(c).squaredNorm() - psi0.col(c).squaredNorm()));
    r.norm_drift = drift;
    r.final_state = std::move(psi);
    return r;
  }

 private:
  void rk4_step(CMatrix& psi, double ta, double tb) const {
    const double dt = tb - ta;
    const Complex mi(0.0, -1.0);
    CMatrix k1, k2, k3, k4, tmp;
    h_.apply(ta, psi, k1);
    k1 *= mi;
    tmp = psi + (0.5 * dt) * k1;
    h_.apply(ta + 0.5 * dt, tmp, k2);
    k2 *= mi;
    tmp = psi + (0.5 * dt) * k2;
    h_.apply(ta + 0.5 * dt, tmp, k3);
    k3 *= mi;
    tmp = psi + dt * k3;
    h_.apply(tb, tmp, k4);
    k4 *= mi;
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  void magnus_step(CMatrix& psi, double ta, double tb) const {
    const double dt = tb - ta;
    const double c = std::sqrt(3.0) / 6.0;
    const double t1 = ta + (0.5 - c) * dt;
    const double t2 = ta + (0.5 + c) * dt;
    std::vector<double> c1, c2;
    c1.reserve(h_.terms().size());
    c2.reserve(h_.terms().size());
    for (const auto& term : h_.terms()) {
      c1.push_back(term.at(t1));
      c2.push_back(term.at(t2));
    }
    for (const auto& b : blocks_) {
      const auto m = static_cast<Eigen::Index>(b.index.size());
      CMatrix h1 = CMatrix::Zero(m, m);
      CMatrix h2 = CMatrix::Zero(m, m);
      for (std::size_t k = 0; k < b.terms.size(); ++k) {
        if (c1[k] != 0.0) h1 += c1[k] * b.terms[k];
        if (c2[k] != 0.0) h2 += c2[k] * b.terms[k];
      }
      // i * Omega_4 = dt/2 (H1 + H2) - i sqrt(3)/12 dt^2 [H2, H1]
      CMatrix mgen = (0.5 * dt) * (h1 + h2);
      if (m > 1) mgen -= Complex(0.0, std::sqrt(3.0) / 12.0 * dt * dt) * (h2 * h1 - h1 * h2);
      const CMatrix u = expm_hermitian(mgen);
      if (m == 1) {
        psi.row(b.index[0]) *= u(0, 0);
        continue;
      }
      CMatrix rows(m, psi.cols());
      for (Eigen::Index i = 0; i < m; ++i) rows.row(i) = psi.row(b.index[static_cast<std::size_t>(i)]);
      rows = u * rows;
      for (Eigen::Index i = 0; i < m; ++i) psi.row(b.index[static_cast<std::size_t>(i)]) = rows.row(i);
    }
  }

  const TimeDependentHamiltonian& h_;
  const PropagationOptions& o_;
  bool magnus_;
  std::vector<DenseBlock> blocks_;
};

}  // namespace

PropagationResult propagate(const CMatrix& psi0, const TimeDependentHamiltonian& h, double t0, double t1,
                            const PropagationOptions& options) {
  require(psi0.rows() == h.dim(), "state dimension does not match the Hamiltonian");
  require(t1 >= t0, "propagation needs t1 >= t0");
  for (Eigen::Index c = 0; c < psi0.cols(); ++c)
    require(std::abs(psi0.col(c).norm() - 1.0) < 1e-6, "initial state must be normalized");
  if (t1 == t0) {
    PropagationResult r;
    r.final_state = psi0;
    return r;
  }

  bool magnus = options.integrator == Integrator::magnus4;
  if (options.integrator == Integrator::automatic) {
    std::size_t largest = 0;
    for (const auto& b : coupled_blocks(h)) largest = std::max(largest, b.size());
    magnus = largest <= options.max_block_for_magnus;
  }
  const double hnorm = h.norm_bound(t0, t1);
  double step = options.max_step > 0.0 ? options.max_step : (t1 - t0);
  if (options.max_step <= 0.0 && hnorm > 0.0) step = std::min(step, (magnus ? 0.5 : 0.01) / hnorm);

  Runner runner(h, options, magnus);
  Partition p = make_partition(h, t0, t1, step, options.min_steps);
  if (!options.check_convergence) return runner.run(psi0, p, true);

  PropagationResult coarse = runner.run(psi0, p, false);
  for (int level = 0; level < options.max_refinements; ++level) {
    Partition fine = refine(p);
    PropagationResult r = runner.run(psi0, fine, true);
    const double change = (r.final_state - coarse.final_state).norm();
    if (change < options.tolerance) {
      r.refinement_change = change;
      if (r.norm_drift > 1e-8) {
        std::ostringstream os;
        os << "norm drift " << r.norm_drift << " exceeds 1e-8 after " << r.steps << " steps";
        throw IntegrationError(os.str());
      }
      return r;
    }
    coarse = std::move(r);
    p = std::move(fine);
  }
  std::ostringstream os;
  os << "step refinement did not converge to " << options.tolerance << " within " << options.max_refinements
     << " halvings (" << p.nodes.size() - 1 << " steps, ||H|| <= " << hnorm << ")";
  throw IntegrationError(os.str());
}

double loss_probability(const PropagationResult& result, const LossRates& rates) {
  return rates.kappa * result.cavity_occupancy_integral + rates.gamma_cpb * result.cpb_occupancy_integral;
}

namespace {

// Least-squares residual of y ~ a + b cos(wt) + c sin(wt).
double cosine_residual(const std::vector<double>& t, const std::vector<double>& y, double w) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d aty = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Eigen::Vector3d row(1.0, std::cos(w * t[i]), std::sin(w * t[i]));
    ata += row * row.transpose();
    aty += row * y[i];
  }
  const Eigen::Vector3d coef = ata.ldlt().solve(aty);
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double model = coef(0) + coef(1) * std::cos(w * t[i]) + coef(2) * std::sin(w * t[i]);
    ss += (y[i] - model) * (y[i] - model);
  }
  return std::sqrt(ss / static_cast<double>(t.size()));
}

}  // namespace

RabiFit fit_exchange_frequency(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 8) throw FitError("need at least 8 matching samples to fit");
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  std::vector<double> crossings;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double a = y[i - 1] - mean;
    const double b = y[i] - mean;
    if ((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)) crossings.push_back(t[i - 1] + (t[i] - t[i - 1]) * a / (a - b));
  }
  if (crossings.size() < 3) throw FitError("fewer than three mean crossings; trace too short to fit");
  const double half_period = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
  const double w0 = kPi / half_period;

  // Golden-section search on a narrow bracket around the crossing estimate.
  double lo = 0.97 * w0;
  double hi = 1.03 * w0;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = cosine_residual(t, y, x1);
  double f2 = cosine_residual(t, y, x2);
  for (int it = 0; it < 200 && (hi - lo) > 1e-14 * w0; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = cosine_residual(t, y, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = cosine_residual(t, y, x2);
    }
  }
  const double w = 0.5 * (lo + hi);
  RabiFit fit{0.5 * w, cosine_residual(t, y, w)};
  if (!(fit.residual < 1e-3)) {
    std::ostringstream os;
    os << "cosine fit residual " << fit.residual << " too large";
    throw FitError(os.str());
  }
  return fit;
}

double collective_rabi_frequency(const EnsembleGeometry& geom, double g_eff) {
  require(g_eff > 0.0, "g_eff must be positive");
  BasisOptions bo;
  bo.n_molecules = static_cast<int>(geom.size());
  bo.n_max = 1;
  bo.excitation_cap = 1;
  bo.levels = {Level::m};
  const Basis basis(bo);
  TimeDependentHamiltonian h(static_cast<Eigen::Index>(basis.size()));
  h.add(build_raman_cavity_hamiltonian(geom, basis, g_eff, 0.0));

  CMatrix psi = CMatrix::Zero(static_cast<Eigen::Index>(basis.size()), 1);
  psi(static_cast<Eigen::Index>(basis.require_index(BasisState{1, false, {}})), 0) = 1.0;

  const double guess = std::sqrt(static_cast<double>(geom.size())) * g_eff;
  const double t_end = 4.0 * kPi / guess;
  PropagationOptions o;
  o.integrator = Integrator::magnus4;
  o.check_convergence = false;
  o.max_step = t_end / 2000.0;
  o.trace_stride = 1;
  o.observables.push_back({"photons", photon_number_operator(basis)});
  const auto r = propagate(psi, h, 0.0, t_end, o);
  return fit_exchange_frequency(r.trace_times, r.traces.at("photons")).frequency;
}

TimeDependentHamiltonian stirap_hamiltonian(const EnsembleGeometry& geom, const Basis& basis,
                                            std::shared_ptr<const PulseSchedule> schedule, const WaveVector& k1,
                                            const WaveVector& k2, const StorageDetunings& detunings) {
  require(schedule != nullptr, "stirap_hamiltonian needs a schedule");
  TimeDependentHamiltonian h(static_cast<Eigen::Index>(basis.size()));
  h.add(build_optical_storage_hamiltonian(geom, basis, -1.0, k1, 0.0, k2),
        schedule_channel(schedule, channel::kOmega1), "pump");
  h.add(build_optical_storage_hamiltonian(geom, basis, 0.0, k1, 1.0, k2),
        schedule_channel(schedule, channel::kOmega2), "stokes");
  if (detunings.one_photon != 0.0 || detunings.two_photon != 0.0) {
    h.add(build_optical_storage_hamiltonian(geom, basis, 0.0, k1, 0.0, k2, detunings), {}, "detuning");
  }
  h.add_breakpoints(schedule->t_grid());
  return h;
}

StirapTransfer measure_stirap(double window, double adiabaticity, std::size_t n_samples) {
  require(window > 0.0 && adiabaticity > 0.0, "STIRAP needs a positive window and adiabaticity");
  BasisOptions bo;
  bo.n_molecules = 1;
  bo.n_max = 0;
  bo.excitation_cap = 1;
  bo.levels = {Level::m, Level::f, Level::e_el};
  const Basis basis(bo);
  const auto geom = make_lattice(1, 1e-3);
  const auto im = static_cast<Eigen::Index>(basis.require_index(BasisState{0, false, {{0, Level::m}}}));
  const auto iff = static_cast<Eigen::Index>(basis.require_index(BasisState{0, false, {{0, Level::f}}}));
  PropagationOptions o;
  o.trace_stride = 1;
  o.observables.push_back({"e_el", level_population_operator(basis, Level::e_el)});
  o.observables.push_back({"m", level_population_operator(basis, Level::m)});
  o.observables.push_back({"f", level_population_operator(basis, Level::f)});
  StirapTransfer out;
  auto run = [&](StirapDirection dir, const CMatrix& psi0, double& peak) {
    auto sched = std::make_shared<const PulseSchedule>(
        stirap_schedule(StirapSpec::standard(window, adiabaticity, dir), 0.0, window, n_samples));
    auto h = stirap_hamiltonian(geom, basis, sched, WaveVector(), WaveVector());
    auto r = propagate(psi0, h, 0.0, window, o);
    const auto& tr = r.traces.at("e_el");
    peak = *std::max_element(tr.begin(), tr.end());
    if (dir == StirapDirection::forward) {
      out.times = r.trace_times;
      out.p_m = r.traces.at("m");
      out.p_f = r.traces.at("f");
      out.p_e_el = tr;
    }
    return r.final_state;
  };
  out.window = window;
  out.adiabaticity = adiabaticity;
  CMatrix psi = CMatrix::Zero(static_cast<Eigen::Index>(basis.size()), 1);
  psi(im, 0) = 1.0;
  const CMatrix fwd = run(StirapDirection::forward, psi, out.peak_e_el);
  out.efficiency = std::norm(fwd(iff, 0));
  const CMatrix back = run(StirapDirection::inverted, fwd, out.peak_e_el_return);
  out.return_error = 1.0 - std::norm(back(im, 0));
  return out;
}

}  // namespace holoreg
