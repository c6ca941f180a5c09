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

#include "holoreg/gates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace holoreg {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

CMatrix computational_columns(const Basis& b) {
  CMatrix psi = CMatrix::Zero(static_cast<Eigen::Index>(b.size()), 4);
  for (int c = 0; c < 4; ++c)
    psi(static_cast<Eigen::Index>(b.require_index(computational_states()[static_cast<std::size_t>(c)])), c) = 1.0;
  return psi;
}

std::array<Eigen::Index, 4> computational_rows(const Basis& b) {
  std::array<Eigen::Index, 4> rows{};
  for (std::size_t c = 0; c < 4; ++c) rows[c] = static_cast<Eigen::Index>(b.require_index(computational_states()[c]));
  return rows;
}

void check_endpoints(const PulseSchedule& schedule, double g_c) {
  require(schedule.has_channel(channel::kDeltaCpb), "gate schedule needs a delta_cpb channel");
  if (g_c <= 0.0) return;
  const auto& d = schedule.samples(channel::kDeltaCpb);
  for (double end : {d.front(), d.back()}) {
    if (std::abs(end) / g_c < kMinEndpointRatio) {
      std::ostringstream os;
      os << "schedule endpoint |delta_cpb|/g_c = " << std::abs(end) / g_c << " is below " << kMinEndpointRatio;
      throw AdiabaticityContractError(os.str());
    }
  }
}

// Distance from the origin to the convex hull of pts, 0 if inside.
double hull_distance(std::vector<Complex> pts) {
  auto cross = [](Complex o, Complex a, Complex b) {
    return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
  };
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() == 1) return std::abs(pts[0]);
  std::vector<Complex> hull;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t base = hull.size();
    for (const Complex& p : pts) {
      while (hull.size() >= base + 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0) hull.pop_back();
      hull.push_back(p);
    }
    hull.pop_back();
    std::reverse(pts.begin(), pts.end());
  }
  auto seg_dist = [](Complex a, Complex b) {
    const Complex ab = b - a;
    const double len2 = std::norm(ab);
    double t = len2 > 0.0 ? -(std::conj(ab) * a).real() / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(a + t * ab);
  };
  double best = std::abs(hull[0]);
  bool inside = hull.size() >= 3;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Complex a = hull[i];
    const Complex b = hull[(i + 1) % hull.size()];
    best = std::min(best, seg_dist(a, b));
    if (cross(a, b, Complex(0.0)) < 0.0) inside = false;
  }
  return inside ? 0.0 : best;
}

FidelityBreakdown breakdown(const CMatrix& corrected, const CMatrix& target) {
  const CMatrix m = target.adjoint() * corrected;
  const double d = static_cast<double>(m.rows());
  FidelityBreakdown f;
  const Complex tr = m.trace();
  f.process = std::norm(tr) / (d * d);
  f.average = ((m * m.adjoint()).trace().real() + std::norm(tr)) / (d * (d + 1.0));
  const double r = eigenvalue_hull_distance(m);
  f.worst_case_infidelity = std::max(0.0, 1.0 - r * r);
  f.corrected = corrected;
  return f;
}

SparseOp cpb_flip(const Basis& b, RotationAxis axis) {
  std::vector<Eigen::Triplet<Complex>> trips;
  for (std::size_t i = 0; i < b.size(); ++i) {
    BasisState s = b[i];
    const bool excited = s.cpb_excited;
    s.cpb_excited = !excited;
    auto j = b.index_of(s);
    if (!j) continue;
    // <target| sigma |source>: sigma_x = |e><g| + |g><e|, sigma_y = i|e><g| - i|g><e|
    const Complex v = axis == RotationAxis::x ? Complex(1.0) : (excited ? Complex(0.0, -1.0) : Complex(0.0, 1.0));
    trips.emplace_back(static_cast<int>(*j), static_cast<int>(i), v);
  }
  SparseOp op(static_cast<Eigen::Index>(b.size()), static_cast<Eigen::Index>(b.size()));
  op.setFromTriplets(trips.begin(), trips.end());
  return op;
}

GateReport run_sweep_gate(const PulseSchedule& schedule, const SystemParams& params, const GateSettings& settings,
                          const std::string& name, const CMatrix& ideal) {
  check_endpoints(schedule, params.g_c);
  const Basis b = gate_basis();
  auto sched = std::make_shared<const PulseSchedule>(schedule);
  TimeDependentHamiltonian h(static_cast<Eigen::Index>(b.size()));
  h.add(build_cpb_hamiltonian(b, params.g_c, 0.0), {}, "jc");
  h.add(cpb_excited_operator(b), schedule_channel(sched, channel::kDeltaCpb), "delta_cpb");
  h.add_breakpoints(schedule.t_grid());

  PropagationOptions po;
  po.tolerance = settings.tolerance;
  po.check_convergence = settings.check_convergence;
  po.max_step = settings.max_step;
  po.photon_number = photon_number_operator(b);
  po.cpb_excited = cpb_excited_operator(b);
  const auto r = propagate(computational_columns(b), h, schedule.t0(), schedule.t1(), po);

  GateReport rep;
  rep.target = name;
  rep.ideal = ideal;
  rep.duration = schedule.duration();
  rep.achieved = CMatrix(4, 4);
  const auto rows = computational_rows(b);
  for (int i = 0; i < 4; ++i)
    for (int c = 0; c < 4; ++c) rep.achieved(i, c) = r.final_state(rows[static_cast<std::size_t>(i)], c);
  double kept = 0.0;
  for (int c = 0; c < 4; ++c) kept += rep.achieved.col(c).squaredNorm();
  rep.leakage = std::max(0.0, 1.0 - kept / 4.0);
  rep.fidelity = local_z_fidelity(rep.achieved, ideal);
  rep.infidelity = std::max(0.0, 1.0 - rep.fidelity.average);
  rep.loss_estimate = loss_probability(r, {params.kappa, params.gamma_cpb});
  if (rep.leakage > settings.leakage_warning) {
    std::ostringstream os;
    os << "leakage to |g,2> is " << rep.leakage;
    rep.warnings.push_back(os.str());
  }
  return rep;
}

}  // namespace

Basis gate_basis() {
  BasisOptions o;
  o.n_molecules = 1;
  o.n_max = 2;
  o.excitation_cap = 2;
  o.include_cpb = true;
  o.levels = {};
  return Basis(o);
}

const std::array<BasisState, 4>& computational_states() {
  static const std::array<BasisState, 4> states{BasisState{0, false, {}}, BasisState{1, false, {}},
                                                BasisState{0, true, {}}, BasisState{1, true, {}}};
  return states;
}

CMatrix ideal_swap() {
  CMatrix v = CMatrix::Zero(4, 4);
  v(0, 0) = v(3, 3) = 1.0;
  v(2, 1) = v(1, 2) = 1.0;
  return v;
}

CMatrix ideal_cz() {
  CMatrix v = CMatrix::Identity(4, 4);
  v(3, 3) = -1.0;
  return v;
}

RotationAxis axis_from_string(const std::string& s) {
  if (s == "x") return RotationAxis::x;
  if (s == "y") return RotationAxis::y;
  if (s == "z") return RotationAxis::z;
  throw InvalidArgument("unknown rotation axis '" + s + "'");
}

const char* to_string(RotationAxis axis) {
  switch (axis) {
    case RotationAxis::x: return "x";
    case RotationAxis::y: return "y";
    case RotationAxis::z: return "z";
  }
  return "?";
}

CMatrix rotation_matrix(RotationAxis axis, double angle) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  CMatrix r(2, 2);
  switch (axis) {
    case RotationAxis::x: r << c, Complex(0, -s), Complex(0, -s), c; break;
    case RotationAxis::y: r << c, -s, s, c; break;
    case RotationAxis::z: r << std::polar(1.0, -0.5 * angle), 0.0, 0.0, std::polar(1.0, 0.5 * angle); break;
  }
  return r;
}

CMatrix LocalZ::matrix() const {
  CMatrix d = CMatrix::Zero(4, 4);
  d(0, 0) = 1.0;
  d(1, 1) = std::polar(1.0, beta);
  d(2, 2) = std::polar(1.0, alpha);
  d(3, 3) = std::polar(1.0, alpha + beta);
  return d;
}

double eigenvalue_hull_distance(const CMatrix& m) {
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return hull_distance(std::move(ev));
}

FidelityBreakdown gate_fidelity(const CMatrix& u, const CMatrix& target) {
  require(u.rows() == target.rows() && u.cols() == target.cols() && u.rows() == u.cols(),
          "gate and target must be square and of equal size");
  return breakdown(u, target);
}

FidelityBreakdown local_z_fidelity(const CMatrix& u, const CMatrix& target) {
  require(u.rows() == 4 && u.cols() == 4 && target.rows() == 4 && target.cols() == 4,
          "local-Z correction acts on 4x4 gates");
  // Tr(V^dag D U) = sum_k D_k w_k with w = diag(U V^dag); maximize its modulus
  // by alternating exact updates of beta and alpha from several starts.
  const CMatrix uv = u * target.adjoint();
  const std::array<Complex, 4> w{uv(0, 0), uv(1, 1), uv(2, 2), uv(3, 3)};
  LocalZ best;
  double best_val = -1.0;
  for (int start = 0; start < 4; ++start) {
    double alpha = start * kPi / 2.0;
    double beta = 0.0;
    for (int it = 0; it < 200; ++it) {
      const Complex ea = std::polar(1.0, alpha);
      const Complex a = w[0] + ea * w[2];
      const Complex b = w[1] + ea * w[3];
      const double new_beta = (std::abs(b) > 0.0 && std::abs(a) > 0.0) ? std::arg(a) - std::arg(b) : beta;
      const Complex eb = std::polar(1.0, new_beta);
      const Complex c = w[0] + eb * w[1];
      const Complex d = w[2] + eb * w[3];
      const double new_alpha = (std::abs(c) > 0.0 && std::abs(d) > 0.0) ? std::arg(c) - std::arg(d) : alpha;
      const bool done = std::abs(wrap_phase(new_alpha - alpha)) < 1e-15 && std::abs(wrap_phase(new_beta - beta)) < 1e-15;
      alpha = new_alpha;
      beta = new_beta;
      if (done) break;
    }
    const double val = std::abs(w[0] + std::polar(1.0, beta) * w[1] + std::polar(1.0, alpha) * w[2] +
                                std::polar(1.0, alpha + beta) * w[3]);
    if (val > best_val) {
      best_val = val;
      best = LocalZ{wrap_phase(alpha), wrap_phase(beta)};
    }
  }
  FidelityBreakdown f = breakdown(best.matrix() * u, target);
  f.correction = best;
  return f;
}

double wrap_phase(double phi) {
  double r = std::remainder(phi, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

double conditional_phase(const CMatrix& u) {
  require(u.rows() == 4 && u.cols() == 4, "conditional phase needs a 4x4 gate");
  return wrap_phase(std::arg(u(3, 3)) - std::arg(u(2, 2)) - std::arg(u(1, 1)) + std::arg(u(0, 0)));
}

GateReport run_swap(const PulseSchedule& schedule, const SystemParams& params, const GateSettings& settings) {
  return run_sweep_gate(schedule, params, settings, "swap", ideal_swap());
}

GateReport run_cphase(const PulseSchedule& schedule, const SystemParams& params, const GateSettings& settings) {
  GateReport rep = run_sweep_gate(schedule, params, settings, "cphase", ideal_cz());
  rep.conditional_phase = conditional_phase(rep.achieved);
  for (int c = 0; c < 4; ++c)
    rep.population_loss = std::max(rep.population_loss, 1.0 - std::norm(rep.achieved(c, c)));
  if (rep.population_loss > 1e-3) {
    std::ostringstream os;
    os << "diagonal population loss " << rep.population_loss << " breaks adiabaticity";
    rep.warnings.push_back(os.str());
  }
  return rep;
}

double adiabatic_conditional_phase(const PulseSchedule& schedule, double g_c) {
  require(schedule.has_channel(channel::kDeltaCpb), "schedule needs a delta_cpb channel");
  const auto& t = schedule.t_grid();
  const auto& d = schedule.samples(channel::kDeltaCpb);
  auto rate = [g_c](double delta) { return 0.5 * (std::sqrt(delta * delta + 8.0 * g_c * g_c) - delta); };
  // Simpson on each linear segment
  double phase = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double h = t[i + 1] - t[i];
    phase += h / 6.0 * (rate(d[i]) + 4.0 * rate(0.5 * (d[i] + d[i + 1])) + rate(d[i + 1]));
  }
  return -phase;
}

PulseSchedule default_swap_schedule(const SystemParams& params, double duration, double far_ratio,
                                    std::size_t n_samples) {
  return sweep_schedule({SweepShape::swap, far_ratio * params.g_c, duration, params.g_c}, n_samples);
}

PulseSchedule default_cphase_schedule(const SystemParams& params, double duration, double far_ratio,
                                      std::size_t n_samples) {
  const double far = far_ratio * params.g_c;
  auto make = [&](double near) {
    SweepSpec s{SweepShape::cphase, far, duration, params.g_c};
    s.delta_near = near;
    return sweep_schedule(s, n_samples);
  };
  auto phase = [&](double near) { return -adiabatic_conditional_phase(make(near), params.g_c); };
  double lo = 0.0;
  double hi = far * (1.0 - 1e-9);
  // nearest odd multiple of pi at or above what idling alone accumulates
  const double floor_phase = phase(hi);
  const double target = kPi * (2.0 * std::ceil((floor_phase / kPi - 1.0) / 2.0) + 1.0);
  if (phase(lo) < target) {
    throw AdiabaticityContractError("cphase sweep too short to reach a pi conditional phase");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * far; ++it) {
    const double mid = 0.5 * (lo + hi);
    (phase(mid) > target ? lo : hi) = mid;
  }
  return make(0.5 * (lo + hi));
}

GateReport cpb_rotation(RotationAxis axis, double angle, const SystemParams& params,
                        const RotationSettings& settings) {
  GateReport rep;
  rep.target = std::string("r") + to_string(axis);
  rep.ideal = rotation_matrix(axis, angle);
  if (axis == RotationAxis::z || angle == 0.0) {
    rep.achieved = rep.ideal;
    rep.fidelity = gate_fidelity(rep.achieved, rep.ideal);
    return rep;
  }
  const double g = params.g_c;
  const double delta = settings.idle_ratio * g;
  const double rabi = settings.rabi > 0.0 ? settings.rabi : 0.5 * g;
  const double drive = 0.5 * (delta + std::sqrt(delta * delta + 4.0 * g * g));
  const Basis b = gate_basis();
  const SparseOp n_exc = photon_number_operator(b) + cpb_excited_operator(b);
  // frame rotating at the drive frequency for both CPB and cavity; the
  // sign of the drive carries negative angles
  const double sign = angle < 0.0 ? -1.0 : 1.0;
  TimeDependentHamiltonian h(static_cast<Eigen::Index>(b.size()));
  h.add(build_cpb_hamiltonian(b, g, delta) - drive * n_exc, {}, "jc_frame");
  h.add(0.5 * rabi * sign * cpb_flip(b, axis), {}, "drive");
  rep.duration = std::abs(angle) / rabi;

  PropagationOptions po;
  po.tolerance = settings.gate.tolerance;
  po.check_convergence = settings.gate.check_convergence;
  po.photon_number = photon_number_operator(b);
  po.cpb_excited = cpb_excited_operator(b);
  CMatrix psi = CMatrix::Zero(h.dim(), 2);
  const auto ig = static_cast<Eigen::Index>(b.require_index(BasisState{0, false, {}}));
  const auto ie = static_cast<Eigen::Index>(b.require_index(BasisState{0, true, {}}));
  psi(ig, 0) = 1.0;
  psi(ie, 1) = 1.0;
  const auto r = propagate(psi, h, 0.0, rep.duration, po);
  rep.achieved = CMatrix(2, 2);
  rep.achieved << r.final_state(ig, 0), r.final_state(ig, 1), r.final_state(ie, 0), r.final_state(ie, 1);
  rep.leakage = std::max(0.0, 1.0 - 0.5 * rep.achieved.squaredNorm());
  rep.fidelity = gate_fidelity(rep.achieved, rep.ideal);
  rep.infidelity = std::max(0.0, 1.0 - rep.fidelity.average);
  rep.loss_estimate = loss_probability(r, {params.kappa, params.gamma_cpb});
  return rep;
}

ReadoutModel readout_model(double g_c, double delta_cpb, double probe_duration, double target_error) {
  require(g_c > 0.0 && delta_cpb != 0.0 && probe_duration >= 0.0, "readout needs g_c > 0, delta != 0, tau >= 0");
  ReadoutModel m;
  m.chi = g_c * g_c / delta_cpb;
  m.kappa_r = 2.0 * std::abs(m.chi);
  m.n_bar = 0.1 * delta_cpb * delta_cpb / (4.0 * g_c * g_c);
  m.probe_duration = probe_duration;
  m.snr = 2.0 * std::sqrt(m.kappa_r * probe_duration * m.n_bar) *
          std::sin(std::atan(2.0 * std::abs(m.chi) / m.kappa_r));
  m.error = 0.5 * std::erfc(m.snr / (2.0 * kSqrt2));
  if (m.error > target_error) {
    std::ostringstream os;
    os << "chi * probe_duration = " << m.chi * probe_duration << " gives assignment error " << m.error
       << " above the target " << target_error;
    m.warning = os.str();
  }
  return m;
}

ReadoutResult readout(const RegisterState& state, const ReadoutModel& model, std::mt19937_64& rng) {
  auto [p_e, post_e] = project_cpb(state, true);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ReadoutResult res{false, u(rng) < p_e, p_e, state};
  const bool flip = u(rng) < model.error;
  res.reported_excited = res.cpb_excited != flip;
  res.post = res.cpb_excited ? std::move(post_e) : project_cpb(state, false).second;
  return res;
}

}  // namespace holoreg
