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

#include "holoreg/optctl.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

namespace holoreg {

namespace {

// Counts evaluations, enforces the budget and tracks the best point.
class Counter {
 public:
  Counter(const Objective& f, std::size_t budget) : f_(f), budget_(budget) {}

  std::size_t used() const { return used_; }
  std::size_t left() const { return budget_ - used_; }
  double best() const { return best_; }
  const std::vector<double>& best_x() const { return best_x_; }

  double operator()(const std::vector<double>& x) {
    if (used_ >= budget_) return std::numeric_limits<double>::infinity();
    ++used_;
    return note(x, f_(x));
  }

  // Evaluates a batch concurrently; bookkeeping happens in index order so
  // the outcome does not depend on scheduling.
  std::vector<double> batch(const std::vector<std::vector<double>>& xs) {
    const std::size_t n = std::min(xs.size(), left());
    std::vector<double> out(xs.size(), std::numeric_limits<double>::infinity());
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < n; i += workers) out[i] = f_(xs[i]);
      }));
    }
    for (auto& j : jobs) j.get();
    used_ += n;
    for (std::size_t i = 0; i < n; ++i) note(xs[i], out[i]);
    return out;
  }

 private:
  double note(const std::vector<double>& x, double v) {
    if (v < best_) {
      best_ = v;
      best_x_ = x;
    }
    return v;
  }

  const Objective& f_;
  std::size_t budget_;
  std::size_t used_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
  std::vector<double> best_x_;
};

using Vec = std::vector<double>;

Vec axpy(const Vec& x, double a, const Vec& d) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + a * d[i];
  return r;
}

double dot(const Vec& a, const Vec& b) { return std::inner_product(a.begin(), a.end(), b.begin(), 0.0); }

void nelder_mead(Counter& f, const Vec& x0, double step, std::mt19937_64& rng, std::size_t stop_at, double target,
                 std::vector<double>& history) {
  const std::size_t n = x0.size();
  const double dn = static_cast<double>(n);
  // adaptive coefficients for higher dimensions (Gao and Han)
  const double alpha = 1.0, gamma = 1.0 + 2.0 / dn, rho = 0.75 - 0.5 / dn, sigma = 1.0 - 1.0 / dn;
  std::uniform_real_distribution<double> jitter(0.75, 1.25);

  Vec start = x0;
  for (int restart = 0; restart < 50 && f.used() < stop_at && f.best() > target; ++restart) {
    std::vector<Vec> pts{start};
    for (std::size_t i = 0; i < n; ++i) {
      Vec p = start;
      p[i] += step * jitter(rng);
      pts.push_back(std::move(p));
    }
    std::vector<double> vals;
    for (const auto& p : pts) vals.push_back(f(p));

    const std::size_t before = f.used();
    while (f.used() < stop_at && f.best() > target) {
      std::vector<std::size_t> idx(n + 1);
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
      const std::size_t lo = idx[0], hi = idx[n], nh = idx[n - 1];

      double diam = 0.0;
      for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t k = 0; k < n; ++k) diam = std::max(diam, std::abs(pts[idx[i]][k] - pts[lo][k]));
      if (diam < 1e-10 || vals[hi] - vals[lo] <= 1e-15 * (std::abs(vals[lo]) + 1e-300)) break;

      Vec c(n, 0.0);
      for (std::size_t i = 0; i <= n; ++i)
        if (i != hi)
          for (std::size_t k = 0; k < n; ++k) c[k] += pts[i][k] / dn;
      Vec dir(n);
      for (std::size_t k = 0; k < n; ++k) dir[k] = c[k] - pts[hi][k];

      const Vec xr = axpy(c, alpha, dir);
      const double fr = f(xr);
      if (fr < vals[lo]) {
        const Vec xe = axpy(c, alpha * gamma, dir);
        const double fe = f(xe);
        if (fe < fr) {
          pts[hi] = xe;
          vals[hi] = fe;
        } else {
          pts[hi] = xr;
          vals[hi] = fr;
        }
      } else if (fr < vals[nh]) {
        pts[hi] = xr;
        vals[hi] = fr;
      } else {
        const bool outside = fr < vals[hi];
        const Vec xc = outside ? axpy(c, alpha * rho, dir) : axpy(c, -rho, dir);
        const double fc = f(xc);
        if (fc < std::min(fr, vals[hi])) {
          pts[hi] = xc;
          vals[hi] = fc;
        } else {
          std::vector<Vec> shrunk;
          std::vector<std::size_t> which;
          for (std::size_t i = 0; i <= n; ++i) {
            if (i == lo) continue;
            Vec p(n);
            for (std::size_t k = 0; k < n; ++k) p[k] = pts[lo][k] + sigma * (pts[i][k] - pts[lo][k]);
            shrunk.push_back(std::move(p));
            which.push_back(i);
          }
          const auto v = f.batch(shrunk);
          for (std::size_t s = 0; s < which.size(); ++s) {
            pts[which[s]] = shrunk[s];
            vals[which[s]] = v[s];
          }
        }
      }
      history.push_back(f.best());
    }
    // a restart that moved nothing means the simplex has converged for good
    if (f.used() - before <= n + 1) break;
    start = f.best_x();
    step *= 0.5;
  }
}

Vec fd_gradient(Counter& f, const Vec& x, double h) {
  const std::size_t n = x.size();
  std::vector<Vec> pts;
  pts.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec p = x, m = x;
    p[i] += h;
    m[i] -= h;
    pts.push_back(std::move(p));
    pts.push_back(std::move(m));
  }
  const auto v = f.batch(pts);
  Vec g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = (v[2 * i] - v[2 * i + 1]) / (2.0 * h);
  return g;
}

void bfgs(Counter& f, double h, double target, std::vector<double>& history) {
  Vec x = f.best_x();
  const std::size_t n = x.size();
  if (n == 0) return;
  double fx = f.best();
  Vec g = fd_gradient(f, x, h);
  std::vector<Vec> hinv(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) hinv[i][i] = 1.0;
  bool fresh = true;

  while (f.left() > 2 * n + 2 && f.best() > target) {
    Vec p(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) p[i] -= hinv[i][k] * g[k];
    double slope = dot(g, p);
    if (!(slope < 0.0)) {
      for (std::size_t i = 0; i < n; ++i) p[i] = -g[i];
      slope = dot(g, p);
      fresh = true;
    }
    if (!(slope < 0.0)) break;

    double step = 1.0;
    double fn = std::numeric_limits<double>::infinity();
    Vec xn;
    for (int tries = 0; tries < 30 && f.left() > 0; ++tries) {
      xn = axpy(x, step, p);
      fn = f(xn);
      if (fn <= fx + 1e-4 * step * slope) break;
      step *= 0.5;
    }
    if (!(fn < fx)) {
      if (fresh) break;
      for (std::size_t i = 0; i < n; ++i) std::fill(hinv[i].begin(), hinv[i].end(), 0.0), hinv[i][i] = 1.0;
      fresh = true;
      continue;
    }
    const Vec gn = fd_gradient(f, xn, h);
    Vec s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-300) {
      if (fresh) {
        const double scale = sy / dot(y, y);
        for (std::size_t i = 0; i < n; ++i) hinv[i][i] = scale;
        fresh = false;
      }
      Vec hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) hy[i] += hinv[i][k] * y[k];
      const double yhy = dot(y, hy);
      const double r = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
          hinv[i][k] += (1.0 + yhy * r) * r * s[i] * s[k] - r * (hy[i] * s[k] + s[i] * hy[k]);
    }
    x = xn;
    fx = fn;
    g = gn;
    history.push_back(f.best());
  }
}

double norm_bound(const PulseSchedule& s, double g_c) {
  const auto& d = s.samples(channel::kDeltaCpb);
  double m = 0.0;
  for (double v : d) m = std::max(m, std::abs(v));
  return m + 2.0 * g_c;
}

}  // namespace

PulseParametrization PulseParametrization::knots(const PulseSchedule& initial, std::size_t n_knots, double lo,
                                                 double hi, double unit) {
  require(initial.has_channel(channel::kDeltaCpb), "parametrization needs a delta_cpb schedule");
  require(n_knots >= 1, "need at least one knot");
  require(lo < hi && unit > 0.0, "bounds must satisfy lo < hi and unit > 0");
  PulseParametrization p;
  p.basis_ = ParamBasis::knots;
  p.unit_ = unit;
  p.duration_ = initial.duration();
  p.lo_ = lo;
  p.hi_ = hi;
  p.start_ = initial.samples(channel::kDeltaCpb).front();
  p.end_ = initial.samples(channel::kDeltaCpb).back();
  require(p.start_ >= lo && p.start_ <= hi && p.end_ >= lo && p.end_ <= hi, "endpoints must lie inside the bounds");
  for (std::size_t k = 1; k <= n_knots; ++k) {
    const double t = initial.t0() + p.duration_ * static_cast<double>(k) / static_cast<double>(n_knots + 1);
    p.coefficients_.push_back(initial.value(channel::kDeltaCpb, t) / unit);
  }
  return p;
}

PulseParametrization PulseParametrization::fourier(const PulseSchedule& initial, std::size_t n_terms, double lo,
                                                   double hi, double unit, std::size_t n_samples) {
  require(initial.has_channel(channel::kDeltaCpb), "parametrization needs a delta_cpb schedule");
  require(n_terms >= 1 && n_samples >= 2, "need at least one term and two samples");
  require(lo < hi && unit > 0.0, "bounds must satisfy lo < hi and unit > 0");
  PulseParametrization p;
  p.basis_ = ParamBasis::fourier;
  p.duration_ = initial.duration();
  p.lo_ = lo;
  p.hi_ = hi;
  p.unit_ = unit;
  const auto base = initial.shifted_to(0.0).resampled(n_samples);
  p.base_t_ = base.t_grid();
  p.base_ = base.samples(channel::kDeltaCpb);
  p.start_ = p.base_.front();
  p.end_ = p.base_.back();
  require(p.start_ >= lo && p.start_ <= hi && p.end_ >= lo && p.end_ <= hi, "endpoints must lie inside the bounds");
  p.coefficients_.assign(n_terms, 0.0);
  return p;
}

PulseParametrization PulseParametrization::with(std::vector<double> coefficients) const {
  require(coefficients.size() == coefficients_.size(), "coefficient count mismatch");
  PulseParametrization p = *this;
  p.coefficients_ = std::move(coefficients);
  return p;
}

PulseSchedule PulseParametrization::render() const {
  std::vector<double> t, d;
  if (basis_ == ParamBasis::knots) {
    const std::size_t n = coefficients_.size();
    for (std::size_t k = 0; k <= n + 1; ++k) {
      t.push_back(duration_ * static_cast<double>(k) / static_cast<double>(n + 1));
      if (k == 0) d.push_back(start_);
      else if (k == n + 1) d.push_back(end_);
      else d.push_back(std::clamp(unit_ * coefficients_[k - 1], lo_, hi_));
    }
    t.back() = duration_;
  } else {
    t = base_t_;
    d.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      double v = base_[i];
      for (std::size_t k = 0; k < coefficients_.size(); ++k)
        v += unit_ * coefficients_[k] * std::sin(static_cast<double>(k + 1) * kPi * t[i] / duration_);
      d[i] = std::clamp(v, lo_, hi_);
    }
    d.front() = start_;
    d.back() = end_;
  }
  return PulseSchedule(std::move(t), {{channel::kDeltaCpb, std::move(d)}});
}

GateTarget gate_target_from_string(const std::string& s) {
  if (s == "swap") return GateTarget::swap;
  if (s == "cphase") return GateTarget::cphase;
  throw InvalidArgument("unknown gate target '" + s + "'");
}

const char* to_string(GateTarget t) { return t == GateTarget::swap ? "swap" : "cphase"; }

double gate_objective(const GateReport& report, GateTarget target, const ObjectiveSettings& settings) {
  double v = report.infidelity + settings.leakage_weight * report.leakage;
  if (target == GateTarget::cphase) {
    const double dphi = wrap_phase(report.conditional_phase - kPi);
    v += settings.phase_weight * dphi * dphi;
  }
  return v;
}

ObjectiveResult infidelity_objective(const PulseParametrization& p, GateTarget target, const SystemParams& params,
                                     const ObjectiveSettings& settings) {
  ObjectiveResult out;
  try {
    const PulseSchedule s = p.render();
    GateSettings gs;
    gs.check_convergence = false;
    gs.max_step = settings.step_factor / norm_bound(s, params.g_c);
    out.report = target == GateTarget::swap ? run_swap(s, params, gs) : run_cphase(s, params, gs);
    out.value = gate_objective(out.report, target, settings);
    if (!std::isfinite(out.value)) throw IntegrationError("non-finite objective");
  } catch (const Error& e) {
    out.value = settings.sentinel;
    out.diagnostic = std::string(e.category()) + ": " + e.what();
  }
  return out;
}

GateReport verify_gate(const PulseParametrization& p, GateTarget target, const SystemParams& params) {
  const PulseSchedule s = p.render();
  return target == GateTarget::swap ? run_swap(s, params) : run_cphase(s, params);
}

OptimizationRecord optimize(const Objective& f, const std::vector<double>& x0, const OptimizeOptions& options) {
  require(options.budget >= 100, "optimizer budget must be at least 100 evaluations");
  require(options.polish_fraction >= 0.0 && options.polish_fraction < 1.0, "polish_fraction must lie in [0, 1)");
  OptimizationRecord rec;
  rec.seed = options.seed;
  Counter count(f, options.budget);
  rec.initial_value = count(x0);
  rec.history.push_back(count.best());
  std::mt19937_64 rng(options.seed);

  if (count.best() > options.target && !x0.empty()) {
    const auto nm_budget =
        static_cast<std::size_t>(static_cast<double>(options.budget) * (1.0 - options.polish_fraction));
    nelder_mead(count, x0, options.initial_step, rng, nm_budget, options.target, rec.history);
    bfgs(count, options.fd_step, options.target, rec.history);
  }
  rec.best_value = count.best();
  rec.best_parameters = count.best_x();
  rec.evaluations = count.used();
  rec.reached_target = rec.best_value <= options.target;
  rec.stagnated = !(rec.best_value < rec.initial_value) && !rec.reached_target;
  return rec;
}

GateOptimization optimize_gate(const PulseParametrization& initial, GateTarget target, const SystemParams& params,
                               const OptimizeOptions& options, const ObjectiveSettings& settings) {
  Objective f = [&](const std::vector<double>& x) {
    return infidelity_objective(initial.with(x), target, params, settings).value;
  };
  GateOptimization out{initial, optimize(f, initial.coefficients(), options), {}};
  out.best = initial.with(out.record.best_parameters);
  out.report = verify_gate(out.best, target, params);
  return out;
}

GateDesign default_design(GateTarget target) {
  GateDesign d;
  d.target = target;
  if (target == GateTarget::cphase) {
    d.duration_g = 10.0;
    d.steepness = 3.0;
  }
  return d;
}

PulseParametrization initial_parametrization(const GateDesign& design, const SystemParams& params) {
  require(design.duration_g > 0.0 && design.bound_ratio >= 1.0, "gate design needs duration > 0 and bound_ratio >= 1");
  const double g = params.g_c;
  const double t = design.duration_g / g;
  PulseSchedule init;
  if (design.target == GateTarget::swap) {
    SweepSpec spec{SweepShape::swap, design.far_ratio * g, t, g, design.steepness};
    init = sweep_schedule(spec, 801);
  } else {
    init = default_cphase_schedule(params, t, design.far_ratio);
  }
  const double bound = design.bound_ratio * design.far_ratio * g;
  return PulseParametrization::knots(init, design.n_knots, -bound, bound, g);
}

}  // namespace holoreg
