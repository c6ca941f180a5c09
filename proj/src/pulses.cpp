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


#include "holoreg/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace holoreg {

PulseSchedule::PulseSchedule(std::vector<double> t_grid, std::map<std::string, std::vector<double>> channels)
    : t_(std::move(t_grid)), channels_(std::move(channels)) {
  require(t_.size() >= 2, "schedule needs at least two samples");
  for (std::size_t i = 0; i < t_.size(); ++i) {
    require(std::isfinite(t_[i]), "schedule times must be finite");
    if (i > 0) require(t_[i] > t_[i - 1], "schedule times must be strictly increasing");
  }
  for (const auto& [name, v] : channels_) {
    require(v.size() == t_.size(), "channel '" + name + "' is not sampled on the schedule grid");
    for (double x : v) require(std::isfinite(x), "channel '" + name + "' has non-finite values");
  }
}

const std::vector<double>& PulseSchedule::samples(const std::string& name) const {
  auto it = channels_.find(name);
  if (it == channels_.end()) throw InvalidArgument("schedule has no channel '" + name + "'");
  return it->second;
}

double PulseSchedule::value(const std::string& name, double t) const {
  const auto& v = samples(name);
  if (t <= t_.front()) return v.front();
  if (t >= t_.back()) return v.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - t_[lo]) / (t_[hi] - t_[lo]);
  return v[lo] + w * (v[hi] - v[lo]);
}

PulseSchedule PulseSchedule::time_reversed() const {
  std::vector<double> t(t_.size());
  const double a = t_.front();
  const double b = t_.back();
  for (std::size_t i = 0; i < t_.size(); ++i) t[i] = a + b - t_[t_.size() - 1 - i];
  t.front() = a;
  t.back() = b;
  auto ch = channels_;
  for (auto& [name, v] : ch) std::reverse(v.begin(), v.end());
  return PulseSchedule(std::move(t), std::move(ch));
}

PulseSchedule PulseSchedule::resampled(std::size_t n) const {
  require(n >= 2, "resampling needs n >= 2");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i)
    t[i] = t0() + duration() * static_cast<double>(i) / static_cast<double>(n - 1);
  t.back() = t1();
  std::map<std::string, std::vector<double>> ch;
  for (const auto& [name, v] : channels_) {
    auto& out = ch[name];
    out.reserve(n);
    for (double ti : t) out.push_back(value(name, ti));
  }
  return PulseSchedule(std::move(t), std::move(ch));
}

PulseSchedule PulseSchedule::shifted_to(double t0_new) const {
  std::vector<double> t = t_;
  const double shift = t0_new - t_.front();
  for (double& x : t) x += shift;
  return PulseSchedule(std::move(t), channels_);
}

std::string PulseSchedule::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "t";
  for (const auto& [name, v] : channels_) os << "," << name;
  os << "\n";
  for (std::size_t i = 0; i < t_.size(); ++i) {
    os << t_[i];
    for (const auto& [name, v] : channels_) os << "," << v[i];
    os << "\n";
  }
  return os.str();
}

PulseSchedule PulseSchedule::from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("empty schedule CSV");
  std::vector<std::string> names;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) names.push_back(cell);
  }
  if (names.empty() || names.front() != "t") throw InvalidArgument("schedule CSV must start with column 't'");
  std::vector<double> t;
  std::vector<std::vector<double>> cols(names.size() - 1);
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ls, cell, ',')) {
      if (c >= names.size()) throw InvalidArgument("schedule CSV row " + std::to_string(row) + " has extra columns");
      double v = 0.0;
      try {
        v = std::stod(cell);
      } catch (const std::exception&) {
        throw InvalidArgument("schedule CSV row " + std::to_string(row) + ": bad number '" + cell + "'");
      }
      if (c == 0) t.push_back(v);
      else cols[c - 1].push_back(v);
      ++c;
    }
    if (c != names.size()) throw InvalidArgument("schedule CSV row " + std::to_string(row) + " is short");
  }
  std::map<std::string, std::vector<double>> ch;
  for (std::size_t i = 1; i < names.size(); ++i) ch[names[i]] = std::move(cols[i - 1]);
  return PulseSchedule(std::move(t), std::move(ch));
}

StirapSpec StirapSpec::standard(double window, double adiabaticity, StirapDirection direction) {
  require(window > 0.0 && adiabaticity > 0.0, "STIRAP window and adiabaticity must be positive");
  StirapSpec s;
  s.pulse_width = 0.12 * window;
  s.pulse_delay = s.pulse_width;
  s.peak_rabi = adiabaticity / s.pulse_width;
  s.direction = direction;
  return s;
}

PulseSchedule stirap_schedule(const StirapSpec& spec, double t0, double t1, std::size_t n_samples) {
  require(t1 > t0, "STIRAP window needs t1 > t0");
  require(n_samples >= 16, "STIRAP schedule needs n_samples >= 16");
  require(spec.pulse_width > 0.0, "STIRAP pulse width must be positive");
  require(std::abs(spec.pulse_delay) < t1 - t0, "STIRAP delay must be shorter than the window");
  require(spec.peak_rabi >= 0.0, "STIRAP peak Rabi frequency must be >= 0");
  const double tc = 0.5 * (t0 + t1);
  double t_stokes = tc - 0.5 * spec.pulse_delay;
  double t_pump = tc + 0.5 * spec.pulse_delay;
  if (spec.direction == StirapDirection::inverted) std::swap(t_stokes, t_pump);

  std::vector<double> t(n_samples);
  std::vector<double> pump(n_samples);
  std::vector<double> stokes(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    t[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    const double a = (t[i] - t_pump) / spec.pulse_width;
    const double b = (t[i] - t_stokes) / spec.pulse_width;
    pump[i] = spec.peak_rabi * std::exp(-a * a);
    stokes[i] = spec.peak_rabi * std::exp(-b * b);
  }
  t.back() = t1;
  return PulseSchedule(std::move(t), {{channel::kOmega1, std::move(pump)}, {channel::kOmega2, std::move(stokes)}});
}

PulseSchedule sweep_schedule(const SweepSpec& spec, std::size_t n_samples) {
  require(n_samples >= 2, "sweep needs n_samples >= 2");
  require(spec.duration > 0.0, "sweep duration must be positive");
  require(spec.g_c > 0.0, "sweep needs g_c > 0 for its adiabaticity contract");
  require(spec.steepness > 0.0, "sweep steepness must be positive");
  const double ratio = std::abs(spec.delta_far) / spec.g_c;
  if (ratio < kMinEndpointRatio) {
    std::ostringstream os;
    os << "endpoint detuning ratio |delta_far|/g_c = " << ratio << " is below " << kMinEndpointRatio;
    throw AdiabaticityContractError(os.str());
  }
  const double far = std::abs(spec.delta_far);
  const double s = spec.steepness;
  std::vector<double> t(n_samples);
  std::vector<double> d(n_samples);
  const double tn = std::tanh(s);
  // cphase bump: tanh(s(u - a)) + tanh(s(1 - a - u)), shifted to vanish at
  // both ends and scaled to 1 at the center.
  const double a = spec.ramp_center;
  auto raw_bump = [&](double u) { return std::tanh(2.0 * s * (u - a) / a) + std::tanh(2.0 * s * (1.0 - a - u) / a); };
  const double b0 = raw_bump(0.0);
  const double bmid = raw_bump(0.5);
  if (spec.shape == SweepShape::cphase) {
    require(a > 0.0 && a < 0.5, "cphase ramp_center must lie in (0, 0.5)");
    require(spec.delta_near >= 0.0 && spec.delta_near < far, "cphase delta_near must lie in [0, delta_far)");
  }
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(n_samples - 1);
    t[i] = spec.duration * u;
    if (spec.shape == SweepShape::swap) {
      d[i] = far * std::tanh(s * (2.0 * u - 1.0)) / tn;
    } else {
      const double bump = (raw_bump(u) - b0) / (bmid - b0);
      d[i] = far - (far - spec.delta_near) * bump;
    }
  }
  t.back() = spec.duration;
  if (spec.shape == SweepShape::swap) {
    d.front() = -far;
    d.back() = far;
  } else {
    d.front() = far;
    d.back() = far;
  }
  return PulseSchedule(std::move(t), {{channel::kDeltaCpb, std::move(d)}});
}

}  // namespace holoreg
