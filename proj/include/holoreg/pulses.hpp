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

#include <map>
#include <string>
#include <vector>

#include "holoreg/common.hpp"
#include "holoreg/phasegeom.hpp"

namespace holoreg {

namespace channel {
inline constexpr const char* kOmega1 = "omega1";
inline constexpr const char* kOmega2 = "omega2";
inline constexpr const char* kOmegaMw = "omega_mw";
inline constexpr const char* kDelta = "delta";
inline constexpr const char* kDeltaCpb = "delta_cpb";
}  // namespace channel

// Control amplitudes (rad/s) sampled on a common, strictly increasing time
// grid (s). Values between samples are piecewise-linear; outside the grid
// the end values are held.
class PulseSchedule {
 public:
  PulseSchedule() = default;
  PulseSchedule(std::vector<double> t_grid, std::map<std::string, std::vector<double>> channels);

  const std::vector<double>& t_grid() const { return t_; }
  const std::map<std::string, std::vector<double>>& channels() const { return channels_; }
  const std::vector<double>& samples(const std::string& name) const;
  bool has_channel(const std::string& name) const { return channels_.count(name) != 0; }
  double t0() const { return t_.front(); }
  double t1() const { return t_.back(); }
  double duration() const { return t_.back() - t_.front(); }

  double value(const std::string& name, double t) const;

  // Same waveform played backwards over the same window.
  PulseSchedule time_reversed() const;
  // Linear resampling onto n uniformly spaced points.
  PulseSchedule resampled(std::size_t n) const;
  // Shifted so that the grid starts at t0.
  PulseSchedule shifted_to(double t0) const;

  std::string to_csv() const;
  static PulseSchedule from_csv(const std::string& text);

  bool operator==(const PulseSchedule&) const = default;

 private:
  std::vector<double> t_;
  std::map<std::string, std::vector<double>> channels_;
};

enum class StirapDirection { forward, inverted };

struct StirapSpec {
  double peak_rabi = 0.0;    // rad/s
  double pulse_width = 0.0;  // s, 1/e half-width of exp(-((t - tc)/w)^2)
  double pulse_delay = 0.0;  // s, separation of the two peaks
  StirapDirection direction = StirapDirection::forward;
  WaveVector k1;
  WaveVector k2;

  // Peak Rabi frequency times pulse width.
  double adiabaticity() const { return peak_rabi * pulse_width; }

  // Counterintuitive pair filling a window: width = 0.12 window, delay =
  // width, peak from the requested adiabaticity product.
  static StirapSpec standard(double window, double adiabaticity, StirapDirection direction = StirapDirection::forward);
};

inline constexpr double kDefaultStirapWindow = 50e-9;
inline constexpr double kDefaultStirapAdiabaticity = 20.0 * kPi;

// Gaussian pulse pair on [t0, t1]. forward: omega2 (Stokes) peaks first and
// maps m -> f; inverted: omega1 first, f -> m.
PulseSchedule stirap_schedule(const StirapSpec& spec, double t0, double t1, std::size_t n_samples);

enum class SweepShape { swap, cphase };

struct SweepSpec {
  SweepShape shape = SweepShape::swap;
  double delta_far = 0.0;   // rad/s, endpoint detuning magnitude
  double duration = 0.0;    // s
  double g_c = 0.0;         // rad/s, used for the adiabaticity contract
  double steepness = 3.0;   // tanh ramp steepness
  double delta_near = 0.0;  // rad/s, closest approach for cphase
  double ramp_center = 0.25;  // cphase: ramp midpoints at this fraction from each end
};

inline constexpr double kMinEndpointRatio = 10.0;

// swap: delta_far * tanh(s (2u - 1)) / tanh(s), u = t / T, i.e. a monotone
// sweep -far -> +far crossing zero at T/2; the return sweep is its
// time_reversed() copy. cphase: excursion from +far down to delta_near and
// back with exactly equal endpoints.
PulseSchedule sweep_schedule(const SweepSpec& spec, std::size_t n_samples);

}  // namespace holoreg
