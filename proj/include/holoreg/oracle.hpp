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

#include <string>
#include <vector>

#include "holoreg/collective.hpp"
#include "holoreg/common.hpp"
#include "holoreg/hilbert.hpp"

namespace holoreg {

inline constexpr double kSqrtHalf = 0.70710678118654752440;

// Two-qubit multiplexed storage run side by side in the effective engine
// and by brute-force propagation on N molecules (levels m, f, e_el, one
// cavity photon). Modes are exact lattice patterns q_n = 2 pi n / (N d).
struct WalkthroughOptions {
  int n_molecules = 8;
  double trap_length = 1e-3;
  double wavelength = 500e-9;   // sets |k1|; only axial components matter
  Complex alpha0 = kSqrtHalf, beta0 = kSqrtHalf;
  Complex alpha1 = kSqrtHalf, beta1 = Complex(0.0, kSqrtHalf);
  double collective_rate = kTwoPi * 5e6;
  double stirap_window = 50e-9;
  double stirap_adiabaticity = 80.0 * kPi;
  std::size_t stirap_samples = 1001;
  // Skip the shift_back before the second store (oracle only).
  bool naive = false;
};

struct WalkthroughStep {
  std::string name;
  double infidelity = 0.0;  // 1 - |<effective|oracle>|^2, normalized
  double deviation = 0.0;   // sqrt(infidelity)
  double peak_e_el = 0.0;   // max e_el population during the step
  double oracle_norm = 1.0;
};

struct WalkthroughResult {
  int n_molecules = 0;
  std::vector<WalkthroughStep> steps;
  double max_infidelity = 0.0;
  double max_deviation = 0.0;
  double peak_e_el = 0.0;
};

// Proper protocol: store q0, store q1, retrieve q0. Naive variant: store q0,
// then load q1 and swap without shift_back followed by the forward STIRAP;
// only oracle quantities are reported for the naive run.
WalkthroughResult run_walkthrough(const WalkthroughOptions& options);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace holoreg
