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


#include "holoreg/phasegeom.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace holoreg {

namespace {

bool finite(const Vec3& v) { return v.allFinite(); }

Vec3 normalized_axis(const Vec3& axis) {
  require(finite(axis) && axis.norm() > 0.0, "axis must be a finite non-zero vector");
  return axis.normalized();
}

}  // namespace

EnsembleGeometry::EnsembleGeometry(std::vector<Vec3> positions, double trap_length, Vec3 axis)
    : positions_(std::move(positions)), trap_length_(trap_length), axis_(normalized_axis(axis)) {
  require(!positions_.empty(), "geometry needs at least one molecule");
  require(std::isfinite(trap_length_) && trap_length_ >= 0.0, "trap length must be finite and >= 0");
  for (const auto& p : positions_) require(finite(p), "molecule positions must be finite");
  const double spread = axial_spread();
  if (spread > trap_length_ * (1.0 + 1e-12) + 1e-300) {
    std::ostringstream os;
    os << "axial spread " << spread << " m exceeds trap length " << trap_length_ << " m";
    throw InvalidArgument(os.str());
  }
}

double EnsembleGeometry::axial_spread() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : positions_) {
    const double s = p.dot(axis_);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return hi - lo;
}

WaveVector::WaveVector(const Vec3& v) : components(v) {
  require(finite(v), "wave vector components must be finite");
}

EnsembleGeometry make_lattice(std::int64_t n, double trap_length, const Vec3& axis) {
  require(n >= 1, "lattice needs n >= 1");
  require(trap_length > 0.0, "trap length must be positive");
  const Vec3 a = normalized_axis(axis);
  std::vector<Vec3> pos;
  pos.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    pos.emplace_back(Vec3::Zero());
  } else {
    const double spacing = trap_length / static_cast<double>(n - 1);
    for (std::int64_t j = 0; j < n; ++j) {
      pos.emplace_back((-0.5 * trap_length + spacing * static_cast<double>(j)) * a);
    }
  }
  return EnsembleGeometry(std::move(pos), trap_length, a);
}

EnsembleGeometry make_uniform_random(std::int64_t n, double trap_length, std::uint64_t seed,
                                     const Vec3& axis) {
  require(n >= 1, "need n >= 1");
  require(trap_length > 0.0, "trap length must be positive");
  const Vec3 a = normalized_axis(axis);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5 * trap_length, 0.5 * trap_length);
  std::vector<Vec3> pos;
  pos.reserve(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < n; ++j) pos.emplace_back(u(rng) * a);
  return EnsembleGeometry(std::move(pos), trap_length, a);
}

EnsembleGeometry jitter(const EnsembleGeometry& geom, double sigma, std::uint64_t seed) {
  require(std::isfinite(sigma) && sigma >= 0.0, "jitter sigma must be >= 0");
  if (sigma == 0.0) return geom;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  std::vector<Vec3> pos = geom.positions();
  for (auto& p : pos) {
    const double dx = gauss(rng);
    const double dy = gauss(rng);
    const double dz = gauss(rng);
    p += Vec3(dx, dy, dz);
  }
  // Displacements may push the ends slightly past the nominal length.
  EnsembleGeometry probe(pos, std::numeric_limits<double>::max(), geom.axis());
  const double length = std::max(geom.trap_length(), probe.axial_spread());
  return EnsembleGeometry(std::move(pos), length, geom.axis());
}

Complex overlap(const EnsembleGeometry& geom, const WaveVector& q1, const WaveVector& q2) {
  const Vec3 dq = q2.components - q1.components;
  double re = 0.0;
  double im = 0.0;
  for (const auto& x : geom.positions()) {
    const double phase = dq.dot(x);
    re += std::cos(phase);
    im += std::sin(phase);
  }
  const double n = static_cast<double>(geom.size());
  return {re / n, im / n};
}

std::vector<double> angle_schedule(double trap_length, double wavelength, int n_min, int n_max) {
  require(trap_length > 0.0, "trap length must be positive");
  require(wavelength > 0.0, "wavelength must be positive");
  require(n_min <= n_max, "angle schedule needs n_min <= n_max");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_max - n_min + 1));
  for (int n = n_min; n <= n_max; ++n) {
    const double s = static_cast<double>(n) * wavelength / trap_length;
    if (std::abs(s) > 1.0) {
      std::ostringstream os;
      os << "order n=" << n << " needs sin(theta)=" << s << " (|n lambda / L| > 1)";
      throw UnreachableAngle(os.str());
    }
    out.push_back(std::asin(s));
  }
  return out;
}

double lattice_period_length(const EnsembleGeometry& geom) {
  const auto n = static_cast<double>(geom.size());
  if (geom.size() < 2) return geom.trap_length();
  return geom.axial_spread() * n / (n - 1.0);
}

CMatrix gram_matrix(const EnsembleGeometry& geom, std::span<const WaveVector> modes) {
  const auto n = static_cast<Eigen::Index>(geom.size());
  const auto k = static_cast<Eigen::Index>(modes.size());
  CMatrix phases(n, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Vec3& q = modes[static_cast<std::size_t>(i)].components;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double ph = q.dot(geom.positions()[static_cast<std::size_t>(j)]);
      phases(j, i) = Complex(std::cos(ph), std::sin(ph));
    }
  }
  CMatrix gram = phases.adjoint() * phases / static_cast<double>(n);
  // Hermitian with unit diagonal by definition; remove rounding.
  for (Eigen::Index i = 0; i < k; ++i) {
    gram(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < k; ++j) gram(j, i) = std::conj(gram(i, j));
  }
  return gram;
}

std::vector<double> offdiagonal_magnitudes(const CMatrix& gram) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    for (Eigen::Index j = i + 1; j < gram.cols(); ++j) out.push_back(std::abs(gram(i, j)));
  return out;
}

ModeRegister::ModeRegister(std::shared_ptr<const EnsembleGeometry> geometry, WaveVector k1,
                           std::vector<double> angles, std::vector<WaveVector> modes)
    : geometry_(std::move(geometry)), k1_(k1), angles_(std::move(angles)), modes_(std::move(modes)) {
  require(geometry_ != nullptr, "register needs a geometry");
  require(!modes_.empty(), "register needs at least one mode");
  gram_ = gram_matrix(*geometry_, modes_);
  for (Eigen::Index i = 0; i < gram_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < gram_.cols(); ++j) {
      const double m = std::abs(gram_(i, j));
      if (m > crosstalk_) {
        crosstalk_ = m;
        worst_ = {static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
      }
    }
  }
}

namespace {

void check_crosstalk(const ModeRegister& reg, double tol) {
  if (reg.crosstalk_bound() > tol) {
    std::ostringstream os;
    os << "crosstalk " << reg.crosstalk_bound() << " exceeds tolerance " << tol << " for mode pair ("
       << reg.worst_pair().first << ", " << reg.worst_pair().second << ")";
    throw RegisterConstructionError(os.str());
  }
}

}  // namespace

ModeRegister build_register(std::shared_ptr<const EnsembleGeometry> geom, const WaveVector& k1,
                            std::span<const double> angles, double tol) {
  require(geom != nullptr, "register needs a geometry");
  require(tol > 0.0 && tol < 1.0, "crosstalk tolerance must lie in (0, 1)");
  require(!angles.empty(), "register needs at least one angle");
  const Vec3& axis = geom->axis();
  const double k = k1.norm();
  require(k > 0.0, "k1 must be non-zero");
  require(std::abs(k1.components.dot(axis)) <= 1e-12 * k, "k1 must be perpendicular to the trap axis");
  std::vector<double> sorted(angles.begin(), angles.end());
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "angles must be distinct");

  const Vec3 u = k1.components / k;
  std::vector<WaveVector> modes;
  modes.reserve(angles.size());
  for (double theta : angles) {
    const WaveVector k2(k * (std::cos(theta) * u + std::sin(theta) * axis));
    modes.push_back(k1 - k2);
  }
  ModeRegister reg(std::move(geom), k1, std::vector<double>(angles.begin(), angles.end()), std::move(modes));
  check_crosstalk(reg, tol);
  return reg;
}

ModeRegister build_register_from_modes(std::shared_ptr<const EnsembleGeometry> geom,
                                       std::vector<WaveVector> modes, double tol) {
  require(tol > 0.0 && tol < 1.0, "crosstalk tolerance must lie in (0, 1)");
  ModeRegister reg(std::move(geom), WaveVector(), {}, std::move(modes));
  check_crosstalk(reg, tol);
  return reg;
}

}  // namespace holoreg
