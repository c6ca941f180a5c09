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

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "holoreg/common.hpp"

namespace holoreg {

// Molecule positions (meters) and the trap axis that defines "along" for
// angle schedules. Immutable after construction.
class EnsembleGeometry {
 public:
  EnsembleGeometry(std::vector<Vec3> positions, double trap_length, Vec3 axis);

  const std::vector<Vec3>& positions() const { return positions_; }
  std::size_t size() const { return positions_.size(); }
  double trap_length() const { return trap_length_; }
  const Vec3& axis() const { return axis_; }

  // Spread of the positions projected on the axis.
  double axial_spread() const;

 private:
  std::vector<Vec3> positions_;
  double trap_length_;
  Vec3 axis_;
};

struct WaveVector {
  Vec3 components = Vec3::Zero();

  WaveVector() = default;
  explicit WaveVector(const Vec3& v);
  WaveVector(double x, double y, double z) : WaveVector(Vec3(x, y, z)) {}

  double norm() const { return components.norm(); }
  WaveVector operator-(const WaveVector& o) const { return WaveVector(components - o.components); }
  WaveVector operator+(const WaveVector& o) const { return WaveVector(components + o.components); }
  WaveVector operator-() const { return WaveVector(-components); }
  bool operator==(const WaveVector& o) const { return components == o.components; }
};

// K phase-pattern wave vectors together with their Gram matrix of overlaps.
// Keeps a shared handle on the geometry so overlaps of composite wave vectors
// can be evaluated later.
class ModeRegister {
 public:
  ModeRegister(std::shared_ptr<const EnsembleGeometry> geometry, WaveVector k1,
               std::vector<double> angles, std::vector<WaveVector> modes);

  std::size_t size() const { return modes_.size(); }
  const std::vector<WaveVector>& modes() const { return modes_; }
  const WaveVector& mode(std::size_t i) const { return modes_.at(i); }
  const WaveVector& k1() const { return k1_; }
  const std::vector<double>& angles() const { return angles_; }
  const CMatrix& gram() const { return gram_; }
  double crosstalk_bound() const { return crosstalk_; }
  std::pair<std::size_t, std::size_t> worst_pair() const { return worst_; }
  const EnsembleGeometry& geometry() const { return *geometry_; }
  std::shared_ptr<const EnsembleGeometry> geometry_ptr() const { return geometry_; }

  // Control-beam wave vector k2 that addresses mode i (q_i = k1 - k2_i).
  WaveVector k2(std::size_t i) const { return k1_ - modes_.at(i); }

 private:
  std::shared_ptr<const EnsembleGeometry> geometry_;
  WaveVector k1_;
  std::vector<double> angles_;
  std::vector<WaveVector> modes_;
  CMatrix gram_;
  double crosstalk_ = 0.0;
  std::pair<std::size_t, std::size_t> worst_{0, 0};
};

// n equidistant molecules spanning trap_length along axis, centered at the
// origin (spacing trap_length / (n - 1)).
EnsembleGeometry make_lattice(std::int64_t n, double trap_length, const Vec3& axis = Vec3::UnitZ());

// Uniformly random positions in [-L/2, L/2] along axis.
EnsembleGeometry make_uniform_random(std::int64_t n, double trap_length, std::uint64_t seed,
                                     const Vec3& axis = Vec3::UnitZ());

// Isotropic Gaussian displacement of every molecule. Deterministic in seed.
EnsembleGeometry jitter(const EnsembleGeometry& geom, double sigma, std::uint64_t seed);

// (1/N) sum_j exp(i (q2 - q1) . x_j)
Complex overlap(const EnsembleGeometry& geom, const WaveVector& q1, const WaveVector& q2);

// theta_n = asin(n * wavelength / trap_length) for n in [n_min, n_max].
std::vector<double> angle_schedule(double trap_length, double wavelength, int n_min, int n_max);

// Length over which the lattice phase pattern repeats: N times the spacing
// for an equidistant chain. Angle schedules built on this length make the
// Gram matrix exactly diagonal on the lattice.
double lattice_period_length(const EnsembleGeometry& geom);

// k2_i has |k2| = |k1|, starts parallel to k1 (perpendicular to the axis)
// and is tilted toward the axis by angles[i]. Throws
// RegisterConstructionError if the worst off-diagonal |gram| exceeds tol.
ModeRegister build_register(std::shared_ptr<const EnsembleGeometry> geom, const WaveVector& k1,
                            std::span<const double> angles, double tol = 1e-2);

// Modes given directly as wave vectors (no beam geometry). Same tolerance
// contract as build_register.
ModeRegister build_register_from_modes(std::shared_ptr<const EnsembleGeometry> geom,
                                       std::vector<WaveVector> modes, double tol = 1e-2);

// Gram matrix of arbitrary wave vectors over the geometry.
CMatrix gram_matrix(const EnsembleGeometry& geom, std::span<const WaveVector> modes);

// Off-diagonal |overlap| values for all distinct pairs.
std::vector<double> offdiagonal_magnitudes(const CMatrix& gram);

}  // namespace holoreg
