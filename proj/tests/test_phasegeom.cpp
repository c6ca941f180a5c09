#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "holoreg/phasegeom.hpp"

using namespace holoreg;

namespace {

// Closed-form geometric series for an equidistant chain: positions
// x_j = -L/2 + j d, so sum_j e^{i k x_j} = e^{-i k L/2} (1 - z^N)/(1 - z), z = e^{i k d}.
Complex lattice_overlap_closed_form(std::int64_t n, double length, double dk) {
  if (n == 1) return 1.0;
  const double d = length / static_cast<double>(n - 1);
  const Complex z = std::exp(kI * dk * d);
  const Complex pre = std::exp(-kI * dk * 0.5 * length);
  if (std::abs(z - 1.0) < 1e-15) return pre;
  return pre * (1.0 - std::pow(z, static_cast<double>(n))) / (1.0 - z) / static_cast<double>(n);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("make_lattice places equidistant points centered on the origin") {
  auto one = make_lattice(1, 5e-3);
  CHECK(one.size() == 1);
  CHECK(one.positions()[0].norm() == 0.0);

  auto two = make_lattice(2, 1.0);
  CHECK(two.positions()[0].z() == doctest::Approx(-0.5));
  CHECK(two.positions()[1].z() == doctest::Approx(0.5));

  auto big = make_lattice(10000, 5e-3);
  const double spacing = big.positions()[1].z() - big.positions()[0].z();
  CHECK(spacing == doctest::Approx(5e-3 / 9999.0).epsilon(1e-12));
  CHECK(big.axial_spread() == doctest::Approx(5e-3).epsilon(1e-12));

  CHECK_THROWS_AS(make_lattice(0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_lattice(4, -1.0), InvalidArgument);
  CHECK_THROWS_AS(make_lattice(4, 0.0), InvalidArgument);
}

TEST_CASE("geometry invariants are enforced") {
  CHECK_THROWS_AS(EnsembleGeometry({}, 1.0, Vec3::UnitZ()), InvalidArgument);
  CHECK_THROWS_AS(EnsembleGeometry({Vec3(0, 0, 0), Vec3(0, 0, 2)}, 1.0, Vec3::UnitZ()), InvalidArgument);
  CHECK_THROWS_AS(EnsembleGeometry({Vec3(0, 0, NAN)}, 1.0, Vec3::UnitZ()), InvalidArgument);
}

TEST_CASE("jitter is deterministic and zero sigma is the identity") {
  auto lat = make_lattice(50, 5e-3);
  auto same = jitter(lat, 0.0, 7);
  CHECK(same.positions() == lat.positions());
  auto a = jitter(lat, 1e-7, 42);
  auto b = jitter(lat, 1e-7, 42);
  CHECK(a.positions() == b.positions());
  auto c = jitter(lat, 1e-7, 43);
  CHECK(a.positions() != c.positions());
  CHECK_THROWS_AS(jitter(lat, -1.0, 1), InvalidArgument);
}

TEST_CASE("jitter statistics match an isotropic Gaussian") {
  auto lat = make_lattice(20000, 5e-3);
  auto j = jitter(lat, 2e-7, 11);
  double s2 = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const Vec3 d = j.positions()[i] - lat.positions()[i];
    mean += d.x() + d.y() + d.z();
    s2 += d.squaredNorm();
  }
  const double n = 3.0 * static_cast<double>(lat.size());
  CHECK(std::abs(mean / n) < 5.0 * 2e-7 / std::sqrt(n));
  CHECK(std::sqrt(s2 / n) == doctest::Approx(2e-7).epsilon(0.02));
}

TEST_CASE("overlap basic identities") {
  auto geom = make_uniform_random(500, 5e-3, 3);
  const WaveVector q1(0, 0, 1.3e4);
  const WaveVector q2(2e3, 0, -4.1e4);
  CHECK(overlap(geom, q1, q1) == Complex(1.0, 0.0));
  const Complex a = overlap(geom, q1, q2);
  const Complex b = overlap(geom, q2, q1);
  CHECK(std::abs(a - std::conj(b)) < 1e-14);
  CHECK(std::abs(a) <= 1.0);
}

TEST_CASE("overlap on the equidistant chain matches the geometric series") {
  for (std::int64_t n : {1, 2, 7, 64, 1001}) {
    for (double dk : {0.0, 17.0, 1234.5, 6.2e4}) {
      auto geom = make_lattice(n, 5e-3);
      const Complex got = overlap(geom, WaveVector(0, 0, 0), WaveVector(0, 0, dk));
      CHECK(std::abs(got - lattice_overlap_closed_form(n, 5e-3, dk)) < 1e-12);
    }
  }
}

TEST_CASE("full-period phase advance sums to zero on the chain") {
  const std::int64_t n = 40;
  auto geom = make_lattice(n, 1e-3);
  const double period = lattice_period_length(geom);
  for (int m = 1; m < n; ++m) {
    const WaveVector dq(0, 0, kTwoPi * m / period);
    CHECK(std::abs(overlap(geom, WaveVector(), dq)) < 1e-13);
  }
}

TEST_CASE("random positions give overlaps of order 1/sqrt(N)") {
  const std::int64_t n = 100000;
  const double length = 5e-3;
  std::vector<double> mags;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto geom = make_uniform_random(n, length, seed);
    mags.push_back(std::abs(overlap(geom, WaveVector(), WaveVector(0, 0, kTwoPi * 37.0 / length))));
  }
  const double m = median(mags);
  const double ref = 1.0 / std::sqrt(static_cast<double>(n));
  CHECK(m > ref / 3.0);
  CHECK(m < ref * 3.0);
}

TEST_CASE("angle schedule") {
  auto zero = angle_schedule(5e-3, 500e-9, 0, 0);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0] == 0.0);

  auto full = angle_schedule(5e-3, 500e-9, -50, 50);
  CHECK(full.size() == 101);
  const double deg = 180.0 / kPi;
  CHECK(full.back() * deg == doctest::Approx(std::asin(5e-3) * deg).epsilon(1e-12));
  CHECK(full.back() * deg == doctest::Approx(0.2865).epsilon(1e-3));
  for (double th : full) CHECK(std::abs(th) * deg <= 0.3);

  CHECK_THROWS_AS(angle_schedule(1e-6, 500e-9, 0, 3), UnreachableAngle);
}

TEST_CASE("register on the exact chain is orthogonal") {
  const double lambda = 500e-9;
  auto geom = std::make_shared<const EnsembleGeometry>(make_lattice(10000, 5e-3));
  const WaveVector k1(kTwoPi / lambda, 0, 0);

  auto single = build_register(geom, k1, std::vector<double>{0.0});
  CHECK(single.size() == 1);
  CHECK(single.gram()(0, 0) == Complex(1.0, 0.0));

  auto angles = angle_schedule(lattice_period_length(*geom), lambda, -50, 50);
  auto reg = build_register(geom, k1, angles);
  CHECK(reg.size() == 101);
  CHECK(reg.crosstalk_bound() < 1e-12);
  for (Eigen::Index i = 0; i < reg.gram().rows(); ++i) {
    CHECK(reg.gram()(i, i) == Complex(1.0, 0.0));
    for (Eigen::Index j = 0; j < reg.gram().cols(); ++j)
      CHECK(std::abs(reg.gram()(i, j) - std::conj(reg.gram()(j, i))) < 1e-15);
  }
  // q_i . axis = -2 pi n / L_period
  CHECK(reg.mode(100).components.z() == doctest::Approx(-kTwoPi * 50 / lattice_period_length(*geom)).epsilon(1e-12));
}

TEST_CASE("register construction reports the worst pair") {
  auto geom = std::make_shared<const EnsembleGeometry>(make_lattice(20, 1e-3));
  const WaveVector k1(1e7, 0, 0);
  std::vector<double> close{0.0, 1e-9};
  try {
    build_register(geom, k1, close);
    FAIL("expected RegisterConstructionError");
  } catch (const RegisterConstructionError& e) {
    CHECK(std::string(e.what()).find("(0, 1)") != std::string::npos);
  }
  CHECK_THROWS_AS(build_register(geom, k1, std::vector<double>{0.1, 0.1}), InvalidArgument);
  CHECK_THROWS_AS(build_register(geom, WaveVector(0, 0, 1e7), std::vector<double>{0.0}), InvalidArgument);
}

TEST_CASE("jittered chain keeps crosstalk below 1e-2") {
  const double lambda = 500e-9;
  auto base = make_lattice(2000, 5e-3);
  const WaveVector k1(kTwoPi / lambda, 0, 0);
  auto angles = angle_schedule(lattice_period_length(base), lambda, -50, 50);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto geom = std::make_shared<const EnsembleGeometry>(jitter(base, 1e-7, seed));
    auto reg = build_register(geom, k1, angles, 0.5);
    worst = std::max(worst, reg.crosstalk_bound());
  }
  CHECK(worst < 1e-2);
}
