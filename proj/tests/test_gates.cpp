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

#include <cmath>
#include <random>

#include "doctest.h"
#include "holoreg/gates.hpp"
#include "holoreg/oracle.hpp"

using namespace holoreg;

namespace {

CMatrix random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  CMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(n(rng), n(rng));
  Eigen::HouseholderQR<CMatrix> qr(a);
  return qr.householderQ();
}

// exp(-i eps H) for a random Hermitian H
CMatrix near_identity(int d, double eps, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  CMatrix h(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) h(i, j) = Complex(n(rng), n(rng));
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  CVector ph(d);
  for (int i = 0; i < d; ++i) ph(i) = std::polar(1.0, -eps * es.eigenvalues()(i));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

const double kG = kTwoPi * 200e6;

}  // namespace

TEST_CASE("average and process fidelity obey the dimensional relation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix u = random_unitary(4, rng);
    const CMatrix v = random_unitary(4, rng);
    const auto f = gate_fidelity(u, v);
    CHECK(f.average == doctest::Approx((4.0 * f.process + 1.0) / 5.0).epsilon(1e-12));
    CHECK(f.average >= 0.0);
    CHECK(f.average <= 1.0 + 1e-12);
  }
  const auto same = gate_fidelity(ideal_swap(), ideal_swap());
  CHECK(same.average == doctest::Approx(1.0));
  CHECK(same.worst_case_infidelity == doctest::Approx(0.0).epsilon(1e-12));
  // CZ against identity: eigenvalues +-1, the hull contains the origin
  CHECK(gate_fidelity(ideal_cz(), CMatrix::Identity(4, 4)).worst_case_infidelity == doctest::Approx(1.0));
}

TEST_CASE("worst-case infidelity matches a brute-force state search") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix m = near_identity(4, 0.3, rng);
    const double hull = eigenvalue_hull_distance(m);
    double best = 1.0;
    for (int s = 0; s < 50000; ++s) {
      CVector psi(4);
      for (int i = 0; i < 4; ++i) psi(i) = Complex(n(rng), n(rng));
      psi.normalize();
      best = std::min(best, std::abs(psi.dot(m * psi)));
    }
    CHECK(best >= hull - 1e-12);
    CHECK(best <= hull + 2e-2);
  }
}

TEST_CASE("local-Z correction removes arbitrary frame phases") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ph(-kPi, kPi);
  for (int trial = 0; trial < 100; ++trial) {
    LocalZ z{ph(rng), ph(rng)};
    const Complex global = std::polar(1.0, ph(rng));
    for (const CMatrix& target : {ideal_swap(), ideal_cz()}) {
      const CMatrix u = global * z.matrix().adjoint() * target;
      const auto f = local_z_fidelity(u, target);
      CHECK(1.0 - f.average <= 1e-12);
    }
  }
  // a genuine conditional-phase error cannot be corrected away
  CMatrix off = ideal_cz();
  off(3, 3) = std::polar(1.0, kPi - 0.1);
  CHECK(1.0 - local_z_fidelity(off, ideal_cz()).average > 1e-4);
}

TEST_CASE("squared SWAP stays within four times the single-gate error") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix u = ideal_swap() * near_identity(4, 0.02, rng);
    const auto f = local_z_fidelity(u, ideal_swap());
    const CMatrix c = f.corrected;
    const auto twice = local_z_fidelity(c * c, CMatrix::Identity(4, 4));
    CHECK(twice.average >= 1.0 - 4.0 * (1.0 - f.average) - 1e-12);
  }
}

TEST_CASE("conditional phase of a diagonal gate") {
  CMatrix u = CMatrix::Identity(4, 4);
  u(1, 1) = std::polar(1.0, 0.3);
  u(2, 2) = std::polar(1.0, -0.7);
  u(3, 3) = std::polar(1.0, 0.3 - 0.7 + 2.0);
  CHECK(conditional_phase(u) == doctest::Approx(2.0));
  CHECK(wrap_phase(3 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
}

TEST_CASE("decoupled CPB transfers nothing") {
  SystemParams p;
  auto sched = default_swap_schedule(p, 20e-9, 20);
  p.g_c = 0.0;
  auto r = run_swap(sched, p);
  CHECK(std::norm(r.achieved(1, 2)) < 1e-20);
  CHECK(std::norm(r.achieved(2, 2)) == doctest::Approx(1.0));
  CHECK(r.infidelity > 0.4);
}

TEST_CASE("default SWAP sweep transfers g1 <-> e0 but leaks e1 into g2") {
  SystemParams p;
  auto r = run_swap(default_swap_schedule(p, 100e-9, 20), p);
  CHECK(std::norm(r.achieved(2, 1)) >= 0.99);
  CHECK(std::norm(r.achieved(1, 2)) >= 0.99);
  // the adiabatic |e,1> branch ends on |g,2>
  CHECK(r.leakage > 0.2);
  CHECK_FALSE(r.warnings.empty());
  CHECK(r.loss_estimate > 0.0);
}

TEST_CASE("sweep endpoints must respect the detuning contract") {
  SystemParams p;
  PulseSchedule s({0.0, 1e-9}, {{channel::kDeltaCpb, {-5 * kG, 20 * kG}}});
  CHECK_THROWS_AS(run_swap(s, p), AdiabaticityContractError);
}

TEST_CASE("conditional phase follows the adiabatic eigenvalue integral") {
  SystemParams p;
  auto s = default_cphase_schedule(p, 200e-9, 20);
  auto r = run_cphase(s, p);
  CHECK(std::abs(wrap_phase(r.conditional_phase - adiabatic_conditional_phase(s, kG))) < 2e-2);
  CHECK(std::abs(r.conditional_phase) > 1.0);
  CHECK(r.population_loss < 1e-2);

  // far detuned throughout: the phase vanishes like 2 g^2 / delta
  const double far = 1e4 * kG;
  PulseSchedule idle({0.0, 5.0 / kG}, {{channel::kDeltaCpb, {far, far}}});
  auto id = run_cphase(idle, p);
  CHECK(std::abs(id.conditional_phase) < 2e-3);
  CHECK(id.conditional_phase == doctest::Approx(adiabatic_conditional_phase(idle, kG)).epsilon(1e-3));
  // single-excitation dynamic phases are local Z frames
  CHECK(1.0 - local_z_fidelity(id.achieved, CMatrix::Identity(4, 4)).average < 1e-5);
}

// Starting from a finite detuning the bare states differ from the dressed
// ones by an angle g / delta_far, so the gate is diagonal only up to 2 g / delta_far.
TEST_CASE("slow cphase sweep is diagonal up to the endpoint dressing") {
  SystemParams p;
  CMatrix z_cpb = CMatrix::Identity(4, 4);
  z_cpb(2, 2) = z_cpb(3, 3) = -1.0;
  CMatrix z_cav = CMatrix::Identity(4, 4);
  z_cav(1, 1) = z_cav(3, 3) = -1.0;
  for (double far : {20.0, 200.0}) {
    CAPTURE(far);
    SweepSpec spec{SweepShape::cphase, far * kG, 400e-9, kG, 1.0};
    spec.delta_near = 3 * kG;
    auto r = run_cphase(sweep_schedule(spec, 4001), p);
    const double bound = 2.0 / far;
    CHECK(std::abs(r.achieved(1, 2)) <= bound + 1e-8);
    CHECK((r.achieved * z_cpb - z_cpb * r.achieved).norm() <= 2.0 * std::sqrt(2.0) * bound + 1e-8);
    CHECK((r.achieved * z_cav - z_cav * r.achieved).norm() <= 2.0 * std::sqrt(2.0) * bound + 1e-8);
    // no coupling outside the excitation-number blocks
    CHECK(std::abs(r.achieved(0, 1)) + std::abs(r.achieved(0, 2)) + std::abs(r.achieved(0, 3)) < 1e-12);
  }
}

TEST_CASE("CPB rotations") {
  SystemParams p;
  auto id = cpb_rotation(RotationAxis::x, 0.0, p);
  CHECK(id.infidelity == 0.0);
  CHECK(id.duration == 0.0);

  auto x = cpb_rotation(RotationAxis::x, kPi, p);
  CHECK(x.infidelity <= 3e-3);
  CHECK(std::norm(x.achieved(1, 0)) >= 1.0 - 3e-3);
  CHECK(x.duration == doctest::Approx(kPi / (0.5 * kG)));

  auto h1 = cpb_rotation(RotationAxis::x, kPi / 2, p);
  // the 2x2 block composes up to the population left dressed in |g,1>
  CHECK((h1.achieved * h1.achieved - x.achieved).norm() <= 2.0 * std::sqrt(2.0 * h1.leakage) + 1e-7);
  CHECK(1.0 - gate_fidelity(h1.achieved * h1.achieved, x.ideal).average <= 3e-3);

  auto y = cpb_rotation(RotationAxis::y, -kPi / 2, p);
  CHECK(y.infidelity <= 3e-3);
  auto z = cpb_rotation(RotationAxis::z, 1.234, p);
  CHECK(z.infidelity == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(axis_from_string("w"), InvalidArgument);
}

TEST_CASE("dispersive readout model") {
  const auto m = readout_model(kG, kTwoPi * 2e9, 20e-9);
  CHECK(m.chi == doctest::Approx(kTwoPi * 20e6));
  CHECK(m.error < 1e-2);
  CHECK(m.warning.empty());
  const auto shorter = readout_model(kG, kTwoPi * 2e9, 2e-9);
  CHECK(shorter.error > m.error);
  CHECK_FALSE(shorter.warning.empty());
}

TEST_CASE("readout statistics follow the Born rule") {
  auto geom = std::make_shared<const EnsembleGeometry>(make_lattice(10, 1e-3));
  auto reg = std::make_shared<const ModeRegister>(build_register_from_modes(geom, {WaveVector(0, 0, 0)}));
  const auto model = readout_model(kG, kTwoPi * 2e9, 30e-9);
  CMatrix swap = ideal_swap();
  std::mt19937_64 rng(99);

  auto ground = RegisterState::vacuum(reg);
  int wrong = 0;
  for (int s = 0; s < 10000; ++s) wrong += readout(ground, model, rng).reported_excited ? 1 : 0;
  const double eps = model.error;
  CHECK(std::abs(wrong - 1e4 * eps) <= 3.0 * std::sqrt(1e4 * eps * (1 - eps)) + 1.0);

  auto plus = apply_field_operator(RegisterState::vacuum(reg).with_cavity_qubit(kSqrtHalf, kSqrtHalf), swap);
  int excited = 0;
  for (int s = 0; s < 10000; ++s) {
    auto r = readout(plus, model, rng);
    excited += r.cpb_excited ? 1 : 0;
    if (s == 0) CHECK(r.post.norm_squared() == doctest::Approx(1.0));
  }
  CHECK(std::abs(excited - 5000) <= 3.0 * 50.0);
}
