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
#include "holoreg/oracle.hpp"
#include "holoreg/protocol.hpp"

using namespace holoreg;

namespace {

std::shared_ptr<const ModeRegister> lattice_register(std::size_t k, int n = 400) {
  auto geom = std::make_shared<const EnsembleGeometry>(make_lattice(n, 1e-3));
  const auto angles = angle_schedule(lattice_period_length(*geom), 500e-9, 1, static_cast<int>(k));
  return std::make_shared<const ModeRegister>(build_register(geom, WaveVector(kTwoPi / 500e-9, 0, 0), angles, 1e-9));
}

const SystemParams kParams;

Calibration ideal_cal() { return Calibration::ideal(kParams, 8.0 / kParams.g_c, 10.0 / kParams.g_c); }

std::vector<PrimitiveKind> kinds(const std::vector<Primitive>& seq) {
  std::vector<PrimitiveKind> out;
  for (const auto& p : seq) out.push_back(p.kind);
  return out;
}

using PK = PrimitiveKind;

}  // namespace

TEST_CASE("gate expansions") {
  const auto cal = ideal_cal();
  LogicalCircuit empty;
  empty.n_qubits = 3;
  CHECK(compile(empty, 3, cal).empty());

  LogicalCircuit c;
  c.n_qubits = 3;
  c.rot(1, RotationAxis::x, 0.3);
  CHECK(kinds(compile(c, 3, cal)) == std::vector<PK>{PK::retrieve, PK::swap_to_cpb, PK::rotation, PK::swap_to_cavity, PK::store});

  c.gates.clear();
  c.cphase(2, 0);
  const auto cp = compile(c, 3, cal);
  CHECK(kinds(cp) == std::vector<PK>{PK::retrieve, PK::swap_to_cpb, PK::retrieve, PK::cphase, PK::store,
                                     PK::swap_to_cavity, PK::store});
  // lower index parked on the CPB
  CHECK(cp[0].qubit == 0);
  CHECK(cp[2].qubit == 2);

  c.gates.clear();
  c.measure(1);
  CHECK(kinds(compile(c, 3, cal)) == std::vector<PK>{PK::retrieve, PK::swap_to_cpb, PK::readout});

  c.gates.clear();
  c.prepare(1, kSqrtHalf, kSqrtHalf);
  CHECK(kinds(compile(c, 3, cal)) == std::vector<PK>{PK::cpb_prepare, PK::swap_to_cavity, PK::store});
}

TEST_CASE("sequence length is linear in the gate count") {
  const auto cal = ideal_cal();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = random_circuit(100, 100, seed);
    std::size_t expected = 0;
    for (const auto& g : c.gates) expected += g.kind == GateKind::rot ? 5 : 7;
    const auto seq = compile(c, 100, cal);
    CHECK(seq.size() == expected);
    CHECK_NOTHROW(check_discipline(seq, 100));
  }
}

TEST_CASE("compile rejects invalid circuits") {
  const auto cal = ideal_cal();
  LogicalCircuit c;
  c.n_qubits = 3;
  c.rot(3, RotationAxis::x, 1.0);
  CHECK_THROWS_AS(compile(c, 3, cal), CompileError);
  c.gates.clear();
  c.cphase(1, 1);
  CHECK_THROWS_AS(compile(c, 3, cal), CompileError);
  c.gates.clear();
  c.measure(0).rot(0, RotationAxis::x, 1.0);
  CHECK_THROWS_WITH_AS(compile(c, 3, cal), doctest::Contains("gate 1 (rot"), CompileError);
  c.gates.clear();
  c.rot(0, RotationAxis::x, 1.0).prepare(0, 1.0, 0.0);
  CHECK_THROWS_AS(compile(c, 3, cal), CompileError);
  c.gates.clear();
  c.prepare(0, 1.0, 1.0);
  CHECK_THROWS_AS(compile(c, 3, cal), CompileError);
  CHECK_THROWS_AS(compile(c, 2, cal), CompileError);
  // measured qubits may be prepared again
  c.gates.clear();
  c.measure(0).prepare(0, 0.0, 1.0).rot(0, RotationAxis::z, 1.0);
  CHECK_NOTHROW(compile(c, 3, cal));

  // cphase while the cavity is occupied
  Primitive r;
  r.kind = PK::retrieve;
  r.qubit = 0;
  Primitive r2 = r;
  r2.qubit = 1;
  CHECK_THROWS_AS(check_discipline({r, r2}, 3), CompileError);
  Primitive cz;
  cz.kind = PK::cphase;
  CHECK_THROWS_AS(check_discipline({cz}, 3), CompileError);
  CHECK_THROWS_AS(check_discipline({r}, 3), CompileError);
}

TEST_CASE("execution matches the dense reference on random circuits") {
  const auto cal = ideal_cal();
  auto reg = lattice_register(4);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    LogicalCircuit c;
    c.n_qubits = 4;
    for (std::size_t q = 0; q < 4; ++q) {
      Complex a(n(rng), n(rng));
      Complex b(n(rng), n(rng));
      const double s = std::sqrt(std::norm(a) + std::norm(b));
      c.prepare(q, a / s, b / s);
    }
    for (const auto& g : random_circuit(4, 30, seed).gates) c.gates.push_back(g);
    const auto res = execute(compile(c, 4, cal), RegisterState::vacuum(reg), cal, rng);
    CHECK(logical_fidelity(res.state, reference_statevector(c)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(res.state.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Bell circuit") {
  const auto c = bell_circuit();
  const CVector ref = reference_statevector(c);
  CHECK(std::abs(ref(0) - kSqrtHalf) < 1e-12);
  CHECK(std::abs(ref(3) + kSqrtHalf) < 1e-12);
  CHECK(std::abs(ref(1)) + std::abs(ref(2)) < 1e-12);

  auto reg = lattice_register(2);
  std::mt19937_64 rng(0);
  const auto cal = ideal_cal();
  const auto res = execute(compile(c, 2, cal), RegisterState::vacuum(reg), cal, rng);
  CHECK(logical_fidelity(res.state, ref) >= 0.999);
  CHECK(res.trace.size() == 5 + 5 + 7 + 5);
  CHECK(res.budget.operations == res.trace.size());
}

TEST_CASE("spectators are untouched") {
  const auto cal = ideal_cal();
  auto reg = lattice_register(6);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  LogicalCircuit c;
  c.n_qubits = 6;
  for (std::size_t q = 0; q < 6; ++q) {
    Complex a(n(rng), n(rng));
    Complex b(n(rng), n(rng));
    const double s = std::sqrt(std::norm(a) + std::norm(b));
    c.prepare(q, a / s, b / s);
  }
  const auto before = execute(compile(c, 6, cal), RegisterState::vacuum(reg), cal, rng).state;
  c.rot(1, RotationAxis::x, 0.7).cphase(1, 4).rot(4, RotationAxis::y, -1.2).cphase(4, 1);
  const auto after = execute(compile(c, 6, cal), RegisterState::vacuum(reg), cal, rng).state;
  for (std::size_t q : {0, 2, 3, 5}) {
    CAPTURE(q);
    CHECK((after.reduced_qubit(q) - before.reduced_qubit(q)).norm() <= 1e-9);
  }
  CHECK((after.reduced_qubit(1) - before.reduced_qubit(1)).norm() > 1e-3);
}

TEST_CASE("prepare then measure follows the Born rule") {
  const auto cal = ideal_cal();
  auto reg = lattice_register(1);
  LogicalCircuit c;
  c.n_qubits = 1;
  const double p1 = 0.3;
  c.prepare(0, std::sqrt(1 - p1), Complex(0.0, std::sqrt(p1))).measure(0);
  const auto seq = compile(c, 1, cal);
  std::mt19937_64 rng(21);
  const int shots = 10000;
  int ones = 0;
  for (int s = 0; s < shots; ++s) {
    const auto res = execute(seq, RegisterState::vacuum(reg), cal, rng);
    ones += res.outcomes.at(0).front() ? 1 : 0;
    if (s == 0) {
      CHECK(res.state.cpb_idle());
      CHECK(res.state.cavity_empty());
      CHECK_FALSE(res.state.mode_occupied(0));
    }
  }
  CHECK(std::abs(ones - shots * p1) <= 3.0 * std::sqrt(shots * p1 * (1 - p1)));
}

TEST_CASE("prepared |1> reads out as 1 at calibrated efficiencies") {
  auto cal = ideal_cal();
  cal.transfer.stirap_efficiency = 0.999;
  cal.readout = readout_model(kParams.g_c, kTwoPi * 2e9, 30e-9);
  auto reg = lattice_register(1);
  LogicalCircuit c;
  c.n_qubits = 1;
  c.prepare(0, 0.0, 1.0).measure(0);
  const auto seq = compile(c, 1, cal);
  std::mt19937_64 rng(5);
  int ones = 0;
  for (int s = 0; s < 2000; ++s) ones += execute(seq, RegisterState::vacuum(reg), cal, rng).outcomes.at(0).front();
  CHECK(ones >= 0.99 * 2000);
}

TEST_CASE("budget accounting") {
  auto cal = ideal_cal();
  cal.transfer.stirap_efficiency = 0.999;
  const auto c = random_circuit(10, 50, 4);
  const auto seq = compile(c, 10, cal);
  const auto b = budget(seq, cal, c.gates.size());
  double total = 0.0;
  for (const auto& p : seq) total += p.duration;
  CHECK(b.total_time == doctest::Approx(total).epsilon(1e-14));
  CHECK(b.cpb_time < b.total_time);
  CHECK(b.coherence_time == doctest::Approx(1e-6));
  CHECK(b.coherence_ratio == doctest::Approx(total / 1e-6));
  CHECK(b.infidelity_additive >= b.infidelity_product);
  CHECK(b.infidelity_product > 0.0);
  CHECK(b.loss_additive >= b.loss_product);
  CHECK(b.operations == seq.size());

  CHECK(max_gates_within(1e-9, 1e-6) == 999);
  CHECK(max_gates_within(3e-9, 1e-6) == 333);
  CHECK(max_gates_within(2e-6, 1e-6) == 0);
}

TEST_CASE("trace rows") {
  const auto cal = ideal_cal();
  auto reg = lattice_register(2);
  std::mt19937_64 rng(1);
  const auto c = bell_circuit();
  const auto res = execute(compile(c, 2, cal), RegisterState::vacuum(reg), cal, rng);
  for (std::size_t i = 1; i < res.trace.size(); ++i)
    CHECK(res.trace[i].t_start == doctest::Approx(res.trace[i - 1].t_start + res.trace[i - 1].duration));
  const auto csv = trace_to_csv(res.trace);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(res.trace.size() + 1));
}
