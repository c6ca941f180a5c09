#include <cmath>
#include <random>

#include "doctest.h"
#include "holoreg/collective.hpp"
#include "holoreg/oracle.hpp"

using namespace holoreg;

namespace {

constexpr double kRate = kTwoPi * 5e6;

std::shared_ptr<const ModeRegister> lattice_register(std::size_t k, int n = 400) {
  auto geom = std::make_shared<const EnsembleGeometry>(make_lattice(n, 1e-3));
  const auto angles = angle_schedule(lattice_period_length(*geom), 500e-9, 1, static_cast<int>(k));
  return std::make_shared<const ModeRegister>(build_register(geom, WaveVector(kTwoPi / 500e-9, 0, 0), angles, 1e-9));
}

RegisterConfig single(std::uint32_t mode, Level level, Momentum p) {
  RegisterConfig c;
  c.occupations.push_back({mode, level, p});
  return c;
}

Complex amp(const RegisterState& s, const RegisterConfig& c) {
  auto it = s.amplitudes().find(c);
  return it == s.amplitudes().end() ? Complex(0.0) : it->second;
}

// Distance between density matrices via the trace of the squared difference.
double rho_distance(const CMatrix& a, const CMatrix& b) { return (a - b).norm(); }

}  // namespace

TEST_CASE("momentum arithmetic is exact") {
  const auto q0 = Momentum::mode(0);
  const auto q3 = Momentum::mode(3);
  CHECK((q0 - q0).is_zero());
  CHECK((q0 - q3 + q3) == q0);
  CHECK((q0 - q3).label() == "q0-q3");
  CHECK((q0 + q0).label() == "2q0");
  auto reg = lattice_register(4);
  CHECK((q3 - q0).evaluate(*reg).components.isApprox(reg->mode(3).components - reg->mode(0).components));
}

TEST_CASE("shift_back and shift_forward") {
  auto reg = lattice_register(3);
  auto empty = RegisterState::vacuum(reg);
  auto s = shift_back(empty, 1);
  CHECK(s.amplitudes() == empty.amplitudes());

  auto one = RegisterState::product(reg, {{0, {0.0, 1.0}}});
  auto back = shift_back(one, 1);
  CHECK(amp(back, single(0, Level::m, Momentum::mode(0) - Momentum::mode(1))) == Complex(1.0));
  auto round = shift_forward(back, 1);
  CHECK(state_fidelity(round, one) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(round.amplitudes() == one.amplitudes());

  CHECK_THROWS_AS(shift_forward(one, 1), SequencingError);
  CHECK_THROWS_AS(shift_back(back, 2), SequencingError);
  CHECK_THROWS_AS(shift_forward(back, 2), SequencingError);
  CHECK_THROWS_AS(shift_back(one, 7), InvalidArgument);
}

TEST_CASE("cavity swap on the exact lattice is a clean rotation") {
  auto reg = lattice_register(3);
  auto s = shift_back(RegisterState::vacuum(reg).with_cavity_qubit(0.6, 0.8), 2);
  auto half = cavity_mode_swap(s, SwapDirection::store, 0.5 * swap_duration(kRate), kRate);
  RegisterConfig photon;
  photon.photons = 1;
  CHECK(std::abs(amp(half, photon) - 0.8 * std::cos(kPi / 4)) < 1e-15);
  CHECK(std::abs(amp(half, single(2, Level::m, Momentum())) - 0.8 * std::sin(kPi / 4)) < 1e-15);
  CHECK(half.leakage() == 0.0);

  // empty cavity and empty (m, 0): identity
  auto idle = shift_back(RegisterState::vacuum(reg), 0);
  CHECK(cavity_mode_swap(idle, SwapDirection::store, swap_duration(kRate), kRate).amplitudes() == idle.amplitudes());
  CHECK_THROWS_AS(cavity_mode_swap(RegisterState::vacuum(reg), SwapDirection::store, 1e-9, kRate), SequencingError);
}

TEST_CASE("store and retrieve") {
  auto reg = lattice_register(3);
  const Complex a(0.6, 0.0), b(0.0, 0.8);

  auto stored = store_qubit(RegisterState::vacuum(reg).with_cavity_qubit(a, b), 1, kRate);
  CHECK(stored.cavity_empty());
  CHECK(std::abs(amp(stored, single(1, Level::f, Momentum::mode(1))) - b) < 1e-15);
  CHECK(std::abs(amp(stored, RegisterConfig{}) - a) < 1e-15);

  auto two = store_qubit(stored.with_cavity_qubit(kSqrtHalf, kSqrtHalf), 0, kRate);
  auto expected = RegisterState::product(reg, {{1, {a, b}}, {0, {kSqrtHalf, kSqrtHalf}}});
  CHECK(1.0 - state_fidelity(two, expected) <= 1e-12);

  auto back = retrieve_qubit(two, 0, kRate);
  auto want = RegisterState::product(reg, {{1, {a, b}}}).with_cavity_qubit(kSqrtHalf, kSqrtHalf);
  CHECK(1.0 - state_fidelity(back, want) <= 1e-10);
  CHECK_THROWS_AS(retrieve_qubit(back, 1, kRate), SequencingError);
  CHECK_THROWS_AS(store_qubit(back, 1, kRate), SequencingError);

  auto nothing = retrieve_qubit(stored, 2, kRate);
  CHECK(nothing.cavity_empty());
}

TEST_CASE("imperfect transfers lose population") {
  auto reg = lattice_register(2);
  TransferSettings t;
  t.stirap_efficiency = 0.99;
  t.swap_efficiency = 0.98;
  auto s = store_qubit(RegisterState::vacuum(reg).with_cavity_qubit(0.0, 1.0), 0, kRate, t);
  CHECK(s.norm_squared() == doctest::Approx(0.99 * 0.98));
  CHECK(s.lost_population() == doctest::Approx(1.0 - 0.99 * 0.98));
}

TEST_CASE("jittered register leaks through the Gram factor") {
  auto geom = std::make_shared<const EnsembleGeometry>(jitter(make_lattice(50, 1e-3), 2e-6, 7));
  auto reg = std::make_shared<const ModeRegister>(build_register_from_modes(
      geom, {WaveVector(0, 0, kTwoPi / 1e-3), WaveVector(0, 0, 2 * kTwoPi / 1e-3)}, 0.5));
  TransferSettings t;
  t.leakage_bound = 1e-12;
  auto s = store_qubit(RegisterState::vacuum(reg).with_cavity_qubit(0.0, 1.0), 0, kRate, t);
  s = store_qubit(s.with_cavity_qubit(kSqrtHalf, kSqrtHalf), 1, kRate, t);
  CHECK(s.leakage() > 0.0);
  CHECK_FALSE(s.warnings().empty());
}

TEST_CASE("random operation sequences keep hard-core and spectators intact") {
  const std::size_t k = 6;
  auto reg = lattice_register(k);
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> gauss;
  std::map<std::size_t, std::pair<Complex, Complex>> qubits;
  for (std::size_t i = 0; i < k; i += 2) {
    Complex a(gauss(rng), gauss(rng)), b(gauss(rng), gauss(rng));
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    qubits[i] = {a / n, b / n};
  }
  auto state = RegisterState::product(reg, qubits);
  std::vector<CMatrix> rho0;
  for (std::size_t i = 0; i < k; ++i) rho0.push_back(state.reduced_qubit(i));

  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  for (int step = 0; step < 200; ++step) {
    const std::size_t j = pick(rng);
    // move qubit j through the cavity and put it back, or park it elsewhere
    auto out = retrieve_qubit(state, j, kRate);
    std::size_t dest = j;
    if (step % 3 == 0) {
      for (std::size_t d = 0; d < k; ++d)
        if (!out.mode_occupied(d)) dest = d;
    }
    state = store_qubit(out, dest, kRate);
    if (dest != j) {
      std::swap(rho0[j], rho0[dest]);
    }
    for (const auto& [c, a] : state.amplitudes()) {
      for (std::size_t q = 1; q < c.occupations.size(); ++q) REQUIRE(c.occupations[q - 1].mode_index < c.occupations[q].mode_index);
    }
    for (std::size_t i = 0; i < k; ++i) REQUIRE(rho_distance(state.reduced_qubit(i), rho0[i]) <= 1e-10);
  }
  CHECK(state.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("field operators and CPB projection") {
  auto reg = lattice_register(2);
  CMatrix swap = CMatrix::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = 1.0;
  swap(1, 2) = swap(2, 1) = 1.0;
  auto s = apply_field_operator(RegisterState::vacuum(reg).with_cavity_qubit(0.6, 0.8), swap);
  CHECK(s.cavity_empty());
  auto [pe, post] = project_cpb(s, true);
  CHECK(pe == doctest::Approx(0.64));
  CHECK(post.norm_squared() == doctest::Approx(1.0));
  CHECK_FALSE(post.cpb_idle());
}

TEST_CASE("oracle walkthrough agrees with the effective engine") {
  WalkthroughOptions o;
  o.n_molecules = 8;
  auto r = run_walkthrough(o);
  double worst_step = 0.0;
  for (std::size_t i = 1; i < r.steps.size(); ++i)
    worst_step = std::max(worst_step, r.steps[i].infidelity - r.steps[i - 1].infidelity);
  CHECK(worst_step <= 2e-2);
  CHECK(r.peak_e_el <= 1e-3);

  o.naive = true;
  auto bad = run_walkthrough(o);
  CHECK(bad.peak_e_el > 1e-2);
}
