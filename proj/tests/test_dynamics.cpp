#include <cmath>

#include "doctest.h"
#include "holoreg/dynamics.hpp"

using namespace holoreg;

namespace {

Basis jc_basis() {
  BasisOptions o;
  o.n_molecules = 1;
  o.n_max = 2;
  o.excitation_cap = 2;
  o.include_cpb = true;
  o.levels = {};
  return Basis(o);
}

CMatrix basis_column(const Basis& b, const BasisState& s) {
  CMatrix psi = CMatrix::Zero(static_cast<Eigen::Index>(b.size()), 1);
  psi(static_cast<Eigen::Index>(b.require_index(s)), 0) = 1.0;
  return psi;
}

double population(const CMatrix& psi, const Basis& b, const BasisState& s) {
  return std::norm(psi(static_cast<Eigen::Index>(b.require_index(s)), 0));
}

const BasisState kE0{0, true, {}};
const BasisState kG1{1, false, {}};

}  // namespace

TEST_CASE("zero Hamiltonian leaves the state unchanged") {
  auto b = jc_basis();
  TimeDependentHamiltonian h(static_cast<Eigen::Index>(b.size()));
  h.add(SparseOp(h.dim(), h.dim()));
  const CMatrix psi = basis_column(b, kE0);
  auto r = propagate(psi, h, 0.0, 1e-6);
  CHECK((r.final_state - psi).norm() == 0.0);
}

TEST_CASE("resonant Jaynes-Cummings half Rabi period transfers the excitation") {
  auto b = jc_basis();
  const double g = kTwoPi * 200e6;
  for (Integrator method : {Integrator::rk4, Integrator::magnus4}) {
    TimeDependentHamiltonian h(static_cast<Eigen::Index>(b.size()));
    h.add(build_cpb_hamiltonian(b, g, 0.0));
    PropagationOptions o;
    o.integrator = method;
    o.tolerance = 1e-10;
    auto r = propagate(basis_column(b, kE0), h, 0.0, kPi / (2.0 * g), o);
    CHECK(population(r.final_state, b, kG1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.norm_drift <= 1e-8);
  }
}

TEST_CASE("detuned Rabi oscillation matches the two-level closed form") {
  auto b = jc_basis();
  const double g = 1.3e9;
  for (double delta : {0.5e9, 2.0e9, 7.5e9}) {
    TimeDependentHamiltonian h(static_cast<Eigen::Index>(b.size()));
    h.add(build_cpb_hamiltonian(b, g, delta));
    const double rabi = std::sqrt(delta * delta + 4.0 * g * g);
    for (double t : {0.3 / rabi, kPi / rabi, 4.1 / rabi}) {
      PropagationOptions o;
      o.tolerance = 1e-11;
      auto r = propagate(basis_column(b, kE0), h, 0.0, t, o);
      const double expect = 4.0 * g * g / (rabi * rabi) * std::pow(std::sin(0.5 * rabi * t), 2);
      CHECK(std::abs(population(r.final_state, b, kG1) - expect) < 1e-8);
    }
  }
}

TEST_CASE("time reversal with the conjugated state returns the initial state") {
  auto b = jc_basis();
  const double g = 1.0e9;
  auto sched = std::make_shared<const PulseSchedule>(
      sweep_schedule({SweepShape::swap, 12e9, 20e-9, g, 2.5}, 301));
  auto rev = std::make_shared<const PulseSchedule>(sched->time_reversed());
  auto make = [&](std::shared_ptr<const PulseSchedule> s) {
    TimeDependentHamiltonian h(static_cast<Eigen::Index>(b.size()));
    h.add(build_cpb_hamiltonian(b, g, 0.0));
    h.add(build_cpb_hamiltonian(b, 0.0, 1.0), schedule_channel(s, channel::kDeltaCpb));
    h.add_breakpoints(s->t_grid());
    return h;
  };
  CMatrix psi0 = CMatrix::Zero(static_cast<Eigen::Index>(b.size()), 1);
  psi0(static_cast<Eigen::Index>(b.require_index(kG1)), 0) = Complex(0.6, 0.0);
  psi0(static_cast<Eigen::Index>(b.require_index(BasisState{1, true, {}})), 0) = Complex(0.0, 0.8);
  PropagationOptions o;
  o.tolerance = 1e-10;
  auto fwd = propagate(psi0, make(sched), 0.0, 20e-9, o);
  auto back = propagate(fwd.final_state.conjugate(), make(rev), 0.0, 20e-9, o);
  const Complex ov = psi0.col(0).dot(back.final_state.col(0).conjugate());
  CHECK(1.0 - std::norm(ov) <= 1e-8);
}

TEST_CASE("excitation number and norm are conserved") {
  auto b = enumerate_basis(3, 2, 2, true);
  auto geom = make_lattice(3, 1e-3);
  TimeDependentHamiltonian h(static_cast<Eigen::Index>(b.size()));
  h.add(build_cpb_hamiltonian(b, 1.0e8, 0.0));
  h.add(build_raman_cavity_hamiltonian(geom, b, 3.0e7, 1.0e6), [](double t) { return std::sin(1e8 * t); });
  CMatrix psi = CMatrix::Zero(h.dim(), 1);
  psi(static_cast<Eigen::Index>(b.require_index(BasisState{1, true, {}})), 0) = std::sqrt(0.5);
  psi(static_cast<Eigen::Index>(b.require_index(BasisState{0, false, {{1, Level::m}}})), 0) = std::sqrt(0.5);
  const auto exc = diagonal_operator(b, [](const BasisState& s) { return static_cast<double>(s.excitation_number()); });
  const double before = psi.col(0).dot(exc * psi.col(0)).real();
  PropagationOptions o;
  o.integrator = Integrator::rk4;
  auto r = propagate(psi, h, 0.0, 1e-7, o);
  CHECK(r.norm_drift <= 1e-8);
  const double after = r.final_state.col(0).dot(exc * r.final_state.col(0)).real();
  CHECK(std::abs(after - before) <= 1e-8);
}

TEST_CASE("loss probability from occupancy integrals") {
  auto b = jc_basis();
  TimeDependentHamiltonian h(static_cast<Eigen::Index>(b.size()));
  PropagationOptions o;
  o.photon_number = photon_number_operator(b);
  o.cpb_excited = cpb_excited_operator(b);
  const double t = 3e-6;
  auto r = propagate(basis_column(b, kG1), h, 0.0, t, o);
  CHECK(loss_probability(r, {0.0, 0.0}) == 0.0);
  const double kappa = kTwoPi * 5e3;
  CHECK(loss_probability(r, {kappa, 0.0}) == doctest::Approx(kappa * t).epsilon(1e-12));
  CHECK(loss_probability(r, {kappa, 1e5}) == doctest::Approx(kappa * t).epsilon(1e-12));
}

TEST_CASE("step refinement failure raises an integration error") {
  auto b = jc_basis();
  TimeDependentHamiltonian h(static_cast<Eigen::Index>(b.size()));
  h.add(build_cpb_hamiltonian(b, 1e9, 0.0));
  PropagationOptions o;
  o.integrator = Integrator::rk4;
  o.max_step = 1e-9;
  o.max_refinements = 1;
  o.tolerance = 1e-15;
  CHECK_THROWS_AS(propagate(basis_column(b, kE0), h, 0.0, 1e-7, o), IntegrationError);
}

TEST_CASE("collective Rabi frequency scales as sqrt(N)") {
  const double g_eff = kTwoPi * 1e6;
  CHECK(collective_rabi_frequency(make_lattice(1, 1e-3), g_eff) == doctest::Approx(g_eff).epsilon(1e-6));
  CHECK(collective_rabi_frequency(make_lattice(4, 1e-3), g_eff) == doctest::Approx(2.0 * g_eff).epsilon(1e-6));
  CHECK(collective_rabi_frequency(make_lattice(9, 1e-3), g_eff) == doctest::Approx(3.0 * g_eff).epsilon(1e-6));
}

TEST_CASE("cosine fit rejects short traces") {
  std::vector<double> t{0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> y(t.size(), 0.5);
  CHECK_THROWS_AS(fit_exchange_frequency(t, y), FitError);
}
