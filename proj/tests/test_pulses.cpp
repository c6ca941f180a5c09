#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "holoreg/dynamics.hpp"
#include "holoreg/pulses.hpp"

using namespace holoreg;

namespace {

struct LambdaRun {
  double p_m = 0.0;
  double p_f = 0.0;
  double peak_e = 0.0;
  CMatrix state;
};

Basis lambda_basis() {
  BasisOptions o;
  o.n_molecules = 1;
  o.n_max = 0;
  o.excitation_cap = 1;
  o.levels = {Level::m, Level::f, Level::e_el};
  return Basis(o);
}

LambdaRun run_lambda(const PulseSchedule& sched, const CMatrix& psi0) {
  auto geom = make_lattice(1, 1e-3);
  auto basis = lambda_basis();
  auto s = std::make_shared<const PulseSchedule>(sched);
  auto h = stirap_hamiltonian(geom, basis, s, WaveVector(), WaveVector());
  PropagationOptions o;
  o.trace_stride = 1;
  o.observables.push_back({"e_el", level_population_operator(basis, Level::e_el)});
  auto r = propagate(psi0, h, sched.t0(), sched.t1(), o);
  LambdaRun out;
  const auto im = static_cast<Eigen::Index>(basis.require_index(BasisState{0, false, {{0, Level::m}}}));
  const auto iff = static_cast<Eigen::Index>(basis.require_index(BasisState{0, false, {{0, Level::f}}}));
  out.p_m = std::norm(r.final_state(im, 0));
  out.p_f = std::norm(r.final_state(iff, 0));
  const auto& tr = r.traces.at("e_el");
  out.peak_e = *std::max_element(tr.begin(), tr.end());
  out.state = r.final_state;
  return out;
}

CMatrix start_in(Level l) {
  auto basis = lambda_basis();
  CMatrix psi = CMatrix::Zero(static_cast<Eigen::Index>(basis.size()), 1);
  psi(static_cast<Eigen::Index>(basis.require_index(BasisState{0, false, {{0, l}}})), 0) = 1.0;
  return psi;
}

}  // namespace

TEST_CASE("STIRAP schedule ordering and determinism") {
  auto spec = StirapSpec::standard(50e-9, 20 * kPi);
  auto a = stirap_schedule(spec, 0.0, 50e-9, 501);
  auto b = stirap_schedule(spec, 0.0, 50e-9, 501);
  CHECK(a == b);
  auto argmax = [](const std::vector<double>& v) { return std::max_element(v.begin(), v.end()) - v.begin(); };
  CHECK(argmax(a.samples(channel::kOmega2)) < argmax(a.samples(channel::kOmega1)));
  spec.direction = StirapDirection::inverted;
  auto inv = stirap_schedule(spec, 0.0, 50e-9, 501);
  CHECK(argmax(inv.samples(channel::kOmega2)) > argmax(inv.samples(channel::kOmega1)));
  CHECK_THROWS_AS(stirap_schedule(spec, 0.0, 50e-9, 8), InvalidArgument);
  spec.pulse_delay = 60e-9;
  CHECK_THROWS_AS(stirap_schedule(spec, 0.0, 50e-9, 100), InvalidArgument);
}

TEST_CASE("forward then inverted STIRAP returns to the start state") {
  const double window = 50e-9;
  auto fwd = StirapSpec::standard(window, 20 * kPi);
  auto inv = StirapSpec::standard(window, 20 * kPi, StirapDirection::inverted);
  auto r1 = run_lambda(stirap_schedule(fwd, 0.0, window, 1001), start_in(Level::m));
  CHECK(r1.p_f >= 0.999);
  auto r2 = run_lambda(stirap_schedule(inv, 0.0, window, 1001), r1.state);
  CHECK(r2.p_m >= 1.0 - 1e-3);
}

TEST_CASE("counterintuitive order beats simultaneous pulses of equal area") {
  const double window = 50e-9;
  auto spec = StirapSpec::standard(window, 20 * kPi);
  auto good = run_lambda(stirap_schedule(spec, 0.0, window, 1001), start_in(Level::m));
  spec.pulse_delay = 0.0;
  auto flat = run_lambda(stirap_schedule(spec, 0.0, window, 1001), start_in(Level::m));
  CHECK(flat.p_f < good.p_f);
  CHECK(flat.peak_e > good.peak_e);
}

TEST_CASE("zero peak Rabi frequency is the identity") {
  auto spec = StirapSpec::standard(50e-9, 20 * kPi);
  spec.peak_rabi = 0.0;
  auto r = run_lambda(stirap_schedule(spec, 0.0, 50e-9, 64), start_in(Level::m));
  CHECK(r.p_m == 1.0);
}

TEST_CASE("sweep shapes") {
  const double g = kTwoPi * 200e6;
  SweepSpec swap{SweepShape::swap, 20 * g, 100e-9, g};
  auto s = sweep_schedule(swap, 1001);
  const auto& d = s.samples(channel::kDeltaCpb);
  CHECK(d.front() == -20 * g);
  CHECK(d.back() == 20 * g);
  CHECK(std::abs(d[500]) < 1e-6 * g);
  CHECK(std::is_sorted(d.begin(), d.end()));

  SweepSpec cp{SweepShape::cphase, 20 * g, 40e-9, g, 3.0, 2 * g};
  auto c = sweep_schedule(cp, 801);
  const auto& dc = c.samples(channel::kDeltaCpb);
  CHECK(dc.front() == dc.back());
  CHECK(*std::min_element(dc.begin(), dc.end()) == doctest::Approx(2 * g));
  // symmetric about the midpoint
  for (std::size_t i = 0; i < dc.size(); ++i) CHECK(std::abs(dc[i] - dc[dc.size() - 1 - i]) <= 1e-6 * g);

  SweepSpec bad = swap;
  bad.delta_far = 5 * g;
  CHECK_THROWS_AS(sweep_schedule(bad, 100), AdiabaticityContractError);
}

TEST_CASE("default swap sweep transfers the cavity photon to the CPB") {
  const double g = kTwoPi * 200e6;
  BasisOptions o;
  o.n_molecules = 1;
  o.n_max = 2;
  o.excitation_cap = 2;
  o.include_cpb = true;
  o.levels = {};
  Basis b(o);
  auto sched = std::make_shared<const PulseSchedule>(sweep_schedule({SweepShape::swap, 20 * g, 100e-9, g}, 2001));
  TimeDependentHamiltonian h(static_cast<Eigen::Index>(b.size()));
  h.add(build_cpb_hamiltonian(b, g, 0.0));
  h.add(build_cpb_hamiltonian(b, 0.0, 1.0), schedule_channel(sched, channel::kDeltaCpb));
  h.add_breakpoints(sched->t_grid());
  CMatrix psi = CMatrix::Zero(h.dim(), 1);
  psi(static_cast<Eigen::Index>(b.require_index(BasisState{1, false, {}})), 0) = 1.0;
  auto r = propagate(psi, h, 0.0, 100e-9);
  CHECK(std::norm(r.final_state(static_cast<Eigen::Index>(b.require_index(BasisState{0, true, {}})), 0)) >= 0.99);
}

TEST_CASE("schedule CSV round trip and reversal") {
  auto spec = StirapSpec::standard(50e-9, 20 * kPi);
  auto s = stirap_schedule(spec, 1e-9, 51e-9, 128);
  CHECK(PulseSchedule::from_csv(s.to_csv()) == s);
  CHECK(s.time_reversed().time_reversed().samples(channel::kOmega1) == s.samples(channel::kOmega1));
  CHECK(s.value(channel::kOmega1, 0.0) == s.samples(channel::kOmega1).front());
  CHECK_THROWS_AS(PulseSchedule::from_csv("x,y\n1,2\n"), InvalidArgument);
  CHECK_THROWS_AS(PulseSchedule({0.0, 0.0}, {}), InvalidArgument);
}
