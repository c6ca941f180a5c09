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

#include "holoreg/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>
#include <sstream>
#include <tuple>

namespace holoreg {

namespace {

const char* const kGateNames[] = {"prepare", "rot", "cphase", "measure"};
const char* const kPrimitiveNames[] = {"cpb_prepare", "retrieve", "store", "swap_to_cpb",
                                       "swap_to_cavity", "rotation", "cphase", "readout"};

std::string describe(const LogicalGate& g, std::size_t index) {
  std::ostringstream os;
  os << "gate " << index << " (" << to_string(g.kind) << " on qubit " << g.i;
  if (g.kind == GateKind::cphase) os << ", " << g.j;
  os << ")";
  return os.str();
}

// Operator on (CPB, cavity) acting as u2 on the CPB.
CMatrix on_cpb(const CMatrix& u2) {
  CMatrix u = CMatrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int n = 0; n < 2; ++n) u(2 * a + n, 2 * b + n) = u2(a, b);
  return u;
}

double prepare_angle(Complex alpha, Complex beta) { return 2.0 * std::atan2(std::abs(beta), std::abs(alpha)); }

double rabi(const Calibration& cal) {
  return cal.rotation.rabi > 0.0 ? cal.rotation.rabi : 0.5 * cal.params.g_c;
}

double rotation_time(RotationAxis axis, double angle, const Calibration& cal) {
  return axis == RotationAxis::z ? 0.0 : std::abs(angle) / rabi(cal);
}

class RotationCache {
 public:
  explicit RotationCache(const Calibration& cal) : cal_(cal) {}

  const GateReport& get(RotationAxis axis, double angle) {
    const auto key = std::make_pair(static_cast<int>(axis), angle);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      GateReport r;
      if (cal_.ideal_gates) {
        r.achieved = r.ideal = rotation_matrix(axis, angle);
        r.duration = rotation_time(axis, angle, cal_);
      } else {
        r = cpb_rotation(axis, angle, cal_.params, cal_.rotation);
      }
      it = cache_.emplace(key, std::move(r)).first;
    }
    return it->second;
  }

 private:
  const Calibration& cal_;
  std::map<std::pair<int, double>, GateReport> cache_;
};

CMatrix prepare_operator(Complex alpha, Complex beta, const CMatrix& ry) {
  CMatrix phases = CMatrix::Zero(2, 2);
  phases(0, 0) = std::abs(alpha) > 0.0 ? alpha / std::abs(alpha) : Complex(1.0);
  phases(1, 1) = std::abs(beta) > 0.0 ? beta / std::abs(beta) : Complex(1.0);
  return phases * ry;
}

double gate_infidelity(const Primitive& p, const Calibration& cal, RotationCache& rot) {
  const auto& t = cal.transfer;
  switch (p.kind) {
    case PrimitiveKind::retrieve:
    case PrimitiveKind::store:
      return 2.0 * (1.0 - t.stirap_efficiency) + (1.0 - t.swap_efficiency);
    case PrimitiveKind::swap_to_cpb:
    case PrimitiveKind::swap_to_cavity:
      return cal.ideal_gates ? 0.0 : cal.swap.infidelity;
    case PrimitiveKind::cphase:
      return cal.ideal_gates ? 0.0 : cal.cphase.infidelity;
    case PrimitiveKind::rotation:
      return rot.get(p.axis, p.angle).infidelity;
    case PrimitiveKind::cpb_prepare:
      return rot.get(RotationAxis::y, prepare_angle(p.alpha, p.beta)).infidelity;
    case PrimitiveKind::readout:
      return cal.readout.error;
  }
  return 0.0;
}

double gate_loss(const Primitive& p, const Calibration& cal, RotationCache& rot) {
  switch (p.kind) {
    case PrimitiveKind::retrieve:
    case PrimitiveKind::store:
      // the photon spends on average half the Raman swap in the cavity
      return 0.5 * cal.params.kappa * swap_duration(cal.rate());
    case PrimitiveKind::swap_to_cpb:
    case PrimitiveKind::swap_to_cavity:
      return cal.ideal_gates ? 0.0 : cal.swap.loss_estimate;
    case PrimitiveKind::cphase:
      return cal.ideal_gates ? 0.0 : cal.cphase.loss_estimate;
    case PrimitiveKind::rotation:
      return rot.get(p.axis, p.angle).loss_estimate;
    case PrimitiveKind::cpb_prepare:
      return rot.get(RotationAxis::y, prepare_angle(p.alpha, p.beta)).loss_estimate;
    case PrimitiveKind::readout:
      return 0.0;
  }
  return 0.0;
}

// Drops amplitude left in a field mode the sequence treats as empty (swap
// residues of calibrated gates) and books it as loss.
void purge_residual(RegisterState& s, bool cavity_busy, bool cpb_busy) {
  double dropped = 0.0;
  auto& amps = s.amplitudes();
  for (auto it = amps.begin(); it != amps.end();) {
    if ((!cavity_busy && it->first.photons > 0) || (!cpb_busy && it->first.cpb_excited)) {
      dropped += std::norm(it->second);
      it = amps.erase(it);
    } else {
      ++it;
    }
  }
  if (dropped > 0.0) s.note_loss(dropped);
}

bool uses_cpb(PrimitiveKind k) { return k != PrimitiveKind::retrieve && k != PrimitiveKind::store; }

}  // namespace

const char* to_string(GateKind k) { return kGateNames[static_cast<int>(k)]; }

GateKind gate_kind_from_string(const std::string& s) {
  for (int i = 0; i < 4; ++i)
    if (s == kGateNames[i]) return static_cast<GateKind>(i);
  throw InvalidArgument("unknown gate '" + s + "' (expected prepare, rot, cphase or measure)");
}

const char* to_string(PrimitiveKind k) { return kPrimitiveNames[static_cast<int>(k)]; }

LogicalCircuit& LogicalCircuit::prepare(std::size_t i, Complex alpha, Complex beta) {
  LogicalGate g;
  g.kind = GateKind::prepare;
  g.i = i;
  g.alpha = alpha;
  g.beta = beta;
  gates.push_back(g);
  return *this;
}

LogicalCircuit& LogicalCircuit::rot(std::size_t i, RotationAxis axis, double angle) {
  LogicalGate g;
  g.kind = GateKind::rot;
  g.i = i;
  g.axis = axis;
  g.angle = angle;
  gates.push_back(g);
  return *this;
}

LogicalCircuit& LogicalCircuit::cphase(std::size_t i, std::size_t j) {
  LogicalGate g;
  g.kind = GateKind::cphase;
  g.i = i;
  g.j = j;
  gates.push_back(g);
  return *this;
}

LogicalCircuit& LogicalCircuit::measure(std::size_t i) {
  LogicalGate g;
  g.kind = GateKind::measure;
  g.i = i;
  gates.push_back(g);
  return *this;
}

LogicalCircuit bell_circuit(std::size_t n_qubits) {
  require(n_qubits >= 2, "a Bell circuit needs two qubits");
  LogicalCircuit c;
  c.n_qubits = n_qubits;
  c.rot(0, RotationAxis::y, kPi / 2).rot(1, RotationAxis::y, kPi / 2).cphase(0, 1).rot(1, RotationAxis::y, -kPi / 2);
  return c;
}

LogicalCircuit random_circuit(std::size_t n_qubits, std::size_t n_gates, std::uint64_t seed) {
  require(n_qubits >= 1, "random circuit needs at least one qubit");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> qubit(0, n_qubits - 1);
  std::uniform_int_distribution<int> axis(0, 2);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::bernoulli_distribution two_qubit(n_qubits >= 2 ? 0.5 : 0.0);
  LogicalCircuit c;
  c.n_qubits = n_qubits;
  while (c.gates.size() < n_gates) {
    if (two_qubit(rng)) {
      const std::size_t i = qubit(rng);
      std::size_t j = qubit(rng);
      if (i == j) continue;
      c.cphase(i, j);
    } else {
      const std::size_t i = qubit(rng);
      const auto ax = static_cast<RotationAxis>(axis(rng));
      c.rot(i, ax, -angle(rng));
    }
  }
  return c;
}

Calibration Calibration::ideal(const SystemParams& params, double swap_time, double cphase_time) {
  Calibration c;
  c.params = params;
  c.ideal_gates = true;
  c.swap.target = "swap";
  c.swap.achieved = c.swap.ideal = ideal_swap();
  c.swap.duration = swap_time;
  c.cphase.target = "cphase";
  c.cphase.achieved = c.cphase.ideal = ideal_cz();
  c.cphase.duration = cphase_time;
  c.cphase.conditional_phase = kPi;
  c.readout.error = 0.0;
  return c;
}

std::vector<Primitive> compile(const LogicalCircuit& circuit, std::size_t register_size, const Calibration& cal) {
  enum class Status { fresh, active, measured };
  if (circuit.n_qubits > register_size) {
    throw CompileError("circuit uses " + std::to_string(circuit.n_qubits) + " qubits but the register holds " +
                       std::to_string(register_size));
  }
  std::vector<Status> status(circuit.n_qubits, Status::fresh);
  std::vector<Primitive> seq;
  const double transfer = cal.transfer_duration();
  auto emit = [&](PrimitiveKind kind, std::size_t gate, std::size_t qubit, double duration) -> Primitive& {
    Primitive p;
    p.kind = kind;
    p.gate = gate;
    p.qubit = qubit;
    p.duration = duration;
    seq.push_back(p);
    return seq.back();
  };
  for (std::size_t n = 0; n < circuit.gates.size(); ++n) {
    const LogicalGate& g = circuit.gates[n];
    auto fail = [&](const std::string& why) { throw CompileError(describe(g, n) + ": " + why); };
    auto live = [&](std::size_t q) {
      if (q >= circuit.n_qubits) fail("qubit index out of range");
      if (status[q] == Status::measured) fail("qubit " + std::to_string(q) + " was measured and not re-prepared");
    };
    switch (g.kind) {
      case GateKind::prepare: {
        if (g.i >= circuit.n_qubits) fail("qubit index out of range");
        if (status[g.i] == Status::active) fail("prepare needs a fresh or measured qubit");
        const double norm = std::norm(g.alpha) + std::norm(g.beta);
        if (std::abs(norm - 1.0) > 1e-9) fail("prepare amplitudes are not normalized");
        const double theta = prepare_angle(g.alpha, g.beta);
        Primitive& p = emit(PrimitiveKind::cpb_prepare, n, g.i, rotation_time(RotationAxis::y, theta, cal));
        p.alpha = g.alpha;
        p.beta = g.beta;
        emit(PrimitiveKind::swap_to_cavity, n, g.i, cal.swap.duration);
        emit(PrimitiveKind::store, n, g.i, transfer);
        status[g.i] = Status::active;
        break;
      }
      case GateKind::rot: {
        live(g.i);
        emit(PrimitiveKind::retrieve, n, g.i, transfer);
        emit(PrimitiveKind::swap_to_cpb, n, g.i, cal.swap.duration);
        Primitive& p = emit(PrimitiveKind::rotation, n, g.i, rotation_time(g.axis, g.angle, cal));
        p.axis = g.axis;
        p.angle = g.angle;
        emit(PrimitiveKind::swap_to_cavity, n, g.i, cal.swap.duration);
        emit(PrimitiveKind::store, n, g.i, transfer);
        status[g.i] = Status::active;
        break;
      }
      case GateKind::cphase: {
        live(g.i);
        live(g.j);
        if (g.i == g.j) fail("cphase needs two distinct qubits");
        // symmetric gate; the lower index is parked on the CPB
        const std::size_t c = std::min(g.i, g.j);
        const std::size_t t = std::max(g.i, g.j);
        emit(PrimitiveKind::retrieve, n, c, transfer);
        emit(PrimitiveKind::swap_to_cpb, n, c, cal.swap.duration);
        emit(PrimitiveKind::retrieve, n, t, transfer);
        Primitive& p = emit(PrimitiveKind::cphase, n, c, cal.cphase.duration);
        p.axis = RotationAxis::z;
        emit(PrimitiveKind::store, n, t, transfer);
        emit(PrimitiveKind::swap_to_cavity, n, c, cal.swap.duration);
        emit(PrimitiveKind::store, n, c, transfer);
        status[c] = status[t] = Status::active;
        break;
      }
      case GateKind::measure: {
        live(g.i);
        emit(PrimitiveKind::retrieve, n, g.i, transfer);
        emit(PrimitiveKind::swap_to_cpb, n, g.i, cal.swap.duration);
        emit(PrimitiveKind::readout, n, g.i, cal.readout.probe_duration);
        status[g.i] = Status::measured;
        break;
      }
    }
  }
  check_discipline(seq, register_size);
  return seq;
}

void check_discipline(const std::vector<Primitive>& seq, std::size_t register_size) {
  enum class Where { memory, cavity, cpb };
  std::map<std::size_t, Where> where;
  std::optional<std::size_t> cavity;
  std::optional<std::size_t> cpb;
  auto loc = [&](std::size_t q) {
    auto it = where.find(q);
    return it == where.end() ? Where::memory : it->second;
  };
  for (std::size_t s = 0; s < seq.size(); ++s) {
    const Primitive& p = seq[s];
    const std::size_t q = p.qubit;
    auto fail = [&](const std::string& why) {
      throw CompileError("step " + std::to_string(s) + " (" + to_string(p.kind) + ", gate " +
                         std::to_string(p.gate) + ", qubit " + std::to_string(q) + "): " + why);
    };
    if (q >= register_size) fail("qubit outside the register");
    switch (p.kind) {
      case PrimitiveKind::cpb_prepare:
        if (loc(q) != Where::memory) fail("qubit is not parked in the ensemble");
        if (cpb) fail("CPB is busy");
        cpb = q;
        where[q] = Where::cpb;
        break;
      case PrimitiveKind::retrieve:
        if (loc(q) != Where::memory) fail("qubit is not in the ensemble");
        if (cavity) fail("cavity is occupied");
        cavity = q;
        where[q] = Where::cavity;
        break;
      case PrimitiveKind::store:
        if (loc(q) != Where::cavity) fail("qubit is not in the cavity");
        cavity.reset();
        where[q] = Where::memory;
        break;
      case PrimitiveKind::swap_to_cpb:
        if (loc(q) != Where::cavity) fail("qubit is not in the cavity");
        if (cpb) fail("CPB is busy");
        cavity.reset();
        cpb = q;
        where[q] = Where::cpb;
        break;
      case PrimitiveKind::swap_to_cavity:
        if (loc(q) != Where::cpb) fail("qubit is not on the CPB");
        if (cavity) fail("cavity is occupied");
        cpb.reset();
        cavity = q;
        where[q] = Where::cavity;
        break;
      case PrimitiveKind::rotation:
        if (loc(q) != Where::cpb) fail("qubit is not on the CPB");
        break;
      case PrimitiveKind::cphase:
        if (loc(q) != Where::cpb) fail("control qubit is not on the CPB");
        if (!cavity) fail("cavity holds no target qubit");
        break;
      case PrimitiveKind::readout:
        if (loc(q) != Where::cpb) fail("qubit is not on the CPB");
        cpb.reset();
        where[q] = Where::memory;
        break;
    }
  }
  if (cavity || cpb) throw CompileError("sequence ends with a qubit outside the ensemble");
}

double primitive_infidelity(const Primitive& p, const Calibration& cal) {
  RotationCache rot(cal);
  return gate_infidelity(p, cal, rot);
}

double primitive_loss(const Primitive& p, const Calibration& cal) {
  RotationCache rot(cal);
  return gate_loss(p, cal, rot);
}

BudgetReport budget(const std::vector<Primitive>& seq, const Calibration& cal, std::size_t logical_gates) {
  BudgetReport b;
  RotationCache rot(cal);
  double keep_loss = 1.0;
  double keep_fid = 1.0;
  for (const auto& p : seq) {
    b.total_time += p.duration;
    if (uses_cpb(p.kind)) b.cpb_time += p.duration;
    const double l = gate_loss(p, cal, rot);
    const double e = gate_infidelity(p, cal, rot);
    b.loss_additive += l;
    b.infidelity_additive += e;
    keep_loss *= 1.0 - l;
    keep_fid *= 1.0 - e;
  }
  b.loss_product = 1.0 - keep_loss;
  b.infidelity_product = 1.0 - keep_fid;
  b.operations = seq.size();
  b.logical_gates = logical_gates;
  b.coherence_time = 1.0 / std::max(cal.params.gamma_cpb, cal.params.gamma_phi);
  b.coherence_ratio = b.total_time / b.coherence_time;
  b.cpb_coherence_ratio = b.cpb_time / b.coherence_time;
  return b;
}

ExecutionResult execute(const std::vector<Primitive>& seq, const RegisterState& initial, const Calibration& cal,
                        std::mt19937_64& rng) {
  ExecutionResult out{initial, {}, {}, {}};
  RotationCache rot(cal);
  const double rate = cal.rate();
  const CMatrix swap = cal.ideal_gates ? ideal_swap() : cal.swap.fidelity.corrected;
  const CMatrix cz = cal.ideal_gates ? ideal_cz() : cal.cphase.fidelity.corrected;
  CMatrix flip = CMatrix::Zero(2, 2);
  flip(0, 1) = flip(1, 0) = 1.0;
  double t = 0.0;
  bool cavity_busy = !initial.cavity_empty();
  bool cpb_busy = !initial.cpb_idle();
  RegisterState& s = out.state;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    const Primitive& p = seq[n];
    switch (p.kind) {
      case PrimitiveKind::retrieve:
        s = retrieve_qubit(s, p.qubit, rate, cal.transfer);
        break;
      case PrimitiveKind::store:
        s = store_qubit(s, p.qubit, rate, cal.transfer);
        break;
      case PrimitiveKind::swap_to_cpb:
      case PrimitiveKind::swap_to_cavity:
        s = apply_field_operator(s, swap);
        break;
      case PrimitiveKind::cphase:
        s = apply_field_operator(s, cz);
        break;
      case PrimitiveKind::rotation:
        s = apply_field_operator(s, on_cpb(rot.get(p.axis, p.angle).achieved));
        break;
      case PrimitiveKind::cpb_prepare: {
        const CMatrix& ry = rot.get(RotationAxis::y, prepare_angle(p.alpha, p.beta)).achieved;
        s = apply_field_operator(s, on_cpb(prepare_operator(p.alpha, p.beta, ry)));
        break;
      }
      case PrimitiveKind::readout: {
        auto r = readout(s, cal.readout, rng);
        out.outcomes[p.qubit].push_back(r.reported_excited);
        s = std::move(r.post);
        // reset the CPB so the qubit returns to |0>
        if (r.cpb_excited) s = apply_field_operator(s, on_cpb(flip));
        break;
      }
    }
    switch (p.kind) {
      case PrimitiveKind::retrieve:
        cavity_busy = true;
        break;
      case PrimitiveKind::store:
        cavity_busy = false;
        break;
      case PrimitiveKind::swap_to_cpb:
        cavity_busy = false;
        cpb_busy = true;
        break;
      case PrimitiveKind::swap_to_cavity:
        cavity_busy = true;
        cpb_busy = false;
        break;
      case PrimitiveKind::cpb_prepare:
        cpb_busy = true;
        break;
      case PrimitiveKind::readout:
        cpb_busy = false;
        break;
      default:
        break;
    }
    s.prune();
    purge_residual(s, cavity_busy, cpb_busy);
    out.trace.push_back({n, p.gate, p.kind, p.qubit, t, p.duration, s.norm_squared(), s.lost_population(),
                         s.leakage()});
    t += p.duration;
  }
  std::size_t logical = 0;
  for (const auto& p : seq) logical = std::max(logical, p.gate + 1);
  out.budget = budget(seq, cal, logical);
  return out;
}

CVector reference_statevector(const LogicalCircuit& circuit) {
  const std::size_t k = circuit.n_qubits;
  require(k >= 1 && k <= 20, "reference simulation supports 1 to 20 qubits");
  const std::size_t dim = std::size_t{1} << k;
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(dim));
  psi(0) = 1.0;
  auto apply1 = [&](std::size_t q, const CMatrix& u) {
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t idx = 0; idx < dim; ++idx) {
      if (idx & bit) continue;
      const auto a = static_cast<Eigen::Index>(idx);
      const auto b = static_cast<Eigen::Index>(idx | bit);
      const Complex x0 = psi(a);
      const Complex x1 = psi(b);
      psi(a) = u(0, 0) * x0 + u(0, 1) * x1;
      psi(b) = u(1, 0) * x0 + u(1, 1) * x1;
    }
  };
  for (std::size_t n = 0; n < circuit.gates.size(); ++n) {
    const auto& g = circuit.gates[n];
    require(g.i < k && (g.kind != GateKind::cphase || g.j < k), describe(g, n) + ": qubit index out of range");
    switch (g.kind) {
      case GateKind::prepare:
        apply1(g.i, prepare_operator(g.alpha, g.beta, rotation_matrix(RotationAxis::y, prepare_angle(g.alpha, g.beta))));
        break;
      case GateKind::rot:
        apply1(g.i, rotation_matrix(g.axis, g.angle));
        break;
      case GateKind::cphase: {
        const std::size_t mask = (std::size_t{1} << g.i) | (std::size_t{1} << g.j);
        for (std::size_t idx = 0; idx < dim; ++idx)
          if ((idx & mask) == mask) psi(static_cast<Eigen::Index>(idx)) *= -1.0;
        break;
      }
      case GateKind::measure:
        throw InvalidArgument(describe(g, n) + ": the reference simulation has no measurement");
    }
  }
  return psi;
}

double logical_fidelity(const RegisterState& state, const CVector& target) {
  require(state.qubit_count() <= 20 && target.size() == (Eigen::Index{1} << state.qubit_count()),
          "target dimension does not match the register");
  Complex overlap = 0.0;
  for (const auto& [bits, amp] : state.logical_amplitudes()) {
    std::size_t idx = 0;
    for (std::size_t q = 0; q < bits.size(); ++q)
      if (bits[q]) idx |= std::size_t{1} << q;
    overlap += std::conj(target(static_cast<Eigen::Index>(idx))) * amp;
  }
  return std::norm(overlap) / target.squaredNorm();
}

std::size_t max_gates_within(double per_gate_time, double budget_time) {
  require(per_gate_time > 0.0 && budget_time > 0.0, "gate time and budget must be positive");
  const double n = std::ceil(budget_time / per_gate_time) - 1.0;
  return n <= 0.0 ? 0 : static_cast<std::size_t>(n);
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "step,gate,kind,qubit,t_start_s,duration_s,norm,lost,leakage\n";
  for (const auto& r : trace) {
    os << r.step << ',' << r.gate << ',' << to_string(r.kind) << ',' << r.qubit << ',' << r.t_start << ','
       << r.duration << ',' << r.norm << ',' << r.lost << ',' << r.leakage << '\n';
  }
  return os.str();
}

}  // namespace holoreg
