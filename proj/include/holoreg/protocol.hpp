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
#include <map>
#include <random>
#include <string>
#include <vector>

#include "holoreg/collective.hpp"
#include "holoreg/common.hpp"
#include "holoreg/gates.hpp"

namespace holoreg {

enum class GateKind { prepare, rot, cphase, measure };
const char* to_string(GateKind k);
GateKind gate_kind_from_string(const std::string& s);

struct LogicalGate {
  GateKind kind = GateKind::rot;
  std::size_t i = 0;
  std::size_t j = 0;  // cphase target
  RotationAxis axis = RotationAxis::x;
  double angle = 0.0;
  Complex alpha{1.0, 0.0};  // prepare: alpha|0> + beta|1>
  Complex beta{0.0, 0.0};
};

struct LogicalCircuit {
  std::size_t n_qubits = 0;
  std::vector<LogicalGate> gates;

  LogicalCircuit& prepare(std::size_t i, Complex alpha, Complex beta);
  LogicalCircuit& rot(std::size_t i, RotationAxis axis, double angle);
  LogicalCircuit& cphase(std::size_t i, std::size_t j);
  LogicalCircuit& measure(std::size_t i);
};

// Bell pair on qubits 0 and 1: Ry(pi/2) on both, cphase, Ry(-pi/2) on 1.
LogicalCircuit bell_circuit(std::size_t n_qubits = 2);
// Uniformly random rot/cphase gates; angles in (-pi, pi].
LogicalCircuit random_circuit(std::size_t n_qubits, std::size_t n_gates, std::uint64_t seed);

enum class PrimitiveKind { cpb_prepare, retrieve, store, swap_to_cpb, swap_to_cavity, rotation, cphase, readout };
const char* to_string(PrimitiveKind k);

struct Primitive {
  PrimitiveKind kind = PrimitiveKind::retrieve;
  std::size_t gate = 0;   // index of the logical gate it belongs to
  std::size_t qubit = 0;  // mode for retrieve/store, else the logical qubit involved
  RotationAxis axis = RotationAxis::x;
  double angle = 0.0;
  Complex alpha{1.0, 0.0};
  Complex beta{0.0, 0.0};
  double duration = 0.0;
};

// Calibrated building blocks. achieved operators are 4x4 on (CPB, cavity)
// in the order g0, g1, e0, e1, already local-Z corrected.
struct Calibration {
  SystemParams params;
  TransferSettings transfer;
  double stirap_duration = 50e-9;  // one shift_back or shift_forward
  double collective_rate = 0.0;    // 0: params.collective_rate()
  GateReport swap;
  GateReport cphase;
  RotationSettings rotation;
  ReadoutModel readout;
  bool ideal_gates = false;  // exact SWAP/CZ/rotations instead of the reports

  double rate() const { return collective_rate > 0.0 ? collective_rate : params.collective_rate(); }
  double transfer_duration() const { return 2.0 * stirap_duration + swap_duration(rate()); }
  // Exact gates, unit efficiencies, error-free readout; durations from the
  // given swap/cphase durations.
  static Calibration ideal(const SystemParams& params, double swap_time, double cphase_time);
};

// rot(i): retrieve i, swap to CPB, rotation, swap back, store i.
// cphase(i, j): retrieve i, swap to CPB, retrieve j, cphase, store j,
//   swap back, store i.
// measure(i): retrieve i, swap to CPB, readout (CPB reset afterwards).
// prepare(i, psi): CPB prepare, swap to cavity, store i.
std::vector<Primitive> compile(const LogicalCircuit& circuit, std::size_t register_size, const Calibration& cal);

// Walks a sequence tracking where every qubit lives; throws CompileError on
// a cavity or CPB double occupancy or a store/retrieve out of order.
void check_discipline(const std::vector<Primitive>& seq, std::size_t register_size);

struct BudgetReport {
  double total_time = 0.0;  // s
  double cpb_time = 0.0;    // s with a qubit on the CPB or in the cavity
  double coherence_time = 0.0;  // min(T1, T2)
  double coherence_ratio = 0.0;  // total_time / coherence_time
  double cpb_coherence_ratio = 0.0;
  double loss_additive = 0.0;
  double loss_product = 0.0;  // 1 - prod(1 - l)
  double infidelity_additive = 0.0;
  double infidelity_product = 0.0;
  std::size_t operations = 0;
  std::size_t logical_gates = 0;
};

struct TraceRow {
  std::size_t step = 0;
  std::size_t gate = 0;
  PrimitiveKind kind = PrimitiveKind::retrieve;
  std::size_t qubit = 0;
  double t_start = 0.0;
  double duration = 0.0;
  double norm = 0.0;
  double lost = 0.0;
  double leakage = 0.0;
};

struct ExecutionResult {
  RegisterState state;
  BudgetReport budget;
  std::vector<TraceRow> trace;
  std::map<std::size_t, std::vector<bool>> outcomes;  // reported readout bits per qubit
};

// Per-primitive error estimates used by the budget.
double primitive_infidelity(const Primitive& p, const Calibration& cal);
double primitive_loss(const Primitive& p, const Calibration& cal);

BudgetReport budget(const std::vector<Primitive>& seq, const Calibration& cal, std::size_t logical_gates);

ExecutionResult execute(const std::vector<Primitive>& seq, const RegisterState& initial, const Calibration& cal,
                        std::mt19937_64& rng);

// Dense 2^K reference of the unitary part of a circuit (measure gates are
// rejected). Index bit i (LSB first) is qubit i.
CVector reference_statevector(const LogicalCircuit& circuit);

// Fidelity of the logical content of a register state with a dense vector.
double logical_fidelity(const RegisterState& state, const CVector& target);

// Largest n with n * per_gate_time < budget_time.
std::size_t max_gates_within(double per_gate_time, double budget_time);

std::string trace_to_csv(const std::vector<TraceRow>& trace);

}  // namespace holoreg
