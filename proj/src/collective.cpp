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

#include "holoreg/collective.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace holoreg {

namespace {

RegisterState emptied(const RegisterState& s) {
  RegisterState out = s;
  out.amplitudes().clear();
  return out;
}

void insert_occupation(RegisterConfig& c, ModeOccupation occ) {
  auto pos = std::lower_bound(c.occupations.begin(), c.occupations.end(), occ,
                              [](const ModeOccupation& a, const ModeOccupation& b) {
                                return a.mode_index < b.mode_index;
                              });
  if (pos != c.occupations.end() && pos->mode_index == occ.mode_index) {
    throw SequencingError("hard-core violation: mode " + std::to_string(occ.mode_index) + " already occupied");
  }
  c.occupations.insert(pos, std::move(occ));
}

}  // namespace

Momentum Momentum::mode(std::size_t k) {
  Momentum m;
  m.terms_.emplace_back(static_cast<std::uint32_t>(k), 1);
  return m;
}

Momentum Momentum::operator+(const Momentum& o) const {
  Momentum out;
  std::size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    if (j == o.terms_.size() || (i < terms_.size() && terms_[i].first < o.terms_[j].first)) {
      out.terms_.push_back(terms_[i++]);
    } else if (i == terms_.size() || o.terms_[j].first < terms_[i].first) {
      out.terms_.push_back(o.terms_[j++]);
    } else {
      const int c = terms_[i].second + o.terms_[j].second;
      if (c != 0) out.terms_.emplace_back(terms_[i].first, c);
      ++i;
      ++j;
    }
  }
  return out;
}

Momentum Momentum::operator-(const Momentum& o) const {
  Momentum neg = o;
  for (auto& t : neg.terms_) t.second = -t.second;
  return *this + neg;
}

WaveVector Momentum::evaluate(const ModeRegister& reg) const {
  Vec3 v = Vec3::Zero();
  for (const auto& [k, c] : terms_) v += static_cast<double>(c) * reg.mode(k).components;
  return WaveVector(v);
}

std::string Momentum::label() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (c < 0) os << "-";
    else if (!first) os << "+";
    if (std::abs(c) != 1) os << std::abs(c);
    os << "q" << k;
    first = false;
  }
  return os.str();
}

const ModeOccupation* RegisterConfig::find(std::uint32_t mode) const {
  for (const auto& o : occupations)
    if (o.mode_index == mode) return &o;
  return nullptr;
}

std::string RegisterConfig::label() const {
  std::ostringstream os;
  os << "|" << photons << "," << (cpb_excited ? "e" : "g");
  for (const auto& o : occupations) os << "," << to_string(o.level) << o.mode_index << "@" << o.momentum.label();
  os << ">";
  return os.str();
}

RegisterState::RegisterState(std::shared_ptr<const ModeRegister> reg) : reg_(std::move(reg)) {
  require(reg_ != nullptr, "register state needs a mode register");
}

RegisterState RegisterState::vacuum(std::shared_ptr<const ModeRegister> reg) {
  RegisterState s(std::move(reg));
  s.amps_[RegisterConfig{}] = 1.0;
  return s;
}

RegisterState RegisterState::product(std::shared_ptr<const ModeRegister> reg,
                                     const std::map<std::size_t, std::pair<Complex, Complex>>& qubits) {
  RegisterState s = vacuum(reg);
  for (const auto& [i, ab] : qubits) {
    require(i < s.qubit_count(), "qubit index out of range");
    Amplitudes next;
    for (const auto& [c, a] : s.amps_) {
      if (ab.first != 0.0) next[c] += a * ab.first;
      if (ab.second != 0.0) {
        RegisterConfig c1 = c;
        insert_occupation(c1, {static_cast<std::uint32_t>(i), Level::f, Momentum::mode(i)});
        next[c1] += a * ab.second;
      }
    }
    s.amps_ = std::move(next);
  }
  return s;
}

RegisterState RegisterState::logical(std::shared_ptr<const ModeRegister> reg,
                                     const std::map<std::vector<bool>, Complex>& amplitudes) {
  RegisterState s(std::move(reg));
  for (const auto& [bits, a] : amplitudes) {
    require(bits.size() == s.qubit_count(), "logical bit string length must equal the register size");
    RegisterConfig c;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i]) c.occupations.push_back({static_cast<std::uint32_t>(i), Level::f, Momentum::mode(i)});
    s.add(c, a);
  }
  return s;
}

double RegisterState::norm_squared() const {
  double n = 0.0;
  for (const auto& [c, a] : amps_) n += std::norm(a);
  return n;
}

bool RegisterState::cavity_empty(double tol) const {
  return std::none_of(amps_.begin(), amps_.end(),
                      [tol](const auto& kv) { return kv.first.photons > 0 && std::abs(kv.second) > tol; });
}

bool RegisterState::cpb_idle(double tol) const {
  return std::none_of(amps_.begin(), amps_.end(),
                      [tol](const auto& kv) { return kv.first.cpb_excited && std::abs(kv.second) > tol; });
}

bool RegisterState::mode_occupied(std::size_t j, double tol) const {
  return std::any_of(amps_.begin(), amps_.end(), [&](const auto& kv) {
    return kv.first.find(static_cast<std::uint32_t>(j)) != nullptr && std::abs(kv.second) > tol;
  });
}

void RegisterState::add(const RegisterConfig& c, Complex amp) {
  require(c.photons == 0 || c.photons == 1, "effective engine holds at most one cavity photon");
  for (std::size_t k = 0; k < c.occupations.size(); ++k) {
    const auto& o = c.occupations[k];
    require(o.mode_index < qubit_count(), "occupation mode index out of range");
    require(o.level == Level::f || o.level == Level::m, "occupations live in f or m");
    if (k > 0 && c.occupations[k - 1].mode_index >= o.mode_index) {
      throw SequencingError("hard-core violation: occupations must be unique and sorted by mode");
    }
  }
  amps_[c] += amp;
}

void RegisterState::prune(double tol) {
  std::erase_if(amps_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

RegisterState RegisterState::with_cavity_qubit(Complex alpha, Complex beta) const {
  if (!cavity_empty()) throw SequencingError("cannot load a qubit onto an occupied cavity");
  RegisterState out = emptied(*this);
  for (const auto& [c, a] : amps_) {
    if (alpha != 0.0) out.amps_[c] += alpha * a;
    if (beta != 0.0) {
      RegisterConfig c1 = c;
      c1.photons = 1;
      out.amps_[c1] += beta * a;
    }
  }
  return out;
}

std::map<std::vector<bool>, Complex> RegisterState::logical_amplitudes() const {
  std::map<std::vector<bool>, Complex> out;
  for (const auto& [c, a] : amps_) {
    if (c.photons != 0 || c.cpb_excited) continue;
    std::vector<bool> bits(qubit_count(), false);
    bool logical = true;
    for (const auto& o : c.occupations) {
      if (o.level != Level::f || o.momentum != Momentum::mode(o.mode_index)) {
        logical = false;
        break;
      }
      bits[o.mode_index] = true;
    }
    if (logical) out[bits] += a;
  }
  return out;
}

CMatrix RegisterState::reduced_qubit(std::size_t i) const {
  require(i < qubit_count(), "qubit index out of range");
  std::map<RegisterConfig, std::pair<Complex, Complex>> groups;
  const auto mode = static_cast<std::uint32_t>(i);
  for (const auto& [c, a] : amps_) {
    const ModeOccupation* o = c.find(mode);
    if (o == nullptr) {
      groups[c].first += a;
    } else if (o->level == Level::f && o->momentum == Momentum::mode(i)) {
      RegisterConfig rest = c;
      std::erase_if(rest.occupations, [mode](const ModeOccupation& x) { return x.mode_index == mode; });
      groups[rest].second += a;
    }
  }
  CMatrix rho = CMatrix::Zero(2, 2);
  for (const auto& [rest, ab] : groups) {
    rho(0, 0) += std::norm(ab.first);
    rho(1, 1) += std::norm(ab.second);
    rho(1, 0) += ab.second * std::conj(ab.first);
  }
  rho(0, 1) = std::conj(rho(1, 0));
  const double tr = rho.trace().real();
  if (tr > 0.0) rho /= tr;
  return rho;
}

Complex inner_product(const RegisterState& a, const RegisterState& b) {
  Complex s = 0.0;
  for (const auto& [c, x] : a.amplitudes()) {
    auto it = b.amplitudes().find(c);
    if (it != b.amplitudes().end()) s += std::conj(x) * it->second;
  }
  return s;
}

double state_fidelity(const RegisterState& a, const RegisterState& b) {
  const double na = a.norm_squared();
  const double nb = b.norm_squared();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::norm(inner_product(a, b)) / (na * nb);
}

RegisterState shift_back(const RegisterState& state, std::size_t j, double efficiency) {
  require(j < state.qubit_count(), "shift_back mode index out of range");
  require(efficiency >= 0.0 && efficiency <= 1.0, "efficiency must lie in [0, 1]");
  if (state.shifted_back()) {
    throw SequencingError("shift_back(" + std::to_string(j) + ") while mode " +
                          std::to_string(*state.shifted_back()) + " is shifted back");
  }
  const Momentum qj = Momentum::mode(j);
  RegisterState out = emptied(state);
  double lost = 0.0;
  for (const auto& [c, a] : state.amplitudes()) {
    RegisterConfig moved = c;
    int n = 0;
    for (auto& o : moved.occupations) {
      if (o.level == Level::m) {
        throw SequencingError("shift_back(" + std::to_string(j) + ") with an excitation already in m");
      }
      o.level = Level::m;
      o.momentum = o.momentum - qj;
      ++n;
    }
    const double scale = std::pow(efficiency, 0.5 * n);
    lost += std::norm(a) * (1.0 - scale * scale);
    out.amplitudes()[moved] += a * scale;
  }
  out.note_loss(lost);
  out.set_shifted_back(j);
  return out;
}

RegisterState shift_forward(const RegisterState& state, std::size_t j, double efficiency) {
  require(j < state.qubit_count(), "shift_forward mode index out of range");
  require(efficiency >= 0.0 && efficiency <= 1.0, "efficiency must lie in [0, 1]");
  if (state.shifted_back() != j) {
    throw SequencingError("shift_forward(" + std::to_string(j) + ") without a matching shift_back");
  }
  const Momentum qj = Momentum::mode(j);
  RegisterState out = emptied(state);
  double lost = 0.0;
  for (const auto& [c, a] : state.amplitudes()) {
    RegisterConfig moved = c;
    int n = 0;
    for (auto& o : moved.occupations) {
      if (o.level != Level::m) continue;
      o.level = Level::f;
      o.momentum = o.momentum + qj;
      ++n;
    }
    const double scale = std::pow(efficiency, 0.5 * n);
    lost += std::norm(a) * (1.0 - scale * scale);
    out.amplitudes()[moved] += a * scale;
  }
  out.note_loss(lost);
  out.set_shifted_back(std::nullopt);
  return out;
}

RegisterState cavity_mode_swap(const RegisterState& state, SwapDirection direction, double duration,
                               double collective_rate, const TransferSettings& settings) {
  require(duration >= 0.0 && collective_rate >= 0.0, "swap duration and rate must be non-negative");
  if (!state.shifted_back()) throw SequencingError("cavity swap requires a shifted-back register");
  const auto target = static_cast<std::uint32_t>(*state.shifted_back());
  const bool store = direction == SwapDirection::store;
  if (!store && !state.cavity_empty()) throw SequencingError("retrieve into an occupied cavity");

  const double theta = collective_rate * duration;
  double c = std::cos(theta);
  double s = std::sin(theta);
  // a pi-pulse should empty the source exactly, not leave 6e-17 behind
  if (std::abs(c) < 1e-14) {
    c = 0.0;
    s = s > 0.0 ? 1.0 : -1.0;
  }
  const double keep = std::sqrt(settings.swap_efficiency);
  const EnsembleGeometry& geom = state.reg().geometry();
  std::map<Momentum, double> gram_cache;
  auto suppression = [&](const Momentum& p) {
    auto it = gram_cache.find(p);
    if (it != gram_cache.end()) return it->second;
    const double v = std::abs(overlap(geom, WaveVector(), p.evaluate(state.reg())));
    gram_cache.emplace(p, v);
    return v;
  };

  RegisterState out = emptied(state);
  double leak = 0.0;
  double lost = 0.0;
  for (const auto& [cfg, a0] : state.amplitudes()) {
    if (a0 == 0.0) continue;
    Complex a = a0;
    const ModeOccupation* zero = nullptr;
    for (const auto& o : cfg.occupations) {
      if (o.level != Level::m) continue;
      if (o.momentum.is_zero()) {
        zero = &o;
        continue;
      }
      a *= std::cos(theta * suppression(o.momentum));
    }
    leak += std::norm(a0) - std::norm(a);

    if (store) {
      if (zero != nullptr) throw SequencingError("store with (m, 0) already occupied");
      if (cfg.photons == 1) {
        RegisterConfig moved = cfg;
        moved.photons = 0;
        insert_occupation(moved, {target, Level::m, Momentum()});
        if (c != 0.0) out.amplitudes()[cfg] += c * a;
        out.amplitudes()[moved] += s * keep * a;
        lost += std::norm(s * a) * (1.0 - settings.swap_efficiency);
        continue;
      }
    } else if (zero != nullptr) {
      RegisterConfig moved = cfg;
      std::erase_if(moved.occupations, [](const ModeOccupation& o) {
        return o.level == Level::m && o.momentum.is_zero();
      });
      moved.photons = 1;
      if (c != 0.0) out.amplitudes()[cfg] += c * a;
      out.amplitudes()[moved] += s * keep * a;
      lost += std::norm(s * a) * (1.0 - settings.swap_efficiency);
      continue;
    }
    out.amplitudes()[cfg] += a;
  }
  out.note_leakage(leak);
  out.note_loss(lost);
  if (leak > settings.leakage_bound) {
    std::ostringstream os;
    os << "cavity swap leakage " << leak << " exceeds bound " << settings.leakage_bound;
    out.warn(os.str());
  }
  return out;
}

RegisterState store_qubit(const RegisterState& state, std::size_t j, double collective_rate,
                          const TransferSettings& settings) {
  require(j < state.qubit_count(), "store mode index out of range");
  if (state.mode_occupied(j)) throw SequencingError("store into occupied mode " + std::to_string(j));
  RegisterState s = shift_back(state, j, settings.stirap_efficiency);
  s = cavity_mode_swap(s, SwapDirection::store, swap_duration(collective_rate), collective_rate, settings);
  return shift_forward(s, j, settings.stirap_efficiency);
}

RegisterState retrieve_qubit(const RegisterState& state, std::size_t j, double collective_rate,
                             const TransferSettings& settings) {
  require(j < state.qubit_count(), "retrieve mode index out of range");
  if (!state.cavity_empty()) throw SequencingError("retrieve of mode " + std::to_string(j) + " into an occupied cavity");
  RegisterState s = shift_back(state, j, settings.stirap_efficiency);
  s = cavity_mode_swap(s, SwapDirection::retrieve, swap_duration(collective_rate), collective_rate, settings);
  return shift_forward(s, j, settings.stirap_efficiency);
}

RegisterState apply_field_operator(const RegisterState& state, const CMatrix& u4) {
  require(u4.rows() == 4 && u4.cols() == 4, "field operator must be 4x4");
  std::map<RegisterConfig, Eigen::Vector4cd> groups;
  for (const auto& [c, a] : state.amplitudes()) {
    RegisterConfig rest = c;
    rest.photons = 0;
    rest.cpb_excited = false;
    auto [it, fresh] = groups.try_emplace(rest, Eigen::Vector4cd::Zero());
    it->second(2 * (c.cpb_excited ? 1 : 0) + c.photons) += a;
  }
  RegisterState out = emptied(state);
  const double before = state.norm_squared();
  for (const auto& [rest, v] : groups) {
    const Eigen::Vector4cd w = u4 * v;
    for (int k = 0; k < 4; ++k) {
      if (w(k) == 0.0) continue;
      RegisterConfig c = rest;
      c.cpb_excited = k >= 2;
      c.photons = k % 2;
      out.amplitudes()[c] += w(k);
    }
  }
  const double after = out.norm_squared();
  if (before > after) out.note_loss(before - after);
  return out;
}

std::pair<double, RegisterState> project_cpb(const RegisterState& state, bool excited) {
  RegisterState out = emptied(state);
  double p = 0.0;
  for (const auto& [c, a] : state.amplitudes()) {
    if (c.cpb_excited != excited) continue;
    p += std::norm(a);
    out.amplitudes()[c] = a;
  }
  const double total = state.norm_squared();
  if (p > 0.0) {
    const double scale = 1.0 / std::sqrt(p);
    for (auto& [c, a] : out.amplitudes()) a *= scale;
  }
  return {total > 0.0 ? p / total : 0.0, out};
}

std::vector<std::pair<std::string, Complex>> snapshot(const RegisterState& state) {
  std::vector<std::pair<std::string, Complex>> rows;
  rows.reserve(state.amplitudes().size());
  for (const auto& [c, a] : state.amplitudes()) rows.emplace_back(c.label(), a);
  return rows;
}

}  // namespace holoreg
