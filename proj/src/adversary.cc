// Copyright 2026 The SQPC Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sqpc/adversary.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sqpc {
namespace {

constexpr std::array<ChannelLeg, 3> kLegs = {
    ChannelLeg::kTpToAlice, ChannelLeg::kAliceToBob, ChannelLeg::kBobToTp};

bool SameMatrix(const Matrix2& a, const Matrix2& b) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12) return false;
  }
  return true;
}

Amplitude ComplexGaussian(Rng& rng) {
  const double re = rng.Gaussian();
  const double im = rng.Gaussian();
  return {re * std::numbers::sqrt2 / 2, im * std::numbers::sqrt2 / 2};
}

// Unitary whose first column is `psi`.
Matrix2 MapZeroTo(const StateVector& psi) {
  const Amplitude a = psi.amplitude(0);
  const Amplitude b = psi.amplitude(1);
  return {a, -std::conj(b), b, std::conj(a)};
}

StateVector Apply2(const Matrix2& m, const StateVector& v) {
  const Amplitude a = v.amplitude(0);
  const Amplitude b = v.amplitude(1);
  std::vector<Amplitude> out = {m[0] * a + m[1] * b, m[2] * a + m[3] * b};
  const double norm = std::sqrt(std::norm(out[0]) + std::norm(out[1]));
  out[0] /= norm;
  out[1] /= norm;
  return StateVector::FromAmplitudes(std::move(out));
}

std::string JoinLegs(const std::set<ChannelLeg>& legs) {
  std::string s;
  for (ChannelLeg leg : legs) {
    if (!s.empty()) s += ",";
    s += LegName(leg);
  }
  return s;
}

void RunLegs(AttackStrategy& attack, GroupRegister& reg, Rng& rng) {
  for (ChannelLeg leg : kLegs) attack.Intercept(leg, reg, rng);
}

}  // namespace

void ProbeLedger::Record(const Matrix2& rho, int bit) {
  auto& list = states_[bit & 1];
  if (list.size() >= kMaxStatesPerBit) return;
  for (const Matrix2& seen : list) {
    if (SameMatrix(seen, rho)) return;
  }
  list.push_back(rho);
}

double ProbeLedger::Metric() const {
  double best = 0.0;
  for (const Matrix2& a : states_[0]) {
    for (const Matrix2& b : states_[1]) best = std::max(best, QubitTraceDistance(a, b));
  }
  return std::min(best, 1.0);
}

void ProbingAttack::OnGroupComplete(GroupRegister& reg,
                                    std::span<const KeyQubit> key_qubits, Rng& /*rng*/) {
  for (const KeyQubit& kq : key_qubits) {
    const auto& probe = reg.probe[kq.transit_position];
    if (probe) ledger_.Record(ReducedQubit(reg.state, *probe), kq.bit);
  }
}

std::string InterceptResendFake::Name() const {
  return variant_ == InterceptVariant::kLeg1 ? "intercept-resend-leg1"
                                             : "intercept-resend-leg2";
}

std::map<std::string, std::string> InterceptResendFake::Params() const {
  return {{"divert_leg", variant_ == InterceptVariant::kLeg1 ? "tp_to_alice"
                                                             : "alice_to_bob"}};
}

void InterceptResendFake::Intercept(ChannelLeg leg, GroupRegister& reg, Rng& rng) {
  const ChannelLeg divert = variant_ == InterceptVariant::kLeg1
                                ? ChannelLeg::kTpToAlice
                                : ChannelLeg::kAliceToBob;
  if (leg == divert) {
    for (std::size_t p = 0; p < kGroupQubits; ++p) {
      reg.held[p] = reg.transit[p];
      const std::size_t fake = reg.AppendQubit(rng.Coin() ? 1 : 0);
      reg.transit[p] = fake;
      reg.probe[p] = fake;
    }
  } else if (leg == ChannelLeg::kBobToTp) {
    for (std::size_t p = 0; p < kGroupQubits; ++p) {
      if (!reg.held[p]) continue;
      ZMeasurement m = MeasureZ(reg.state, reg.transit[p], rng);
      reg.state = std::move(m.state);
      reg.transit[p] = *reg.held[p];
      reg.held[p].reset();
    }
  }
}

std::string MeasureResend::Name() const {
  return basis_ == MeasureBasis::kZ ? "measure-resend-z" : "measure-resend-bell";
}

std::map<std::string, std::string> MeasureResend::Params() const {
  std::map<std::string, std::string> params{{"leg", std::string(LegName(leg_))}};
  if (basis_ == MeasureBasis::kBell) {
    params["pairing"] = random_pairing_ ? "random" : "consecutive";
  }
  return params;
}

void MeasureResend::Intercept(ChannelLeg leg, GroupRegister& reg, Rng& rng) {
  if (leg != leg_) return;
  if (basis_ == MeasureBasis::kZ) {
    for (std::size_t p = 0; p < kGroupQubits; ++p) {
      ZMeasurement m = MeasureZ(reg.state, reg.transit[p], rng);
      reg.state = std::move(m.state);
      reg.probe[p] = reg.AppendQubit(m.bit);
    }
    return;
  }
  static constexpr std::array<std::array<QubitPair, 2>, 3> kMatchings = {{
      {{{0, 1}, {2, 3}}},
      {{{0, 2}, {1, 3}}},
      {{{0, 3}, {1, 2}}},
  }};
  const auto& matching = kMatchings[random_pairing_ ? rng.Below(3) : 0];
  for (const QubitPair& pair : matching) {
    BellMeasurement m =
        MeasureBell(reg.state, reg.transit[pair.first], reg.transit[pair.second], rng);
    reg.state = std::move(m.state);
    const int code = BellCode(m.kind);
    reg.probe[pair.first] = reg.AppendQubit(code >> 1);
    reg.probe[pair.second] = reg.AppendQubit(code & 1);
  }
}

void DoubleCnot::Intercept(ChannelLeg leg, GroupRegister& reg, Rng& /*rng*/) {
  if (leg == ChannelLeg::kTpToAlice) {
    for (std::size_t p = 0; p < kGroupQubits; ++p) {
      const std::size_t ancilla = reg.AppendQubit(0);
      reg.probe[p] = ancilla;
      reg.Apply(GateKind::kCnot, {reg.transit[p], ancilla});
    }
  } else if (leg == ChannelLeg::kAliceToBob) {
    for (std::size_t p = 0; p < kGroupQubits; ++p) {
      if (reg.probe[p]) reg.Apply(GateKind::kCnot, {reg.transit[p], *reg.probe[p]});
    }
    CheckAncillas(reg);
  }
}

void DoubleCnot::CheckAncillas(const GroupRegister& reg) {
  for (const auto& ancilla : reg.probe) {
    if (!ancilla) continue;
    const double p1 = ZProbabilities(reg.state, *ancilla)[1];
    max_deviation_ = std::max(max_deviation_, std::sqrt(std::max(p1, 0.0)));
    ++ancilla_checks_;
  }
}

void DoubleCnot::OnGroupComplete(GroupRegister& reg, std::span<const KeyQubit> key_qubits,
                                 Rng& rng) {
  CheckAncillas(reg);
  ProbingAttack::OnGroupComplete(reg, key_qubits, rng);
  for (const auto& ancilla : reg.probe) {
    if (!ancilla) continue;
    ZMeasurement m = MeasureZ(reg.state, *ancilla, rng);
    reg.state = std::move(m.state);
    if (m.bit == 1) ++ancilla_ones_;
  }
}

std::map<std::string, double> DoubleCnot::Diagnostics() const {
  return {{"ancilla_checks", static_cast<double>(ancilla_checks_)},
          {"ancilla_ones", static_cast<double>(ancilla_ones_)},
          {"max_ancilla_deviation", max_deviation_}};
}

const Matrix4& CollectiveUnitary::ForLeg(ChannelLeg leg) const {
  switch (leg) {
    case ChannelLeg::kTpToAlice: return u1;
    case ChannelLeg::kAliceToBob: return u2;
    case ChannelLeg::kBobToTp: return u3;
  }
  return u3;
}

void CollectiveUnitary::Validate() const {
  if (!IsUnitary(u1) || !IsUnitary(u2) || !IsUnitary(u3)) {
    throw std::invalid_argument("collective attack matrices must be unitary");
  }
}

CollectiveAttack::CollectiveAttack(CollectiveUnitary unitary, std::string label)
    : unitary_(std::move(unitary)), label_(std::move(label)) {
  unitary_.Validate();
}

void CollectiveAttack::Intercept(ChannelLeg leg, GroupRegister& reg, Rng& /*rng*/) {
  const Matrix4& u = unitary_.ForLeg(leg);
  for (std::size_t p = 0; p < kGroupQubits; ++p) {
    if (!reg.probe[p]) reg.probe[p] = reg.AppendQubit(0);
    reg.state = ApplyUnitary(reg.state, u, reg.transit[p], *reg.probe[p]);
  }
}

Matrix2 RandomUnitary2(Rng& rng) {
  Amplitude a = ComplexGaussian(rng);
  Amplitude b = ComplexGaussian(rng);
  const double norm = std::sqrt(std::norm(a) + std::norm(b));
  a /= norm;
  b /= norm;
  const Amplitude phase = std::polar(1.0, 2.0 * std::numbers::pi * rng.Uniform());
  return {a, -phase * std::conj(b), b, phase * std::conj(a)};
}

Matrix4 RandomUnitary4(Rng& rng) {
  // Gram-Schmidt on a complex Gaussian matrix, column by column.
  std::array<std::array<Amplitude, 4>, 4> cols;
  for (auto& col : cols) {
    for (auto& x : col) x = ComplexGaussian(rng);
  }
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t prev = 0; prev < c; ++prev) {
      Amplitude dot = 0.0;
      for (std::size_t r = 0; r < 4; ++r) dot += std::conj(cols[prev][r]) * cols[c][r];
      for (std::size_t r = 0; r < 4; ++r) cols[c][r] -= dot * cols[prev][r];
    }
    double norm = 0.0;
    for (const auto& x : cols[c]) norm += std::norm(x);
    norm = std::sqrt(norm);
    for (auto& x : cols[c]) x /= norm;
  }
  Matrix4 u{};
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) u[r * 4 + c] = cols[c][r];
  }
  return u;
}

CollectiveUnitary SampleConstrainedCollective(Rng& rng, bool independent_probe) {
  std::array<std::array<Matrix2, 2>, 3> v;
  for (auto& leg : v) {
    for (auto& block : leg) block = RandomUnitary2(rng);
  }
  if (independent_probe) {
    const StateVector zero(1);
    const StateVector e0 = Apply2(v[2][0], Apply2(v[1][0], Apply2(v[0][0], zero)));
    const StateVector w = Apply2(v[1][1], Apply2(v[0][1], zero));
    v[2][1] = Multiply(MapZeroTo(e0), Adjoint(MapZeroTo(w)));
  }
  CollectiveUnitary u;
  u.u1 = ControlledBlock(v[0][0], v[0][1]);
  u.u2 = ControlledBlock(v[1][0], v[1][1]);
  u.u3 = ControlledBlock(v[2][0], v[2][1]);
  return u;
}

CollectiveUnitary SampleUnconstrainedCollective(Rng& rng) {
  CollectiveUnitary u;
  u.u1 = RandomUnitary4(rng);
  u.u2 = RandomUnitary4(rng);
  u.u3 = RandomUnitary4(rng);
  return u;
}

CollectiveUnitary BitFlipCollective() {
  // X on the transit qubit, identity on the probe.
  Matrix4 m{};
  m[0 * 4 + 2] = 1.0;
  m[1 * 4 + 3] = 1.0;
  m[2 * 4 + 0] = 1.0;
  m[3 * 4 + 1] = 1.0;
  return {m, m, m};
}

std::optional<StateVector> ConditionedProbe(const CollectiveUnitary& u, int x) {
  const int bits[] = {x, 0};
  StateVector state = StateVector::BasisState(bits);
  for (ChannelLeg leg : kLegs) {
    state = ApplyUnitary(state, u.ForLeg(leg), 0, 1);
    if (ProjectZ(state, 0, x) <= kNegligibleProbability) return std::nullopt;
  }
  std::vector<Amplitude> probe = {state.amplitude(2 * x), state.amplitude(2 * x + 1)};
  const double norm = std::sqrt(std::norm(probe[0]) + std::norm(probe[1]));
  probe[0] /= norm;
  probe[1] /= norm;
  return StateVector::FromAmplitudes(std::move(probe));
}

double ConditionedProbeDistance(const CollectiveUnitary& u) {
  const auto e0 = ConditionedProbe(u, 0);
  const auto e1 = ConditionedProbe(u, 1);
  if (!e0 || !e1) return 0.0;
  return TraceDistancePure(*e0, *e1);
}

AnalyticDetection AnalyzeCollective(const CollectiveUnitary& u) {
  CollectiveAttack attack(u, "analytic");
  const TpBehavior honest;
  Rng unused(0);
  AnalyticDetection out;
  for (bool swapped : {false, true}) {
    const GroupPlan plan{0, swapped};

    GroupRegister reg = honest.PrepareGroup(plan, unused);
    RunLegs(attack, reg, unused);
    TpRestore(reg, plan);
    for (std::size_t first = 0; first < kGroupQubits; first += 2) {
      const auto probs =
          BellProbabilities(reg.state, reg.transit[first], reg.transit[first + 1]);
      out.bell_failure += (1.0 - probs[0]) / 4.0;
    }

    for (std::size_t t = 0; t < kGroupQubits; ++t) {
      GroupRegister start = honest.PrepareGroup(plan, unused);
      attack.Intercept(ChannelLeg::kTpToAlice, start, unused);
      for (int a : {0, 1}) {
        GroupRegister after_alice = start;
        const double pa = ProjectZ(after_alice.state, after_alice.transit[t], a);
        if (pa <= kNegligibleProbability) continue;
        attack.Intercept(ChannelLeg::kAliceToBob, after_alice, unused);
        for (int b : {0, 1}) {
          GroupRegister after_bob = after_alice;
          const double pb = ProjectZ(after_bob.state, after_bob.transit[t], b);
          if (pb <= kNegligibleProbability) continue;
          attack.Intercept(ChannelLeg::kBobToTp, after_bob, unused);
          TpRestore(after_bob, plan);
          const std::size_t o = OriginalPosition(swapped, t);
          const auto pt = ZProbabilities(after_bob.state, after_bob.transit[o]);
          for (int tp_bit : {0, 1}) {
            if (a == b && b == tp_bit) continue;
            out.z_mismatch += pa * pb * pt[tp_bit] / 8.0;
          }
        }
      }
    }
  }
  return out;
}

RestrictToLegs::RestrictToLegs(std::unique_ptr<AttackStrategy> inner,
                               std::set<ChannelLeg> legs, std::string label)
    : inner_(std::move(inner)), legs_(std::move(legs)), label_(std::move(label)) {
  if (!inner_) throw std::invalid_argument("RestrictToLegs needs a strategy");
}

std::map<std::string, std::string> RestrictToLegs::Params() const {
  auto params = inner_->Params();
  params["legs"] = JoinLegs(legs_);
  params["inner"] = inner_->Name();
  return params;
}

void RestrictToLegs::Intercept(ChannelLeg leg, GroupRegister& reg, Rng& rng) {
  if (legs_.count(leg)) inner_->Intercept(leg, reg, rng);
}

void RestrictToLegs::OnGroupComplete(GroupRegister& reg,
                                     std::span<const KeyQubit> key_qubits, Rng& rng) {
  inner_->OnGroupComplete(reg, key_qubits, rng);
}

CheckPublication ZMeasureTp::PublishCheckPair(GroupRegister& reg, std::size_t first,
                                              Rng& rng) const {
  CheckPublication pub;
  for (std::size_t o = first; o < first + 2; ++o) {
    ZMeasurement m = MeasureZ(reg.state, reg.transit[o], rng);
    reg.state = std::move(m.state);
    pub.measurements.push_back(std::move(m.record));
  }
  pub.published = rng.Coin() ? BellKind::kPhiMinus : BellKind::kPhiPlus;
  return pub;
}

GroupRegister FakeZTp::PrepareGroup(const GroupPlan& plan, Rng& rng) const {
  GroupRegister reg;
  reg.group_index = plan.group_index;
  std::array<int, kGroupQubits> bits{};
  for (int& bit : bits) bit = rng.Coin() ? 1 : 0;
  reg.state = StateVector::BasisState(bits);
  if (plan.swapped) reg.state = SwapPairing(reg.state);
  return reg;
}

BellKind FakeZTp::Step6BellCheck(GroupRegister& reg, std::size_t first,
                                 std::vector<MeasurementRecord>& log, Rng& rng) const {
  for (std::size_t o = first; o < first + 2; ++o) {
    ZMeasurement m = MeasureZ(reg.state, reg.transit[o], rng);
    reg.state = std::move(m.state);
    log.push_back(std::move(m.record));
  }
  return BellKind::kPhiPlus;
}

const std::vector<std::string>& AttackNames() {
  static const std::vector<std::string> names = {
      "none",
      "intercept-resend-leg1",
      "intercept-resend-leg2",
      "measure-resend-z",
      "measure-resend-bell",
      "double-cnot",
      "collective-identity",
      "collective-constrained",
      "collective-diagonal",
      "collective-unconstrained",
      "collective-bitflip",
      "tp-zmeasure",
      "tp-fake-z",
  };
  return names;
}

std::shared_ptr<const TpBehavior> MakeTpBehavior(const std::string& name) {
  if (name == "honest") return nullptr;
  if (name == "zmeasure") return std::make_shared<ZMeasureTp>();
  if (name == "fake-z") return std::make_shared<FakeZTp>();
  throw std::invalid_argument("unknown TP strategy '" + name + "'");
}

ResolvedAttack ResolveAttack(const std::string& name, const AttackOptions& options) {
  ResolvedAttack out;
  out.name = name;
  // A dishonest Alice reuses the channel attacks on the Bob -> TP leg only.
  if (options.alice_attacker) {
    if (options.leg && *options.leg != ChannelLeg::kBobToTp) {
      throw std::invalid_argument("a dishonest Alice acts on bob_to_tp only");
    }
    if (name.rfind("intercept-resend", 0) == 0 || name == "double-cnot") {
      throw std::invalid_argument("attack '" + name +
                                  "' needs legs a dishonest Alice does not attack");
    }
  }
  const ChannelLeg leg = options.leg.value_or(
      options.alice_attacker ? ChannelLeg::kBobToTp : ChannelLeg::kTpToAlice);
  const bool random_pairing = options.random_pairing;

  if (name == "none") {
    out.factory = nullptr;
  } else if (name == "intercept-resend-leg1" || name == "intercept-resend-leg2") {
    const auto variant =
        name.back() == '1' ? InterceptVariant::kLeg1 : InterceptVariant::kLeg2;
    out.factory = [variant](std::size_t, Rng&) {
      return std::make_unique<InterceptResendFake>(variant);
    };
  } else if (name == "measure-resend-z") {
    out.factory = [leg](std::size_t, Rng&) {
      return std::make_unique<MeasureResend>(MeasureBasis::kZ, leg);
    };
  } else if (name == "measure-resend-bell") {
    out.factory = [leg, random_pairing](std::size_t, Rng&) {
      return std::make_unique<MeasureResend>(MeasureBasis::kBell, leg, random_pairing);
    };
  } else if (name == "double-cnot") {
    out.factory = [](std::size_t, Rng&) { return std::make_unique<DoubleCnot>(); };
  } else if (name == "collective-identity") {
    out.factory = [name](std::size_t, Rng&) {
      return std::make_unique<CollectiveAttack>(CollectiveUnitary{}, name);
    };
  } else if (name == "collective-constrained" || name == "collective-diagonal") {
    const bool independent = name == "collective-constrained";
    out.factory = [name, independent](std::size_t, Rng& rng) {
      return std::make_unique<CollectiveAttack>(
          SampleConstrainedCollective(rng, independent), name);
    };
  } else if (name == "collective-unconstrained") {
    out.factory = [name](std::size_t, Rng& rng) {
      return std::make_unique<CollectiveAttack>(SampleUnconstrainedCollective(rng), name);
    };
  } else if (name == "collective-bitflip") {
    out.factory = [name](std::size_t, Rng&) {
      return std::make_unique<CollectiveAttack>(BitFlipCollective(), name);
    };
  } else if (name == "tp-zmeasure") {
    out.tp = std::make_shared<ZMeasureTp>();
  } else if (name == "tp-fake-z") {
    out.tp = std::make_shared<FakeZTp>();
  } else {
    throw std::invalid_argument("unknown attack '" + name + "'");
  }

  if (options.alice_attacker) {
    if (!out.factory) {
      throw std::invalid_argument("attack '" + name +
                                  "' has no channel component for a dishonest Alice");
    }
    out.name = "alice:" + name;
    out.factory = [inner = out.factory, label = out.name](std::size_t trial, Rng& rng)
        -> std::unique_ptr<AttackStrategy> {
      return std::make_unique<RestrictToLegs>(
          inner(trial, rng), std::set<ChannelLeg>{ChannelLeg::kBobToTp}, label);
    };
  }
  return out;
}

Proportion WilsonInterval(std::size_t successes, std::size_t trials, double z) {
  Proportion p;
  p.successes = successes;
  p.trials = trials;
  if (trials == 0) {
    p.ci_high = 1.0;
    return p;
  }
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  p.rate = phat;
  p.ci_low = std::max(0.0, center - half);
  p.ci_high = std::min(1.0, center + half);
  return p;
}

AttackReport Evaluate(const std::string& name, const AttackFactory& factory,
                      const TpBehavior* tp, const EvaluateConfig& config) {
  if (config.trials == 0) throw std::invalid_argument("trials must be at least 1");
  AttackReport report;
  report.attack = name;
  report.config = config;
  report.tp_strategy = tp ? tp->Name() : "honest";

  const std::array<std::string, 3> class_names = {"step5_bell", "step6_bell", "step6_z"};
  std::array<std::vector<bool>, 3> outcomes;
  std::size_t detected_runs = 0;

  for (std::size_t k = 0; k < config.trials; ++k) {
    Rng trial_rng(DeriveSeed(config.seed, "trial", k));
    Rng secret_rng = trial_rng.Fork("secrets");
    Rng sample_rng = trial_rng.Fork("sample");
    std::unique_ptr<AttackStrategy> attack = factory ? factory(k, sample_rng) : nullptr;
    if (k == 0 && attack) report.params = attack->Params();

    ProtocolConfig pc;
    pc.n = config.n;
    pc.seed = trial_rng.Fork("run").seed();
    auto [a, b] = RandomSecrets(config.n, secret_rng.Coin(), secret_rng);
    pc.secret_a = std::move(a);
    pc.secret_b = std::move(b);
    pc.threshold = 1.0;

    const Transcript t = RunProtocol(pc, attack.get(), tp);
    if (t.status == RunStatus::kInsufficientKey) ++report.insufficient_key_runs;
    if (t.violations.TotalViolations() > 0) ++detected_runs;
    for (const GroupRecord& group : t.groups) {
      for (const CheckEvent& check : group.checks) {
        const std::size_t idx = check.cls == SiftClass::kEcZ ? 2 : (check.step == 5 ? 0 : 1);
        outcomes[idx].push_back(!check.passed);
      }
    }
    report.info_metric = std::max(report.info_metric, t.attack_info);
    for (const auto& [key, value] : t.attack_diagnostics) {
      auto it = report.diagnostics.find(key);
      if (it == report.diagnostics.end()) {
        report.diagnostics[key] = value;
      } else {
        it->second = std::max(it->second, value);
      }
    }
  }

  report.detection = WilsonInterval(detected_runs, config.trials);
  for (std::size_t i = 0; i < class_names.size(); ++i) {
    const auto violations =
        static_cast<std::size_t>(std::count(outcomes[i].begin(), outcomes[i].end(), true));
    report.classes.push_back(
        {class_names[i], WilsonInterval(violations, outcomes[i].size()), outcomes[i]});
  }
  return report;
}

CheckTally SampleReflectChecks(AttackStrategy& attack, std::size_t groups, Rng& rng) {
  const TpBehavior honest;
  Rng eve_rng = rng.Fork("adversary");
  Rng tp_rng = rng.Fork("tp");
  Rng plan_rng = rng.Fork("plan");
  CheckTally tally;
  for (std::size_t g = 0; g < groups; ++g) {
    const GroupPlan plan{g, plan_rng.Coin()};
    GroupRegister reg = honest.PrepareGroup(plan, plan_rng);
    RunLegs(attack, reg, eve_rng);
    TpRestore(reg, plan);
    for (std::size_t first = 0; first < kGroupQubits; first += 2) {
      std::vector<MeasurementRecord> log;
      const BellKind kind = honest.Step6BellCheck(reg, first, log, tp_rng);
      ++tally.checks;
      if (kind != BellKind::kPhiPlus) ++tally.violations;
    }
  }
  return tally;
}

}  // namespace sqpc
