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

#include "sqpc/analysis.h"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sqpc {
namespace {

struct GroupShot {
  GroupRegister reg;
  GroupRecord record;
};

using OpPattern = std::array<UserOp, kGroupQubits>;

constexpr UserOp M = UserOp::kMeasure;
constexpr UserOp R = UserOp::kReflect;

GroupShot RunGroupShot(bool swapped, const OpPattern& alice, const OpPattern& bob,
                       Rng& rng) {
  const TpBehavior honest;
  GroupShot shot;
  shot.record.plan = GroupPlan{0, swapped};
  shot.reg = honest.PrepareGroup(shot.record.plan, rng);
  for (std::size_t t = 0; t < kGroupQubits; ++t) {
    shot.record.alice_op[t] = alice[t];
    shot.record.alice_bit[t] = ApplyUserOp(shot.reg, t, alice[t], rng);
  }
  for (std::size_t t = 0; t < kGroupQubits; ++t) {
    shot.record.bob_op[t] = bob[t];
    shot.record.bob_bit[t] = ApplyUserOp(shot.reg, t, bob[t], rng);
  }
  TpRestore(shot.reg, shot.record.plan);
  return shot;
}

// TP's Bell-measurement circuit on both restored pairs: CNOT and H, then Z.
// Slot 2p holds the phase bit of pair p and slot 2p+1 its parity bit.
std::array<int, kGroupQubits> TpBellRegister(GroupRegister& reg, Rng& rng) {
  std::array<int, kGroupQubits> slots{};
  for (std::size_t first = 0; first < kGroupQubits; first += 2) {
    reg.Apply(GateKind::kCnot, {reg.transit[first], reg.transit[first + 1]});
    reg.Apply(GateKind::kH, {reg.transit[first]});
  }
  for (std::size_t o = 0; o < kGroupQubits; ++o) {
    ZMeasurement m = MeasureZ(reg.state, reg.transit[o], rng);
    reg.state = std::move(m.state);
    slots[o] = m.bit;
  }
  return slots;
}

constexpr OpPattern kMixedAlice = {M, R, M, R};
constexpr OpPattern kMixedBob = {M, M, R, R};

GroupRecord MixedOpsTemplate(bool swapped) {
  GroupRecord record;
  record.plan = GroupPlan{0, swapped};
  for (std::size_t t = 0; t < kGroupQubits; ++t) {
    record.alice_op[t] = kMixedAlice[t];
    record.bob_op[t] = kMixedBob[t];
  }
  return record;
}

}  // namespace

std::string_view ScenarioName(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kBellPrepMeasure: return "bell";
    case ScenarioKind::kReflectReflect: return "reflect-reflect";
    case ScenarioKind::kMeasureAll: return "measure-all";
    case ScenarioKind::kMixedOps: return "mixed-ops";
  }
  return "?";
}

std::optional<ScenarioKind> ParseScenarioKind(std::string_view text) {
  for (ScenarioKind kind : {ScenarioKind::kBellPrepMeasure, ScenarioKind::kReflectReflect,
                            ScenarioKind::kMeasureAll, ScenarioKind::kMixedOps}) {
    if (ScenarioName(kind) == text) return kind;
  }
  return std::nullopt;
}

std::string RegisterString(std::span<const int> bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto it = bits.rbegin(); it != bits.rend(); ++it) {
    s.push_back(static_cast<char>('0' + *it));
  }
  return s;
}

std::size_t Histogram::Total() const {
  std::size_t total = 0;
  for (const auto& [outcome, count] : counts) total += count;
  return total;
}

Histogram RunScenario(const ScenarioSpec& spec) {
  if (spec.shots == 0) throw std::invalid_argument("shots must be at least 1");
  Histogram hist;
  hist.spec = spec;
  Rng rng = Rng(spec.seed).Fork("shots");

  switch (spec.kind) {
    case ScenarioKind::kBellPrepMeasure: {
      hist.width = 2;
      const int code = BellCode(spec.bell);
      const int prep[] = {code & 1, code >> 1};  // phase on qubit 0, parity on 1
      for (std::size_t s = 0; s < spec.shots; ++s) {
        StateVector state = StateVector::BasisState(prep);
        state = ApplyGate(state, GateKind::kH, {0});
        state = ApplyGate(state, GateKind::kCnot, {0, 1});
        state = ApplyGate(state, GateKind::kCnot, {0, 1});
        state = ApplyGate(state, GateKind::kH, {0});
        std::array<int, 2> slots{};
        for (std::size_t q = 0; q < 2; ++q) {
          ZMeasurement m = MeasureZ(state, q, rng);
          state = std::move(m.state);
          slots[q] = m.bit;
        }
        ++hist.counts[RegisterString(slots)];
      }
      break;
    }
    case ScenarioKind::kReflectReflect:
    case ScenarioKind::kMeasureAll: {
      hist.width = 4;
      const bool measure = spec.kind == ScenarioKind::kMeasureAll;
      const OpPattern ops = measure ? OpPattern{M, M, M, M} : OpPattern{R, R, R, R};
      if (measure) hist.relations["alice_bob_equal"] = 0;
      for (std::size_t s = 0; s < spec.shots; ++s) {
        GroupShot shot = RunGroupShot(spec.swapped, ops, ops, rng);
        const auto slots = TpBellRegister(shot.reg, rng);
        ++hist.counts[RegisterString(slots)];
        if (measure && shot.record.alice_bit == shot.record.bob_bit) {
          ++hist.relations["alice_bob_equal"];
        }
      }
      break;
    }
    case ScenarioKind::kMixedOps: {
      hist.width = 7;
      hist.relations = {{"tp_alice", 0}, {"tp_bob", 0}, {"three_way", 0}};
      const auto sift = Sift(MixedOpsTemplate(spec.swapped));
      for (std::size_t s = 0; s < spec.shots; ++s) {
        GroupShot shot = RunGroupShot(spec.swapped, kMixedAlice, kMixedBob, rng);
        std::array<int, 3> tp{};
        for (std::size_t o = 0; o < 3; ++o) {
          ZMeasurement m = MeasureZ(shot.reg.state, shot.reg.transit[o], rng);
          shot.reg.state = std::move(m.state);
          tp[o] = m.bit;
        }
        const auto& a = shot.record.alice_bit;
        const auto& b = shot.record.bob_bit;
        const int slots[] = {*a[0], *a[2], *b[0], *b[1], tp[0], tp[1], tp[2]};
        ++hist.counts[RegisterString(slots)];

        bool tp_alice = true, tp_bob = true, three_way = true;
        for (std::size_t o = 0; o < 3; ++o) {
          const std::size_t t = OriginalPosition(spec.swapped, o);
          switch (sift[o]) {
            case SiftClass::kKtaBit: tp_alice = tp_alice && a[t] == tp[o]; break;
            case SiftClass::kKtbBit: tp_bob = tp_bob && b[t] == tp[o]; break;
            case SiftClass::kEcZ:
              three_way = three_way && a[t] == tp[o] && b[t] == tp[o];
              break;
            default: break;
          }
        }
        if (tp_alice) ++hist.relations["tp_alice"];
        if (tp_bob) ++hist.relations["tp_bob"];
        if (three_way) ++hist.relations["three_way"];
      }
      break;
    }
  }
  return hist;
}

MixedOpsReport MixedOpsConsistency(const ScenarioSpec& spec) {
  if (spec.kind != ScenarioKind::kMixedOps) {
    throw std::invalid_argument("MixedOpsConsistency needs the mixed-ops scenario");
  }
  MixedOpsReport report;
  report.swapped = spec.swapped;
  report.shots = spec.shots;
  const auto sift = Sift(MixedOpsTemplate(spec.swapped));
  for (std::size_t o = 0; o < kGroupQubits; ++o) {
    if (sift[o] == SiftClass::kKtaBit) report.tp_alice_position = o;
    if (sift[o] == SiftClass::kKtbBit) report.tp_bob_position = o;
    if (sift[o] == SiftClass::kEcZ) report.three_way_position = o;
  }
  const Histogram hist = RunScenario(spec);
  report.tp_alice_holds = hist.relations.at("tp_alice");
  report.tp_bob_holds = hist.relations.at("tp_bob");
  report.three_way_holds = hist.relations.at("three_way");
  return report;
}

Rational Rational::Make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

std::string Rational::ToString() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

std::string LinearForm::ToString() const {
  if (a == 0) return std::to_string(b);
  std::string s = a == 1 ? "n" : std::to_string(a) + "n";
  if (b > 0) s += "+" + std::to_string(b);
  if (b < 0) s += std::to_string(b);
  return s;
}

Rational EfficiencyRow::Eta(std::int64_t n) const {
  return Rational::Make(shared_bits.At(n), consumed.At(n));
}

EfficiencyRow OwnProtocolRow() {
  // 2n groups of two Bell pairs.
  const LinearForm tp_qubits{2 * static_cast<std::int64_t>(kGroupQubits), 0};
  // Each user receives every qubit and regenerates the half it measures.
  const LinearForm regenerated_per_user{tp_qubits.a / 2, 0};
  const LinearForm ciphertext_bits{1, 0};
  const LinearForm verdict_bit{0, 1};

  EfficiencyRow row;
  row.label = "this protocol";
  row.resource = "Bell states";
  row.transmission = "circular";
  row.swapping = true;
  row.pre_shared_key = false;
  row.qubits = tp_qubits + regenerated_per_user + regenerated_per_user;
  row.classical_bits = ciphertext_bits + ciphertext_bits + verdict_bit;
  row.consumed = *row.qubits + *row.classical_bits;
  row.psk_cost = {0, 0};
  row.comparison_cost = row.consumed;
  return row;
}

std::vector<EfficiencyRow> EfficiencyTable() {
  auto literal = [](std::string label, std::string resource, std::string transmission,
                    bool swapping, bool psk, LinearForm psk_cost, LinearForm comparison,
                    LinearForm consumed) {
    EfficiencyRow row;
    row.label = std::move(label);
    row.resource = std::move(resource);
    row.transmission = std::move(transmission);
    row.swapping = swapping;
    row.pre_shared_key = psk;
    row.psk_cost = psk_cost;
    row.comparison_cost = comparison;
    row.consumed = consumed;
    return row;
  };
  return {
      literal("prior-1", "Bell states", "distributed", true, false, {0, 0}, {162, 1}, {162, 1}),
      literal("prior-2", "two-particle product states", "distributed", false, true, {16, 0},
              {44, 1}, {60, 1}),
      literal("prior-3", "single particles", "distributed", false, false, {0, 0}, {52, 1},
              {52, 1}),
      literal("prior-4", "Bell states", "distributed", false, true, {40, 0}, {60, 1},
              {102, 1}),
      literal("prior-5", "Bell states", "distributed", false, true, {40, 0}, {12, 1},
              {52, 1}),
      literal("prior-6", "three-particle G-like states", "distributed", false, true,
              {40, 0}, {13, 1}, {53, 1}),
      literal("prior-7", "single particles", "circular", false, false, {0, 0}, {18, 1},
              {18, 1}),
      OwnProtocolRow(),
  };
}

RunEfficiency EfficiencyFromRun(const Transcript& transcript) {
  if (transcript.status != RunStatus::kCompleted || !transcript.outcome) {
    throw std::invalid_argument("efficiency needs a completed run");
  }
  const ResourceCounters& r = transcript.resources;
  RunEfficiency eff;
  eff.shared_bits = r.compared_bits;
  eff.qubits_budgeted =
      r.tp_prepared_qubits + r.alice_received_qubits / 2 + r.bob_received_qubits / 2;
  eff.qubits_realized =
      r.tp_prepared_qubits + r.alice_regenerated_qubits + r.bob_regenerated_qubits;
  eff.classical_bits = r.comparison_bits_published;
  eff.eta = Rational::Make(static_cast<std::int64_t>(eff.shared_bits),
                           static_cast<std::int64_t>(eff.qubits_budgeted + eff.classical_bits));
  eff.eta_realized =
      Rational::Make(static_cast<std::int64_t>(eff.shared_bits),
                     static_cast<std::int64_t>(eff.qubits_realized + eff.classical_bits));
  return eff;
}

std::vector<DetectionPoint> DetectionCurve(double per_check_p,
                                           std::span<const std::size_t> ks,
                                           const std::vector<bool>& outcomes, double z) {
  std::vector<DetectionPoint> curve;
  for (std::size_t k : ks) {
    if (k == 0) throw std::invalid_argument("block size must be at least 1");
    DetectionPoint point;
    point.k = k;
    point.analytic = 1.0 - std::pow(1.0 - per_check_p, static_cast<double>(k));
    const std::size_t blocks = outcomes.size() / k;
    std::size_t detected = 0;
    for (std::size_t blk = 0; blk < blocks; ++blk) {
      for (std::size_t i = blk * k; i < (blk + 1) * k; ++i) {
        if (outcomes[i]) {
          ++detected;
          break;
        }
      }
    }
    point.empirical = WilsonInterval(detected, blocks, z);
    curve.push_back(point);
  }
  return curve;
}

ChiSquareResult FairBitChiSquare(
    const std::map<std::string, std::array<std::size_t, 2>>& counts) {
  ChiSquareResult result;
  for (const auto& [key, c] : counts) {
    const double total = static_cast<double>(c[0] + c[1]);
    if (total == 0) continue;
    const double expected = total / 2.0;
    for (std::size_t bit : c) {
      const double d = static_cast<double>(bit) - expected;
      result.statistic += d * d / expected;
    }
    ++result.degrees_of_freedom;
  }
  if (result.degrees_of_freedom > 0) {
    const boost::math::chi_squared dist(static_cast<double>(result.degrees_of_freedom));
    result.p_value = boost::math::cdf(boost::math::complement(dist, result.statistic));
  }
  return result;
}

void TallyKabByTpView(const Transcript& transcript,
                      std::map<std::string, std::array<std::size_t, 2>>& counts) {
  for (const GroupRecord& record : transcript.groups) {
    if (!record.check_group) continue;
    for (std::size_t o = 0; o < kGroupQubits; ++o) {
      if (record.sift[o] != SiftClass::kKabBit) continue;
      const auto& published = record.published[o / 2];
      const std::string key =
          std::string("swapped=") + (record.plan.swapped ? "1" : "0") +
          " published=" + std::string(published ? BellKindName(*published) : "none") +
          " position=" + std::to_string(o);
      const int bit = *record.alice_bit[OriginalPosition(record.plan.swapped, o)];
      ++counts[key][bit];
    }
  }
}

}  // namespace sqpc
