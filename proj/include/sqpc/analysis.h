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

#ifndef SQPC_ANALYSIS_H_
#define SQPC_ANALYSIS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sqpc/adversary.h"
#include "sqpc/protocol.h"
#include "sqpc/statevector.h"

namespace sqpc {

// ---------------------------------------------------------------------------
// Circuit scenarios.

enum class ScenarioKind { kBellPrepMeasure, kReflectReflect, kMeasureAll, kMixedOps };

std::string_view ScenarioName(ScenarioKind kind);  // "bell", "reflect-reflect", ...
std::optional<ScenarioKind> ParseScenarioKind(std::string_view text);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kBellPrepMeasure;
  BellKind bell = BellKind::kPhiPlus;  // kBellPrepMeasure only
  bool swapped = false;                // group scenarios only
  std::size_t shots = 1024;
  std::uint64_t seed = 0;
};

// Bits of a measurement register, highest qubit leftmost: bits[i] is the
// result stored in register slot i.
std::string RegisterString(std::span<const int> bits);

struct Histogram {
  ScenarioSpec spec;
  std::size_t width = 0;
  std::map<std::string, std::size_t> counts;
  // Shots on which each named relation held.
  std::map<std::string, std::size_t> relations;

  std::size_t Total() const;
};

// Register layouts:
//   bell            2 bits, parity then phase (the Bell code).
//   reflect-reflect 4 bits, TP's register: code of pair (2,3) then pair (0,1).
//   measure-all     as reflect-reflect; relation "alice_bob_equal".
//   mixed-ops       7 bits: TP's Z results at original positions 2,1,0, Bob's
//                   bits at transit positions 1,0, Alice's at 2,0.
//                   Relations "tp_alice", "tp_bob", "three_way".
// Throws std::invalid_argument for zero shots.
Histogram RunScenario(const ScenarioSpec& spec);

struct MixedOpsReport {
  bool swapped = false;
  std::size_t shots = 0;
  // Original positions carrying each relation.
  std::size_t tp_alice_position = 0;
  std::size_t tp_bob_position = 0;
  std::size_t three_way_position = 0;
  std::size_t tp_alice_holds = 0;
  std::size_t tp_bob_holds = 0;
  std::size_t three_way_holds = 0;

  bool AllHold() const {
    return tp_alice_holds == shots && tp_bob_holds == shots && three_way_holds == shots;
  }
};

// Throws std::invalid_argument unless spec.kind is kMixedOps.
MixedOpsReport MixedOpsConsistency(const ScenarioSpec& spec);

// ---------------------------------------------------------------------------
// Qubit efficiency.

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational Make(std::int64_t num, std::int64_t den);
  std::string ToString() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

// a*n + b.
struct LinearForm {
  std::int64_t a = 0;
  std::int64_t b = 0;

  std::int64_t At(std::int64_t n) const { return a * n + b; }
  std::string ToString() const;  // "18n+1", "16n", "0"
  friend LinearForm operator+(LinearForm x, LinearForm y) { return {x.a + y.a, x.b + y.b}; }
  friend bool operator==(const LinearForm&, const LinearForm&) = default;
};

struct EfficiencyRow {
  std::string label;
  std::string resource;
  std::string transmission;  // "distributed" or "circular"
  bool swapping = false;
  bool pre_shared_key = false;
  LinearForm shared_bits{1, 0};  // c
  // q + b, the denominator of the efficiency.
  LinearForm consumed;
  LinearForm psk_cost;
  LinearForm comparison_cost;
  // Split of `consumed` into qubits and classical bits, when derived here.
  std::optional<LinearForm> qubits;
  std::optional<LinearForm> classical_bits;

  Rational Eta(std::int64_t n) const;
  // psk_cost + comparison_cost == consumed.
  bool CostsConsistent() const { return psk_cost + comparison_cost == consumed; }
};

// The eight comparison rows; the last one is this protocol, derived from
// its resource counts (8n TP qubits, 4n + 4n regenerated, 2n + 1 bits).
std::vector<EfficiencyRow> EfficiencyTable();
EfficiencyRow OwnProtocolRow();

struct RunEfficiency {
  std::size_t shared_bits = 0;
  // TP qubits plus half of every qubit a user received: each user
  // regenerates the qubits it measures, half of them on average.
  std::size_t qubits_budgeted = 0;
  // TP qubits plus the regenerations that actually happened.
  std::size_t qubits_realized = 0;
  std::size_t classical_bits = 0;
  Rational eta;
  Rational eta_realized;
};

// Throws std::invalid_argument unless the run completed.
RunEfficiency EfficiencyFromRun(const Transcript& transcript);

// ---------------------------------------------------------------------------
// Detection statistics.

struct DetectionPoint {
  std::size_t k = 0;
  double analytic = 0.0;  // 1 - (1 - p)^k
  Proportion empirical;   // disjoint blocks of k checks
};

// `outcomes` is a per-check violation sequence; it is cut into disjoint
// blocks of k and a block counts as detected if any check in it failed.
std::vector<DetectionPoint> DetectionCurve(double per_check_p,
                                           std::span<const std::size_t> ks,
                                           const std::vector<bool>& outcomes,
                                           double z = 1.96);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 1.0;
};

// Pearson test that each class's 0/1 counts are consistent with a fair bit.
// Classes with no events are skipped.
ChiSquareResult FairBitChiSquare(const std::map<std::string, std::array<std::size_t, 2>>& counts);

// K_AB bit counts keyed by what TP saw for the qubit: the plan, the
// published Bell result of its restored pair and its original position.
void TallyKabByTpView(const Transcript& transcript,
                      std::map<std::string, std::array<std::size_t, 2>>& counts);

}  // namespace sqpc

#endif  // SQPC_ANALYSIS_H_
