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

#include <cmath>
#include <set>

#include <gtest/gtest.h>

namespace sqpc {
namespace {

TEST(Register, HighestSlotLeftmost) {
  const int bits[] = {1, 0, 0, 1, 1};
  EXPECT_EQ(RegisterString(bits), "11001");
  const int two[] = {1, 0};
  EXPECT_EQ(RegisterString(two), "01");
}

TEST(Scenario, ParseNames) {
  EXPECT_EQ(ParseScenarioKind("measure-all"), ScenarioKind::kMeasureAll);
  EXPECT_EQ(ScenarioName(ScenarioKind::kMixedOps), "mixed-ops");
  EXPECT_FALSE(ParseScenarioKind("ghz").has_value());
}

TEST(Scenario, BellPrepMeasureIsDeterministic) {
  for (BellKind kind : kAllBellKinds) {
    ScenarioSpec spec;
    spec.bell = kind;
    spec.seed = 3;
    Histogram h = RunScenario(spec);
    ASSERT_EQ(h.counts.size(), 1u) << BellKindName(kind);
    EXPECT_EQ(h.counts.begin()->first, BellCodeString(kind));
    EXPECT_EQ(h.counts.begin()->second, 1024u);
  }
  ScenarioSpec minus;
  minus.bell = BellKind::kPhiMinus;
  EXPECT_EQ(RunScenario(minus).counts.at("01"), 1024u);
}

TEST(Scenario, ReflectReflectAlwaysZero) {
  for (bool swapped : {false, true}) {
    ScenarioSpec spec{ScenarioKind::kReflectReflect, BellKind::kPhiPlus, swapped, 1024, 7};
    Histogram h = RunScenario(spec);
    ASSERT_EQ(h.counts.size(), 1u);
    EXPECT_EQ(h.counts.at("0000"), 1024u);
  }
}

TEST(Scenario, MeasureAllSupport) {
  for (bool swapped : {false, true}) {
    ScenarioSpec spec{ScenarioKind::kMeasureAll, BellKind::kPhiPlus, swapped, 4096, 11};
    Histogram h = RunScenario(spec);
    std::set<std::string> support;
    for (const auto& [k, v] : h.counts) support.insert(k);
    EXPECT_EQ(support, (std::set<std::string>{"0000", "0001", "0100", "0101"}));
    for (const auto& [k, v] : h.counts) EXPECT_NEAR(v / 4096.0, 0.25, 0.03) << k;
    EXPECT_EQ(h.relations.at("alice_bob_equal"), 4096u);
    EXPECT_EQ(h.Total(), 4096u);
  }
}

TEST(Scenario, MixedOpsRelations) {
  for (bool swapped : {false, true}) {
    ScenarioSpec spec{ScenarioKind::kMixedOps, BellKind::kPhiPlus, swapped, 1024, 5};
    MixedOpsReport r = MixedOpsConsistency(spec);
    EXPECT_TRUE(r.AllHold());
    EXPECT_EQ(r.three_way_position, 0u);
    // Alice measures transit 2 and Bob reflects it; the re-pairing moves
    // that qubit to original position 1.
    EXPECT_EQ(r.tp_alice_position, swapped ? 1u : 2u);
    EXPECT_EQ(r.tp_bob_position, swapped ? 2u : 1u);
    Histogram h = RunScenario(spec);
    EXPECT_EQ(h.width, 7u);
    for (const char* rel : {"tp_alice", "tp_bob", "three_way"}) {
      EXPECT_EQ(h.relations.at(rel), 1024u) << rel;
    }
  }
  EXPECT_THROW(MixedOpsConsistency(ScenarioSpec{}), std::invalid_argument);
}

TEST(Scenario, ZeroShotsRejected) {
  ScenarioSpec spec;
  spec.shots = 0;
  EXPECT_THROW(RunScenario(spec), std::invalid_argument);
}

TEST(Efficiency, RationalBasics) {
  EXPECT_EQ(Rational::Make(2, 38), (Rational{1, 19}));
  EXPECT_EQ(Rational::Make(8, 145).ToString(), "8/145");
  EXPECT_EQ((LinearForm{18, 1}).ToString(), "18n+1");
  EXPECT_EQ((LinearForm{16, 0}).ToString(), "16n");
  EXPECT_EQ((LinearForm{0, 0}).ToString(), "0");
}

TEST(Efficiency, EightRowsWithSelfConsistentEta) {
  auto rows = EfficiencyTable();
  ASSERT_EQ(rows.size(), 8u);
  for (const auto& row : rows) {
    for (std::int64_t n : {1, 10, 100}) {
      EXPECT_EQ(row.Eta(n), Rational::Make(row.shared_bits.At(n), row.consumed.At(n)))
          << row.label;
    }
  }
  EXPECT_EQ(rows.front().Eta(1), (Rational{1, 163}));
  EXPECT_EQ(rows.front().Eta(7), Rational::Make(7, 162 * 7 + 1));
}

TEST(Efficiency, OnlyOneRowHasInconsistentCosts) {
  std::size_t inconsistent = 0;
  for (const auto& row : EfficiencyTable()) {
    if (!row.CostsConsistent()) {
      ++inconsistent;
      EXPECT_EQ(row.psk_cost + row.comparison_cost, (LinearForm{100, 1}));
      EXPECT_EQ(row.consumed, (LinearForm{102, 1}));
    }
  }
  EXPECT_EQ(inconsistent, 1u);
}

TEST(Efficiency, OwnRowFromCounts) {
  EfficiencyRow own = OwnProtocolRow();
  ASSERT_TRUE(own.qubits && own.classical_bits);
  // 8n prepared, 4n + 4n regenerated on average; Q_A, Q_B and the verdict.
  EXPECT_EQ(*own.qubits, (LinearForm{16, 0}));
  EXPECT_EQ(*own.classical_bits, (LinearForm{2, 1}));
  EXPECT_EQ(own.Eta(1), (Rational{1, 19}));
  const std::int64_t big = 1000000000;
  Rational r = own.Eta(big);
  EXPECT_NEAR(static_cast<double>(r.num) / static_cast<double>(r.den), 1.0 / 18.0, 1e-9);
}

TEST(Efficiency, FromRealRuns) {
  for (std::size_t n : {1, 8, 64}) {
    ProtocolConfig c;
    c.n = n;
    c.seed = 100 + n;
    c.secret_a = Bits(n, 1);
    c.secret_b = Bits(n, 1);
    Transcript t = RunProtocolWithRetry(c, 100);
    ASSERT_EQ(t.status, RunStatus::kCompleted);
    RunEfficiency e = EfficiencyFromRun(t);
    const auto nn = static_cast<std::int64_t>(n);
    EXPECT_EQ(e.eta, Rational::Make(nn, 18 * nn + 1)) << n;
    EXPECT_EQ(e.qubits_budgeted, 16 * n);
    EXPECT_EQ(e.classical_bits, 2 * n + 1);
    EXPECT_EQ(e.qubits_realized,
              8 * n + t.resources.alice_regenerated_qubits + t.resources.bob_regenerated_qubits);
  }
  Transcript aborted;
  aborted.status = RunStatus::kDetectionAbort;
  EXPECT_THROW(EfficiencyFromRun(aborted), std::invalid_argument);
}

TEST(Detection, AnalyticCurve) {
  const std::size_t ks[] = {1, 10};
  auto curve = DetectionCurve(0.5, ks, {});
  EXPECT_DOUBLE_EQ(curve[0].analytic, 0.5);
  EXPECT_NEAR(curve[1].analytic, 1.0 - std::pow(2.0, -10), 1e-15);
  EXPECT_NEAR(curve[1].analytic, 0.999, 1e-3);
}

TEST(Detection, EmpiricalBlocks) {
  Rng rng(1);
  std::vector<bool> outcomes(40000);
  for (std::size_t i = 0; i < outcomes.size(); ++i) outcomes[i] = rng.Uniform() < 0.3;
  const std::size_t ks[] = {1, 2, 4};
  for (const auto& pt : DetectionCurve(0.3, ks, outcomes, 3.0)) {
    EXPECT_EQ(pt.empirical.trials, 40000 / pt.k);
    EXPECT_GE(pt.analytic, pt.empirical.ci_low) << pt.k;
    EXPECT_LE(pt.analytic, pt.empirical.ci_high) << pt.k;
  }
  // Hand-checked blocks: [1,0] [0,0] [0,1] -> 2 of 3 detected.
  const std::size_t two[] = {2};
  auto pts = DetectionCurve(0.5, two, {true, false, false, false, false, true, true});
  EXPECT_EQ(pts[0].empirical.successes, 2u);
  EXPECT_EQ(pts[0].empirical.trials, 3u);
  const std::size_t zero[] = {0};
  EXPECT_THROW(DetectionCurve(0.5, zero, {}), std::invalid_argument);
}

TEST(ChiSquare, MatchesClosedForm) {
  // One class, 60/40: statistic 4, one degree of freedom, p = erfc(sqrt(2)).
  ChiSquareResult r = FairBitChiSquare({{"a", {60, 40}}});
  EXPECT_NEAR(r.statistic, 4.0, 1e-12);
  EXPECT_EQ(r.degrees_of_freedom, 1u);
  EXPECT_NEAR(r.p_value, std::erfc(std::sqrt(2.0)), 1e-10);

  // Two classes, df 2: p = exp(-x/2).
  ChiSquareResult two = FairBitChiSquare({{"a", {60, 40}}, {"b", {50, 50}}, {"c", {0, 0}}});
  EXPECT_EQ(two.degrees_of_freedom, 2u);
  EXPECT_NEAR(two.p_value, std::exp(-2.0), 1e-10);
  EXPECT_EQ(FairBitChiSquare({}).p_value, 1.0);
}

TEST(ChiSquare, TallyCoversEveryKabBit) {
  std::map<std::string, std::array<std::size_t, 2>> counts;
  std::size_t expected = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    ProtocolConfig c;
    c.n = 8;
    c.seed = seed;
    c.secret_a = Bits(8, 0);
    c.secret_b = Bits(8, 0);
    Transcript t = RunProtocol(c);
    TallyKabByTpView(t, counts);
    expected += t.fragment_lengths.at("k_ab");
  }
  std::size_t total = 0;
  for (const auto& [key, c] : counts) {
    total += c[0] + c[1];
    EXPECT_EQ(key.find("psi"), std::string::npos) << key;
  }
  EXPECT_EQ(total, expected);
}

}  // namespace
}  // namespace sqpc
