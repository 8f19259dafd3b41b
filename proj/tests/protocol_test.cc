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

#include "sqpc/protocol.h"

#include <cmath>
#include <map>
#include <string>

#include <gtest/gtest.h>

namespace sqpc {
namespace {

constexpr UserOp M = UserOp::kMeasure;
constexpr UserOp R = UserOp::kReflect;

TEST(Bits, ParseAndFormat) {
  EXPECT_EQ(ParseBits("0110"), (Bits{0, 1, 1, 0}));
  EXPECT_EQ(ParseBits("0xA3"), (Bits{1, 0, 1, 0, 0, 0, 1, 1}));
  EXPECT_EQ(FormatBits(Bits{1, 0, 1}), "101");
  EXPECT_THROW(ParseBits("012"), std::invalid_argument);
  EXPECT_THROW(ParseBits("0xZ"), std::invalid_argument);
}

TEST(Positions, SwapMapIsInvolution) {
  for (bool swapped : {false, true}) {
    for (std::size_t t = 0; t < 4; ++t) {
      EXPECT_EQ(OriginalPosition(swapped, OriginalPosition(swapped, t)), t);
    }
  }
  EXPECT_EQ(OriginalPosition(true, 1), 2u);
  EXPECT_EQ(OriginalPosition(true, 3), 3u);
}

TEST(Preparation, SizesAndPairing) {
  Rng rng(1);
  Preparation prep = TpPrepare(1, rng, TpBehavior{});
  ASSERT_EQ(prep.groups.size(), 2u);
  std::size_t qubits = 0;
  for (const auto& g : prep.groups) qubits += g.state.num_qubits();
  EXPECT_EQ(qubits, 8u);
  EXPECT_THROW(TpPrepare(0, rng, TpBehavior{}), std::invalid_argument);
}

TEST(Preparation, SwappedGroupHasCrossPairForm) {
  Rng rng(0);
  GroupRegister reg = TpBehavior{}.PrepareGroup({0, true}, rng);
  // After re-pairing, transit positions (0,1) and (2,3) each hold a pair
  // of matched Bell states across the two original pairs.
  auto c = BellDecomposition(reg.state, {{0, 1}, {2, 3}});
  for (BellKind k : kAllBellKinds) {
    for (BellKind l : kAllBellKinds) {
      EXPECT_NEAR(std::abs(c.at({k, l})), k == l ? 0.5 : 0.0, 1e-12);
    }
  }
  GroupRegister plain = TpBehavior{}.PrepareGroup({0, false}, rng);
  EXPECT_NEAR(std::abs(BellDecomposition(plain.state, {{0, 1}, {2, 3}})
                           .at({BellKind::kPhiPlus, BellKind::kPhiPlus})),
              1.0, 1e-12);
}

TEST(UserOps, MeasureEmitsEigenstate) {
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    GroupRegister reg = TpBehavior{}.PrepareGroup({0, false}, rng);
    auto bit = ApplyUserOp(reg, 2, M, rng);
    ASSERT_TRUE(bit.has_value());
    EXPECT_NEAR(ZProbabilities(reg.state, reg.transit[2])[*bit], 1.0, 1e-12);
    EXPECT_FALSE(ApplyUserOp(reg, 0, R, rng).has_value());
  }
}

TEST(UserOps, BothMeasureUnswappedPairAgree) {
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    GroupRegister reg = TpBehavior{}.PrepareGroup({0, false}, rng);
    int a0 = *ApplyUserOp(reg, 0, M, rng);
    int a1 = *ApplyUserOp(reg, 1, M, rng);
    int b0 = *ApplyUserOp(reg, 0, M, rng);
    int b1 = *ApplyUserOp(reg, 1, M, rng);
    EXPECT_EQ(a0, b0);
    EXPECT_EQ(a1, b1);
    EXPECT_EQ(a0, a1);  // phi+ halves agree
  }
}

TEST(Restore, SwappedAllReflectGivesPhiPlus) {
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    GroupRegister reg = TpBehavior{}.PrepareGroup({0, true}, rng);
    TpRestore(reg, {0, true});
    EXPECT_EQ(MeasureBell(reg.state, reg.transit[0], reg.transit[1], rng).kind,
              BellKind::kPhiPlus);
    EXPECT_EQ(MeasureBell(reg.state, reg.transit[2], reg.transit[3], rng).kind,
              BellKind::kPhiPlus);
  }
}

TEST(Selection, ExactlyHalfAndUniform) {
  Rng rng(12);
  EXPECT_EQ(SelectCheckGroups(16, rng).size(), 8u);
  const int draws = 10000;
  std::vector<int> hits(8, 0);
  for (int i = 0; i < draws; ++i) {
    for (std::size_t g : SelectCheckGroups(8, rng)) ++hits[g];
  }
  for (int h : hits) EXPECT_NEAR(h / static_cast<double>(draws), 0.5, 0.02);
}

// Literal classification of every op pattern of one restored pair.
// Columns: Alice/Bob ops on the first qubit, then on the second, then the
// expected class of each qubit. K = K_AB, A = K_TA, B = K_TB, E = Bell
// check, Z = Z check, - = discarded.
struct TableRow {
  const char* ops;  // "MM RM": Alice,Bob on qubit 1; Alice,Bob on qubit 2
  const char* check;
  const char* other;
};

constexpr TableRow kTable[] = {
    {"MM MM", "KK", "ZZ"}, {"MM MR", "K-", "ZA"}, {"MM RM", "K-", "ZB"},
    {"MM RR", "K-", "Z-"}, {"MR MM", "-K", "AZ"}, {"MR MR", "--", "AA"},
    {"MR RM", "--", "AB"}, {"MR RR", "--", "A-"}, {"RM MM", "-K", "BZ"},
    {"RM MR", "--", "BA"}, {"RM RM", "--", "BB"}, {"RM RR", "--", "B-"},
    {"RR MM", "-K", "-Z"}, {"RR MR", "--", "-A"}, {"RR RM", "--", "-B"},
    {"RR RR", "EE", "EE"},
};

char ClassLetter(SiftClass c) {
  switch (c) {
    case SiftClass::kKabBit: return 'K';
    case SiftClass::kKtaBit: return 'A';
    case SiftClass::kKtbBit: return 'B';
    case SiftClass::kEcBell: return 'E';
    case SiftClass::kEcZ: return 'Z';
    case SiftClass::kDiscard: return '-';
  }
  return '?';
}

UserOp OpOf(char c) { return c == 'M' ? M : R; }

TEST(Sift, ExhaustivePairTable) {
  for (const TableRow& row : kTable) {
    const std::string ops = row.ops;
    std::array<UserOp, 2> alice{OpOf(ops[0]), OpOf(ops[3])};
    std::array<UserOp, 2> bob{OpOf(ops[1]), OpOf(ops[4])};
    for (bool check : {true, false}) {
      auto got = SiftPair(check, alice, bob);
      std::string letters{ClassLetter(got[0]), ClassLetter(got[1])};
      EXPECT_EQ(letters, check ? row.check : row.other) << ops << " check=" << check;
    }
  }
}

GroupRecord RecordWith(bool swapped, bool check, const std::string& alice,
                       const std::string& bob) {
  GroupRecord r;
  r.plan = {0, swapped};
  r.check_group = check;
  for (std::size_t t = 0; t < 4; ++t) {
    r.alice_op[t] = OpOf(alice[t]);
    r.bob_op[t] = OpOf(bob[t]);
  }
  return r;
}

TEST(Sift, GroupMapsTransitToOriginal) {
  // Transit ops MRMR / MMRR on a swapped group: original position 1 is
  // transit 2 and vice versa.
  GroupRecord r = RecordWith(true, false, "MRMR", "MMRR");
  EXPECT_EQ(r.AliceOpAtOriginal(1), M);
  EXPECT_EQ(r.BobOpAtOriginal(1), R);
  auto cls = Sift(r);
  // originals: 0 (M,M) Z, 1 (M,R) A, 2 (R,M) B, 3 (R,R) lone -> discard
  EXPECT_EQ(cls[0], SiftClass::kEcZ);
  EXPECT_EQ(cls[1], SiftClass::kKtaBit);
  EXPECT_EQ(cls[2], SiftClass::kKtbBit);
  EXPECT_EQ(cls[3], SiftClass::kDiscard);

  GroupRecord missing;
  EXPECT_THROW(Sift(missing), IncompleteRecord);
}

TEST(Keys, AssembleOrdersAndTruncates) {
  KeyFragment k = {{1, 2, 0, 0}, {0, 0, 3, 3}, {1, 0, 1, 2}};
  KeyTriple t = AssembleKeys(k, k, k, 2);
  EXPECT_EQ(KeyValues(t.k_ab), (Bits{1, 0}));
  EXPECT_EQ(t.k_ab[0].group, 0u);
  EXPECT_EQ(t.k_ab[0].transit_position, 1u);
  try {
    AssembleKeys(k, {}, k, 2);
    FAIL() << "expected InsufficientKey";
  } catch (const InsufficientKey& e) {
    EXPECT_EQ(e.key(), "k_ta");
    EXPECT_EQ(e.have(), 0u);
    EXPECT_EQ(e.need(), 2u);
  }
}

TEST(Comparison, EncryptThenCompare) {
  Bits m_a{1, 0, 1, 1}, m_b{1, 0, 1, 1}, k_ab{0, 1, 1, 0}, k_ta{1, 1, 0, 0},
      k_tb{0, 0, 1, 1};
  auto q_a = Encrypt(m_a, k_ab, k_ta);
  EXPECT_EQ(q_a, (Bits{0, 0, 0, 1}));
  auto q_b = Encrypt(m_b, k_ab, k_tb);
  EXPECT_EQ(Compare(q_a, q_b, k_ta, k_tb).verdict, Verdict::kEqual);
  m_b[2] = 0;
  auto q_b2 = Encrypt(m_b, k_ab, k_tb);
  auto out = Compare(q_a, q_b2, k_ta, k_tb);
  EXPECT_EQ(out.verdict, Verdict::kNotEqual);
  EXPECT_EQ(out.r, (Bits{0, 0, 1, 0}));
  EXPECT_THROW(Encrypt(m_a, Bits{0}, k_ta), std::invalid_argument);
}

Bits FromMask(unsigned v, int width) {
  Bits b(width);
  for (int i = 0; i < width; ++i) b[i] = (v >> i) & 1U;
  return b;
}

TEST(Comparison, VerdictDependsOnlyOnSecretDifference) {
  constexpr int w = 4;
  Rng rng(77);
  for (unsigned a = 0; a < 16; ++a) {
    for (unsigned b = 0; b < 16; ++b) {
      for (unsigned key = 0; key < 16; ++key) {
        Bits k_ab = FromMask(key, w);
        Bits k_ta = FromMask(static_cast<unsigned>(rng.Below(16)), w);
        Bits k_tb = FromMask(static_cast<unsigned>(rng.Below(16)), w);
        auto q_a = Encrypt(FromMask(a, w), k_ab, k_ta);
        auto q_b = Encrypt(FromMask(b, w), k_ab, k_tb);
        auto out = Compare(q_a, q_b, k_ta, k_tb);
        ASSERT_EQ(out.verdict == Verdict::kEqual, a == b);
        ASSERT_EQ(out.r, FromMask(a ^ b, w));
      }
    }
  }
}

ProtocolConfig Config(std::size_t n, std::uint64_t seed, const std::string& a,
                      const std::string& b) {
  ProtocolConfig c;
  c.n = n;
  c.seed = seed;
  c.secret_a = ParseBits(a);
  c.secret_b = ParseBits(b);
  return c;
}

Transcript CompletedRun(ProtocolConfig c) {
  return RunProtocolWithRetry(c, 20);
}

TEST(Run, HonestEqualAndNotEqual) {
  Transcript eq = CompletedRun(Config(8, 42, "10110010", "10110010"));
  ASSERT_EQ(eq.status, RunStatus::kCompleted) << eq.status_detail;
  EXPECT_EQ(eq.outcome->verdict, Verdict::kEqual);
  EXPECT_EQ(eq.violations.TotalViolations(), 0u);
  EXPECT_GT(eq.violations.TotalChecks(), 0u);

  Transcript ne = CompletedRun(Config(8, 42, "10110010", "10110011"));
  ASSERT_EQ(ne.status, RunStatus::kCompleted);
  EXPECT_EQ(ne.outcome->verdict, Verdict::kNotEqual);
  EXPECT_EQ(ne.outcome->r, ParseBits("00000001"));
}

TEST(Run, Deterministic) {
  auto c = Config(8, 5, "11110000", "00001111");
  Transcript a = RunProtocol(c);
  Transcript b = RunProtocol(c);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.check_groups, b.check_groups);
  ASSERT_EQ(a.groups.size(), b.groups.size());
  for (std::size_t g = 0; g < a.groups.size(); ++g) {
    EXPECT_EQ(a.groups[g].alice_bit, b.groups[g].alice_bit);
    EXPECT_EQ(a.groups[g].published, b.groups[g].published);
  }
  EXPECT_EQ(a.q_a, b.q_a);
}

TEST(Run, ConfigValidation) {
  EXPECT_THROW(RunProtocol(Config(2, 0, "1", "10")), std::invalid_argument);
  auto c = Config(1, 0, "1", "1");
  c.threshold = 1.5;
  EXPECT_THROW(RunProtocol(c), std::invalid_argument);
  c.n = 0;
  c.threshold = 0;
  EXPECT_THROW(RunProtocol(c), std::invalid_argument);
}

TEST(Run, HonestRecordsMatchDerivedRelations) {
  std::size_t phi_pub = 0, psi_pub = 0, mm_pairs = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Transcript t = RunProtocol(Config(4, seed, "0101", "0101"));
    EXPECT_EQ(t.violations.TotalViolations(), 0u);
    for (const GroupRecord& g : t.groups) {
      if (g.check_group) {
        for (std::size_t p = 0; p < 2; ++p) {
          ASSERT_TRUE(g.published[p].has_value());
          const std::size_t o0 = 2 * p, o1 = 2 * p + 1;
          bool all_measured = g.AliceOpAtOriginal(o0) == M && g.BobOpAtOriginal(o0) == M &&
                              g.AliceOpAtOriginal(o1) == M && g.BobOpAtOriginal(o1) == M;
          if (!all_measured) continue;
          ++mm_pairs;
          BellKind k = *g.published[p];
          if (k == BellKind::kPhiPlus || k == BellKind::kPhiMinus) ++phi_pub;
          else ++psi_pub;
        }
        continue;
      }
      for (std::size_t t_pos = 0; t_pos < 4; ++t_pos) {
        const std::size_t o = OriginalPosition(g.plan.swapped, t_pos);
        if (!g.sift[o]) continue;
        if (*g.sift[o] == SiftClass::kKtaBit) EXPECT_EQ(g.tp_bit[o], g.alice_bit[t_pos]);
        if (*g.sift[o] == SiftClass::kKtbBit) EXPECT_EQ(g.tp_bit[o], g.bob_bit[t_pos]);
        if (*g.sift[o] == SiftClass::kEcZ) {
          EXPECT_EQ(g.tp_bit[o], g.alice_bit[t_pos]);
          EXPECT_EQ(g.tp_bit[o], g.bob_bit[t_pos]);
        }
      }
    }
  }
  EXPECT_GT(mm_pairs, 0u);
  EXPECT_GT(phi_pub, 0u);
  EXPECT_EQ(psi_pub, 0u);
}

TEST(Run, KeyCopiesAgreeWhenHonest) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Transcript t = RunProtocol(Config(6, seed, "110011", "110010"));
    EXPECT_EQ(t.violations.kab_disagreements, 0u);
    EXPECT_EQ(t.violations.kta_disagreements, 0u);
    EXPECT_EQ(t.violations.ktb_disagreements, 0u);
    if (t.status != RunStatus::kCompleted) continue;
    const PartyView& alice = t.View(Role::kAlice);
    const PartyView& bob = t.View(Role::kBob);
    const PartyView& tp = t.View(Role::kTp);
    EXPECT_EQ(alice.keys.at("k_ab"), bob.keys.at("k_ab"));
    EXPECT_EQ(alice.keys.at("k_ta"), tp.keys.at("k_ta"));
    EXPECT_EQ(bob.keys.at("k_tb"), tp.keys.at("k_tb"));
  }
}

TEST(Run, ViewsHoldOnlyOwnKnowledge) {
  Transcript t = CompletedRun(Config(4, 9, "1010", "1010"));
  ASSERT_EQ(t.status, RunStatus::kCompleted);
  const PartyView& alice = t.View(Role::kAlice);
  const PartyView& bob = t.View(Role::kBob);
  const PartyView& tp = t.View(Role::kTp);
  EXPECT_FALSE(alice.keys.contains("k_tb"));
  EXPECT_FALSE(bob.keys.contains("k_ta"));
  EXPECT_FALSE(tp.keys.contains("k_ab"));
  EXPECT_TRUE(alice.plans.empty());
  EXPECT_TRUE(bob.tp_measurements.empty());
  EXPECT_FALSE(tp.plans.empty());
  EXPECT_TRUE(tp.own_ops.empty());
  EXPECT_TRUE(tp.received_q_a.has_value());
  EXPECT_FALSE(alice.received_q_b.has_value());
}

TEST(Run, FragmentMeansNearN) {
  // Expected lengths: 4n check qubits with P(MM)=1/4 -> n; 4n remaining
  // qubits with P(MR)=P(RM)=1/4 -> n each.
  const std::size_t n = 16;
  std::map<std::string, double> sums;
  const int runs = 100;
  for (int s = 0; s < runs; ++s) {
    Transcript t = RunProtocol(Config(n, 1000 + s, std::string(n, '0'), std::string(n, '0')));
    for (const auto& [key, len] : t.fragment_lengths) sums[key] += len;
  }
  for (const char* key : {"k_ab", "k_ta", "k_tb"}) {
    ASSERT_TRUE(sums.contains(key)) << key;
    EXPECT_NEAR(sums[key] / runs, static_cast<double>(n), 0.15 * n) << key;
  }
}

TEST(Run, RetryUsesDerivedSeeds) {
  // n=1 runs often fall short of key material.
  std::size_t shortfalls = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto c = Config(1, seed, "1", "1");
    Transcript first = RunProtocol(c);
    if (first.status != RunStatus::kInsufficientKey) continue;
    ++shortfalls;
    std::size_t attempts = 0;
    Transcript retried = RunProtocolWithRetry(c, 50, nullptr, nullptr, &attempts);
    EXPECT_GT(attempts, 1u);
    EXPECT_EQ(retried.status, RunStatus::kCompleted);
    auto again = c;
    again.seed = DeriveSeed(c.seed, "attempt", attempts - 1);
    EXPECT_EQ(RunProtocol(again).q_a, retried.q_a);
  }
  EXPECT_GT(shortfalls, 0u);
}

TEST(Run, ResourceCounters) {
  Transcript t = CompletedRun(Config(8, 1, "00000000", "11111111"));
  ASSERT_EQ(t.status, RunStatus::kCompleted);
  const ResourceCounters& r = t.resources;
  EXPECT_EQ(r.tp_prepared_qubits, 8u * 8);
  EXPECT_EQ(r.alice_received_qubits, 8u * 8);
  EXPECT_EQ(r.bob_received_qubits, 8u * 8);
  EXPECT_EQ(r.comparison_bits_published, 2u * 8 + 1);
  EXPECT_EQ(r.compared_bits, 8u);
  std::size_t alice_measured = 0;
  for (const auto& g : t.groups)
    for (const auto& op : g.alice_op) alice_measured += op == M;
  EXPECT_EQ(r.alice_regenerated_qubits, alice_measured);
}

}  // namespace
}  // namespace sqpc
