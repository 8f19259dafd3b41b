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

#ifndef SQPC_PROTOCOL_H_
#define SQPC_PROTOCOL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sqpc/rng.h"
#include "sqpc/statevector.h"

// Two-party semi-quantum private comparison over Bell-state groups.
//
// TP prepares 2n groups of two |phi+> pairs, re-pairs each group at random
// (SWAP of the middle qubits), and sends the qubits round the loop
// TP -> Alice -> Bob -> TP. Each classical user either measures a qubit in
// the Z basis and resends the eigenstate, or reflects it. TP undoes the
// re-pairing, half of the groups are opened as check groups (Bell
// measurement, K_AB), the rest are measured according to the announced
// operations (K_TA, K_TB, checks), and the secrets are compared through the
// one-time pads R = Q_A ^ Q_B ^ K_TA ^ K_TB = M_A ^ M_B.

namespace sqpc {

inline constexpr std::size_t kGroupQubits = 4;

enum class Role { kTp, kAlice, kBob };
enum class UserOp { kMeasure, kReflect };
enum class ChannelLeg { kTpToAlice, kAliceToBob, kBobToTp };
enum class SiftClass { kKabBit, kKtaBit, kKtbBit, kEcBell, kEcZ, kDiscard };
enum class RunStatus { kCompleted, kDetectionAbort, kInsufficientKey };
enum class Verdict { kEqual, kNotEqual };

std::string_view RoleName(Role role);
std::string_view LegName(ChannelLeg leg);
std::string_view SiftClassName(SiftClass cls);
std::string_view RunStatusName(RunStatus status);
std::string_view VerdictName(Verdict verdict);
char UserOpChar(UserOp op);  // 'M' or 'R'

using Bits = std::vector<std::uint8_t>;

// "0101" <-> {0,1,0,1}. Hex input with a 0x prefix expands to 4 bits per
// digit, most significant first.
Bits ParseBits(std::string_view text);
std::string FormatBits(std::span<const std::uint8_t> bits);

// Position a qubit occupies after TP undoes the re-pairing. The SWAP is its
// own inverse, so the same map takes original positions to transit ones.
constexpr std::size_t OriginalPosition(bool swapped, std::size_t transit) {
  if (!swapped) return transit;
  if (transit == 1) return 2;
  if (transit == 2) return 1;
  return transit;
}

// Error types. InsufficientKey and DetectionAbort are also reported through
// Transcript::status by RunProtocol.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientKey : public ProtocolError {
 public:
  InsufficientKey(std::string key, std::size_t have, std::size_t need);
  const std::string& key() const { return key_; }
  std::size_t have() const { return have_; }
  std::size_t need() const { return need_; }

 private:
  std::string key_;
  std::size_t have_;
  std::size_t need_;
};

class KeyConsistencyViolation : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class IncompleteRecord : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

struct GroupPlan {
  std::size_t group_index = 0;
  bool swapped = false;
};

// Quantum register travelling with one group. The state may hold more than
// the four transit qubits: adversaries append probes, ancillas and fakes.
struct GroupRegister {
  std::size_t group_index = 0;
  StateVector state{kGroupQubits};
  // State index of the qubit currently occupying each transit position.
  std::array<std::size_t, kGroupQubits> transit{0, 1, 2, 3};
  // Adversary-owned qubit associated with each transit position.
  std::array<std::optional<std::size_t>, kGroupQubits> probe;
  // Genuine qubits withheld by an interceptor while fakes travel.
  std::array<std::optional<std::size_t>, kGroupQubits> held;

  // Appends a fresh qubit in |bit> and returns its index.
  std::size_t AppendQubit(int bit);
  void Apply(GateKind gate, std::initializer_list<std::size_t> qubits) {
    state = ApplyGate(state, gate, qubits);
  }
};

// One check outcome for the eavesdropping statistics.
struct CheckEvent {
  SiftClass cls = SiftClass::kEcBell;  // kEcBell or kEcZ
  int step = 5;                        // 5 or 6
  std::vector<std::size_t> original_positions;
  bool passed = true;
};

struct TpMeasurement {
  MeasurementRecord record;
  // Group-local original positions measured (after restoration).
  std::vector<std::size_t> positions;
};

struct GroupRecord {
  GroupPlan plan;
  bool check_group = false;
  // Indexed by transit position (what the users saw).
  std::array<std::optional<UserOp>, kGroupQubits> alice_op;
  std::array<std::optional<int>, kGroupQubits> alice_bit;
  std::array<std::optional<UserOp>, kGroupQubits> bob_op;
  std::array<std::optional<int>, kGroupQubits> bob_bit;
  std::vector<TpMeasurement> tp_measurements;
  // Step-5 publication for the restored pairs (0,1) and (2,3).
  std::array<std::optional<BellKind>, 2> published;
  // Indexed by original position; filled once the group is sifted.
  std::array<std::optional<SiftClass>, kGroupQubits> sift;
  // TP's Z result per original position, when TP measured in Z.
  std::array<std::optional<int>, kGroupQubits> tp_bit;
  std::vector<CheckEvent> checks;

  UserOp AliceOpAtOriginal(std::size_t original) const;
  UserOp BobOpAtOriginal(std::size_t original) const;
};

// Per-qubit classification of a group by its op pattern (mapped to original
// positions through the plan). Throws IncompleteRecord if an op is missing.
std::array<SiftClass, kGroupQubits> Sift(const GroupRecord& record);
// The same rule on already-mapped ops, for one original pair.
std::array<SiftClass, 2> SiftPair(bool check_group,
                                  std::array<UserOp, 2> alice,
                                  std::array<UserOp, 2> bob);

struct KeyBit {
  std::uint8_t bit = 0;
  std::size_t group = 0;
  std::size_t transit_position = 0;
  std::size_t original_position = 0;
};

using KeyFragment = std::vector<KeyBit>;

struct KeyTriple {
  KeyFragment k_ab;
  KeyFragment k_ta;
  KeyFragment k_tb;
};

Bits KeyValues(const KeyFragment& key);

// Orders each fragment by (group, transit position) and truncates it to
// n bits. Throws InsufficientKey naming the first short key.
KeyTriple AssembleKeys(KeyFragment k_ab, KeyFragment k_ta, KeyFragment k_tb,
                       std::size_t n);

// Q^j = k_ab^j ^ k_own^j ^ m^j. Throws std::invalid_argument on a length
// mismatch.
Bits Encrypt(std::span<const std::uint8_t> secret, std::span<const std::uint8_t> k_ab,
             std::span<const std::uint8_t> k_own);

struct ComparisonOutcome {
  Bits r;
  Verdict verdict = Verdict::kEqual;
};

// R^j = Q_A^j ^ Q_B^j ^ k_ta^j ^ k_tb^j; Equal iff every R^j is 0.
ComparisonOutcome Compare(std::span<const std::uint8_t> q_a,
                          std::span<const std::uint8_t> q_b,
                          std::span<const std::uint8_t> k_ta,
                          std::span<const std::uint8_t> k_tb);

// A key qubit handed to the adversary hook once TP is done with a group.
struct KeyQubit {
  std::size_t transit_position = 0;
  SiftClass cls = SiftClass::kKabBit;
  // The user's copy of the bit (Alice for K_AB and K_TA, Bob for K_TB).
  int bit = 0;
};

// Interception hook on the quantum channel. One instance per run; it may
// keep state across legs and groups but must only touch the transit qubits
// and the qubits it appended itself.
class AttackStrategy {
 public:
  virtual ~AttackStrategy() = default;
  virtual std::string Name() const = 0;
  virtual std::map<std::string, std::string> Params() const { return {}; }
  virtual void Intercept(ChannelLeg leg, GroupRegister& reg, Rng& rng) = 0;
  // Called after TP's last measurement on the group.
  virtual void OnGroupComplete(GroupRegister& /*reg*/,
                               std::span<const KeyQubit> /*key_qubits*/,
                               Rng& /*rng*/) {}
  // Distinguishability of the adversary's retained probes conditioned on
  // the secret-relevant bit, in [0, 1].
  virtual double InfoMetric() const { return 0.0; }
  virtual std::map<std::string, double> Diagnostics() const { return {}; }
};

struct CheckPublication {
  BellKind published = BellKind::kPhiPlus;
  std::vector<MeasurementRecord> measurements;
};

// TP's quantum behaviour. The base class is the honest TP; dishonest
// strategies override parts of it.
class TpBehavior {
 public:
  virtual ~TpBehavior() = default;
  virtual std::string Name() const { return "honest"; }
  // Step 1 for one group: |phi+>|phi+>, re-paired when plan.swapped.
  virtual GroupRegister PrepareGroup(const GroupPlan& plan, Rng& rng) const;
  // Step 5: measure the restored pair starting at `first` (0 or 2) and
  // return what TP publishes.
  virtual CheckPublication PublishCheckPair(GroupRegister& reg, std::size_t first,
                                            Rng& rng) const;
  // Step 6 Bell check on a both-reflect pair; TP alone sees the result.
  virtual BellKind Step6BellCheck(GroupRegister& reg, std::size_t first,
                                  std::vector<MeasurementRecord>& log,
                                  Rng& rng) const;
  // Honest TP runs are expected to keep K_AB consistent.
  virtual bool IsHonest() const { return true; }
};

// Step 1. Throws std::invalid_argument for n == 0.
struct Preparation {
  std::vector<GroupRegister> groups;
  std::vector<GroupPlan> plans;
};
Preparation TpPrepare(std::size_t n, Rng& plan_rng, const TpBehavior& tp);

struct UserAction {
  UserOp op = UserOp::kReflect;
  std::optional<int> bit;
};

// Measure: Z-measure the transit qubit; the collapsed qubit is exactly the
// regenerated |bit> and is unentangled from the rest. Reflect: untouched.
std::optional<int> ApplyUserOp(GroupRegister& reg, std::size_t transit_position,
                               UserOp op, Rng& rng);
// Draws the op uniformly, then applies it.
UserAction UserAct(GroupRegister& reg, std::size_t transit_position, Rng& rng);

// Step 4: undo the re-pairing (SWAP of transit positions 1 and 2).
void TpRestore(GroupRegister& reg, const GroupPlan& plan);

// Step 5 selection: exactly half of the groups, uniformly.
std::set<std::size_t> SelectCheckGroups(std::size_t num_groups, Rng& rng);

struct CheckTally {
  std::size_t checks = 0;
  std::size_t violations = 0;
  double Rate() const {
    return checks == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(checks);
  }
};

struct Step5Result {
  KeyFragment k_ab_alice;
  KeyFragment k_ab_bob;
  CheckTally bell;
  std::size_t kab_disagreements = 0;
};

struct Step6Result {
  KeyFragment k_ta_tp, k_ta_alice;
  KeyFragment k_tb_tp, k_tb_bob;
  CheckTally bell;
  CheckTally z;
  std::size_t kta_disagreements = 0;
  std::size_t ktb_disagreements = 0;
};

struct Group {
  GroupRegister reg;
  GroupRecord record;
};

// Step 5 over restored check groups. TP publishes every pair before the
// users reveal their ops; then both-reflect pairs are checked against phi+
// and both-measure qubits feed K_AB. Throws KeyConsistencyViolation when
// `strict` and Alice's and Bob's K_AB bits differ.
Step5Result Step5VerifyAndExtract(std::span<Group* const> check_groups,
                                  const TpBehavior& tp, Rng& tp_rng, bool strict);

// Step 6 over the remaining restored groups.
Step6Result Step6Process(std::span<Group* const> groups, const TpBehavior& tp,
                         Rng& tp_rng);

struct ProtocolConfig {
  std::size_t n = 8;
  std::uint64_t seed = 0;
  Bits secret_a;
  Bits secret_b;
  // A run aborts when violations / checks exceeds this. 0 aborts on any
  // violation; 1 never aborts.
  double threshold = 0.0;
};

struct ViolationSummary {
  CheckTally step5_bell;
  CheckTally step6_bell;
  CheckTally step6_z;
  // Diagnostics only: key copies that disagree. No party compares these.
  std::size_t kab_disagreements = 0;
  std::size_t kta_disagreements = 0;
  std::size_t ktb_disagreements = 0;

  std::size_t TotalChecks() const {
    return step5_bell.checks + step6_bell.checks + step6_z.checks;
  }
  std::size_t TotalViolations() const {
    return step5_bell.violations + step6_bell.violations + step6_z.violations;
  }
};

// Counters for the qubit-efficiency accounting.
struct ResourceCounters {
  std::size_t tp_prepared_qubits = 0;
  std::size_t alice_received_qubits = 0;
  std::size_t bob_received_qubits = 0;
  std::size_t alice_regenerated_qubits = 0;
  std::size_t bob_regenerated_qubits = 0;
  // Bits published in the comparison phase: Q_A, Q_B and the verdict.
  std::size_t comparison_bits_published = 0;
  // Secret bits compared.
  std::size_t compared_bits = 0;
};

// What one role legitimately learned during the run.
struct PartyView {
  Role role = Role::kTp;
  // Own ops and bits per group, transit order ("MRRM", "1--0").
  std::vector<std::string> own_ops;
  std::vector<std::string> own_bits;
  // Public: check groups, every user op (announced in steps 5 and 6), the
  // step-5 Bell publications and the step-6 Z check results.
  std::vector<std::size_t> check_groups;
  std::vector<std::string> announced_alice_ops;
  std::vector<std::string> announced_bob_ops;
  std::vector<std::array<std::optional<BellKind>, 2>> publications;
  // TP only.
  std::vector<GroupPlan> plans;
  std::vector<std::vector<TpMeasurement>> tp_measurements;
  // Keys held, by name ("k_ab", "k_ta", "k_tb").
  std::map<std::string, Bits> keys;
  std::optional<Bits> own_ciphertext;
  std::optional<Bits> received_q_a;
  std::optional<Bits> received_q_b;
  std::optional<Verdict> verdict;
};

struct Transcript {
  static constexpr int kSchemaVersion = 1;

  ProtocolConfig config;
  std::string attack_name = "none";
  std::map<std::string, std::string> attack_params;
  std::string tp_strategy = "honest";

  RunStatus status = RunStatus::kCompleted;
  std::string status_detail;

  std::vector<GroupRecord> groups;
  std::vector<std::size_t> check_groups;
  ViolationSummary violations;

  // Fragment lengths before truncation, per holder.
  std::map<std::string, std::size_t> fragment_lengths;
  // Canonical keys: Alice's K_AB, TP's K_TA and K_TB.
  std::optional<KeyTriple> keys;
  std::optional<Bits> q_a;
  std::optional<Bits> q_b;
  std::optional<ComparisonOutcome> outcome;

  ResourceCounters resources;
  std::array<PartyView, 3> views;  // TP, Alice, Bob

  double attack_info = 0.0;
  std::map<std::string, double> attack_diagnostics;

  const PartyView& View(Role role) const { return views[static_cast<int>(role)]; }
};

// Steps 1-8. Randomness is split from config.seed into the named streams
// "plan", "alice", "bob", "selection", "tp" and "adversary", so an attack
// never perturbs honest-party randomness. Throws std::invalid_argument for
// an invalid config; DetectionAbort and InsufficientKey are reported in
// Transcript::status.
Transcript RunProtocol(const ProtocolConfig& config, AttackStrategy* attack = nullptr,
                       const TpBehavior* tp = nullptr);

// Re-runs on InsufficientKey with seeds DeriveSeed(config.seed, "attempt", k)
// for k = 1..max_attempts-1 (attempt 0 uses config.seed). Returns the last
// transcript; `attempts_used` receives the number of runs made.
Transcript RunProtocolWithRetry(const ProtocolConfig& config, std::size_t max_attempts,
                                AttackStrategy* attack = nullptr,
                                const TpBehavior* tp = nullptr,
                                std::size_t* attempts_used = nullptr);

// Random secret pair of length n; `force_equal` makes M_B = M_A.
std::pair<Bits, Bits> RandomSecrets(std::size_t n, bool force_equal, Rng& rng);

}  // namespace sqpc

#endif  // SQPC_PROTOCOL_H_
