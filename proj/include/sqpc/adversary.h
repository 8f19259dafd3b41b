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

#ifndef SQPC_ADVERSARY_H_
#define SQPC_ADVERSARY_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sqpc/protocol.h"
#include "sqpc/rng.h"
#include "sqpc/statevector.h"

// Channel attacks, dishonest-TP behaviours and their Monte Carlo evaluation.
//
// Every strategy keeps its quantum side information inside the group
// register (probe, ancilla and fake qubits it appended), so the simulator
// never needs a second state vector per group.

namespace sqpc {

// Reduced probe states collected per user key bit. The info metric is the
// largest trace distance between a bit-0 and a bit-1 probe state; it is 0
// iff the probes carry no information about the bit.
class ProbeLedger {
 public:
  static constexpr std::size_t kMaxStatesPerBit = 64;

  void Record(const Matrix2& rho, int bit);
  double Metric() const;
  std::size_t size(int bit) const { return states_[bit & 1].size(); }

 private:
  std::array<std::vector<Matrix2>, 2> states_;
};

// Base for strategies that record a probe for every key qubit.
class ProbingAttack : public AttackStrategy {
 public:
  void OnGroupComplete(GroupRegister& reg, std::span<const KeyQubit> key_qubits,
                       Rng& rng) override;
  double InfoMetric() const override { return ledger_.Metric(); }
  const ProbeLedger& ledger() const { return ledger_; }

 protected:
  ProbeLedger ledger_;
};

enum class InterceptVariant { kLeg1, kLeg2 };

// Eve diverts the genuine qubits on the chosen leg, sends random Z-basis
// fakes onwards, measures the fakes as they leave Bob and hands the genuine
// qubits back to TP in their original order.
class InterceptResendFake : public ProbingAttack {
 public:
  explicit InterceptResendFake(InterceptVariant variant) : variant_(variant) {}
  std::string Name() const override;
  std::map<std::string, std::string> Params() const override;
  void Intercept(ChannelLeg leg, GroupRegister& reg, Rng& rng) override;

 private:
  InterceptVariant variant_;
};

enum class MeasureBasis { kZ, kBell };

// Measures the transit qubits on one leg and forwards the collapsed states.
// The Bell variant pairs (0,1),(2,3) unless `random_pairing`, in which case
// one of the three perfect matchings is drawn per group.
class MeasureResend : public ProbingAttack {
 public:
  MeasureResend(MeasureBasis basis, ChannelLeg leg = ChannelLeg::kTpToAlice,
                bool random_pairing = false)
      : basis_(basis), leg_(leg), random_pairing_(random_pairing) {}
  std::string Name() const override;
  std::map<std::string, std::string> Params() const override;
  void Intercept(ChannelLeg leg, GroupRegister& reg, Rng& rng) override;

 private:
  MeasureBasis basis_;
  ChannelLeg leg_;
  bool random_pairing_;
};

// CNOT from each transit qubit onto a |0> ancilla on the first leg and
// again on the second. The ancilla amplitude is checked exactly after the
// second CNOT and once TP is done; the ancillas are then Z-measured.
class DoubleCnot : public ProbingAttack {
 public:
  std::string Name() const override { return "double-cnot"; }
  void Intercept(ChannelLeg leg, GroupRegister& reg, Rng& rng) override;
  void OnGroupComplete(GroupRegister& reg, std::span<const KeyQubit> key_qubits,
                       Rng& rng) override;
  std::map<std::string, double> Diagnostics() const override;

  // Largest amplitude norm found outside |0> on any ancilla.
  double max_ancilla_deviation() const { return max_deviation_; }
  std::size_t ancilla_ones() const { return ancilla_ones_; }
  std::size_t ancilla_checks() const { return ancilla_checks_; }

 private:
  void CheckAncillas(const GroupRegister& reg);

  double max_deviation_ = 0.0;
  std::size_t ancilla_ones_ = 0;
  std::size_t ancilla_checks_ = 0;
};

// Leg unitaries on (transit qubit, probe qubit); the transit qubit is the
// more significant one. The probe starts in |0> and is shared by the legs.
struct CollectiveUnitary {
  Matrix4 u1 = Identity4();
  Matrix4 u2 = Identity4();
  Matrix4 u3 = Identity4();

  const Matrix4& ForLeg(ChannelLeg leg) const;
  // Throws std::invalid_argument unless all three are unitary within 1e-10.
  void Validate() const;
};

class CollectiveAttack : public ProbingAttack {
 public:
  CollectiveAttack(CollectiveUnitary unitary, std::string label);
  std::string Name() const override { return label_; }
  void Intercept(ChannelLeg leg, GroupRegister& reg, Rng& rng) override;
  const CollectiveUnitary& unitary() const { return unitary_; }

 private:
  CollectiveUnitary unitary_;
  std::string label_;
};

// Haar-random 2x2 and 4x4 unitaries.
Matrix2 RandomUnitary2(Rng& rng);
Matrix4 RandomUnitary4(Rng& rng);

// Transit-diagonal legs |x>|e> -> |x> V_x |e>. With `independent_probe`
// the final probe state V3_x V2_x V1_x |0> is made the same for x = 0, 1.
CollectiveUnitary SampleConstrainedCollective(Rng& rng, bool independent_probe);
CollectiveUnitary SampleUnconstrainedCollective(Rng& rng);
// U1 = U2 = U3 = X (x) I.
CollectiveUnitary BitFlipCollective();

// Probe state after the three legs on a transit qubit that stays |x>; the
// transit is projected on x after each leg. Empty if that branch has zero
// probability.
std::optional<StateVector> ConditionedProbe(const CollectiveUnitary& u, int x);
// TraceDistancePure between the two conditioned probes; 0 when either
// branch is impossible.
double ConditionedProbeDistance(const CollectiveUnitary& u);

// Exact per-check failure probabilities of a collective attack, averaged over
// both re-pairing plans.
struct AnalyticDetection {
  // Both users reflect a restored pair; TP's Bell measurement is not phi+.
  double bell_failure = 0.0;
  // Both users measure a qubit; TP, Alice and Bob do not all agree.
  double z_mismatch = 0.0;
};
AnalyticDetection AnalyzeCollective(const CollectiveUnitary& u);

// Restricts another strategy to a subset of legs. With {BobToTp} this models
// a dishonest Alice who can only act on the return leg.
class RestrictToLegs : public AttackStrategy {
 public:
  RestrictToLegs(std::unique_ptr<AttackStrategy> inner, std::set<ChannelLeg> legs,
                 std::string label);
  std::string Name() const override { return label_; }
  std::map<std::string, std::string> Params() const override;
  void Intercept(ChannelLeg leg, GroupRegister& reg, Rng& rng) override;
  void OnGroupComplete(GroupRegister& reg, std::span<const KeyQubit> key_qubits,
                       Rng& rng) override;
  double InfoMetric() const override { return inner_->InfoMetric(); }
  std::map<std::string, double> Diagnostics() const override {
    return inner_->Diagnostics();
  }

 private:
  std::unique_ptr<AttackStrategy> inner_;
  std::set<ChannelLeg> legs_;
  std::string label_;
};

// TP Z-measures every check qubit in step 5 and publishes phi+ or phi- at
// random.
class ZMeasureTp : public TpBehavior {
 public:
  std::string Name() const override { return "zmeasure"; }
  CheckPublication PublishCheckPair(GroupRegister& reg, std::size_t first,
                                    Rng& rng) const override;
  bool IsHonest() const override { return false; }
};

// TP sends random Z-basis product states, publishes step-5 results at
// random and reports every step-6 Bell check as phi+.
class FakeZTp : public ZMeasureTp {
 public:
  std::string Name() const override { return "fake-z"; }
  GroupRegister PrepareGroup(const GroupPlan& plan, Rng& rng) const override;
  BellKind Step6BellCheck(GroupRegister& reg, std::size_t first,
                          std::vector<MeasurementRecord>& log, Rng& rng) const override;
};

// Builds the strategy for one trial; may return nullptr for "no attack".
using AttackFactory =
    std::function<std::unique_ptr<AttackStrategy>(std::size_t trial, Rng& rng)>;

struct AttackOptions {
  // Leg for measure-resend; defaults to TP -> Alice.
  std::optional<ChannelLeg> leg;
  bool random_pairing = false;
  // Restrict the channel attack to the Bob -> TP leg.
  bool alice_attacker = false;
};

struct ResolvedAttack {
  std::string name;
  AttackFactory factory;
  std::shared_ptr<const TpBehavior> tp;  // nullptr for the honest TP
};

// Names: none, intercept-resend-leg1, intercept-resend-leg2, measure-resend-z,
// measure-resend-bell, double-cnot, collective-identity,
// collective-constrained, collective-diagonal, collective-unconstrained,
// collective-bitflip,
// tp-zmeasure, tp-fake-z. Throws std::invalid_argument for anything else.
ResolvedAttack ResolveAttack(const std::string& name, const AttackOptions& options = {});
const std::vector<std::string>& AttackNames();
// "honest", "zmeasure" or "fake-z"; nullptr for honest.
std::shared_ptr<const TpBehavior> MakeTpBehavior(const std::string& name);

struct Proportion {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Wilson score interval; z = 1.96 is a 95% interval.
Proportion WilsonInterval(std::size_t successes, std::size_t trials, double z = 1.96);

struct CheckClassReport {
  std::string name;  // "step5_bell", "step6_bell", "step6_z"
  Proportion violations;
  // Outcome of every check in trial and group order (true = violation).
  std::vector<bool> outcomes;
};

struct EvaluateConfig {
  std::size_t trials = 100;
  std::size_t n = 8;
  std::uint64_t seed = 0;
};

struct AttackReport {
  std::string attack;
  std::map<std::string, std::string> params;
  std::string tp_strategy = "honest";
  EvaluateConfig config;
  // Fraction of runs with at least one check violation.
  Proportion detection;
  double info_metric = 0.0;
  std::vector<CheckClassReport> classes;
  std::map<std::string, double> diagnostics;  // max over trials
  std::size_t insufficient_key_runs = 0;
};

// Independent seeded runs with the abort threshold lifted, so every check
// of every run is tallied. Trial k uses seed DeriveSeed(config.seed, "trial", k).
AttackReport Evaluate(const std::string& name, const AttackFactory& factory,
                      const TpBehavior* tp, const EvaluateConfig& config);

// Groups in which both users reflect every qubit, run through the attack,
// TP restore and step-6 Bell checks on both restored pairs.
CheckTally SampleReflectChecks(AttackStrategy& attack, std::size_t groups, Rng& rng);

}  // namespace sqpc

#endif  // SQPC_ADVERSARY_H_
