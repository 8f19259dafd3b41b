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

#include <algorithm>
#include <cctype>
#include <numeric>
#include <tuple>

namespace sqpc {
namespace {

std::size_t TransitOf(const GroupRecord& record, std::size_t original) {
  return OriginalPosition(record.plan.swapped, original);
}

// Original position currently held by state qubit `index`, if any.
std::optional<std::size_t> OriginalOfStateQubit(const GroupRegister& reg,
                                                std::size_t index) {
  for (std::size_t o = 0; o < kGroupQubits; ++o) {
    if (reg.transit[o] == index) return o;
  }
  return std::nullopt;
}

TpMeasurement ToTpMeasurement(const GroupRegister& reg, MeasurementRecord record) {
  TpMeasurement m;
  for (std::size_t q : record.qubits) {
    if (auto o = OriginalOfStateQubit(reg, q)) m.positions.push_back(*o);
  }
  m.record = std::move(record);
  return m;
}

KeyFragment Truncate(const std::string& name, KeyFragment key, std::size_t n) {
  std::stable_sort(key.begin(), key.end(), [](const KeyBit& a, const KeyBit& b) {
    return std::tie(a.group, a.transit_position) < std::tie(b.group, b.transit_position);
  });
  if (key.size() < n) throw InsufficientKey(name, key.size(), n);
  key.resize(n);
  return key;
}

std::string OpsString(const std::array<std::optional<UserOp>, kGroupQubits>& ops) {
  std::string s;
  for (const auto& op : ops) s.push_back(op ? UserOpChar(*op) : '?');
  return s;
}

std::string BitsString(const std::array<std::optional<int>, kGroupQubits>& bits) {
  std::string s;
  for (const auto& b : bits) s.push_back(b ? static_cast<char>('0' + *b) : '-');
  return s;
}

void CheckBits(const Bits& bits, const char* what) {
  for (std::uint8_t b : bits) {
    if (b > 1) throw std::invalid_argument(std::string(what) + " must contain only bits");
  }
}

}  // namespace

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kTp: return "tp";
    case Role::kAlice: return "alice";
    case Role::kBob: return "bob";
  }
  return "?";
}

std::string_view LegName(ChannelLeg leg) {
  switch (leg) {
    case ChannelLeg::kTpToAlice: return "tp_to_alice";
    case ChannelLeg::kAliceToBob: return "alice_to_bob";
    case ChannelLeg::kBobToTp: return "bob_to_tp";
  }
  return "?";
}

std::string_view SiftClassName(SiftClass cls) {
  switch (cls) {
    case SiftClass::kKabBit: return "k_ab";
    case SiftClass::kKtaBit: return "k_ta";
    case SiftClass::kKtbBit: return "k_tb";
    case SiftClass::kEcBell: return "ec_bell";
    case SiftClass::kEcZ: return "ec_z";
    case SiftClass::kDiscard: return "discard";
  }
  return "?";
}

std::string_view RunStatusName(RunStatus status) {
  switch (status) {
    case RunStatus::kCompleted: return "completed";
    case RunStatus::kDetectionAbort: return "detection_abort";
    case RunStatus::kInsufficientKey: return "insufficient_key";
  }
  return "?";
}

std::string_view VerdictName(Verdict verdict) {
  return verdict == Verdict::kEqual ? "equal" : "not_equal";
}

char UserOpChar(UserOp op) { return op == UserOp::kMeasure ? 'M' : 'R'; }

Bits ParseBits(std::string_view text) {
  Bits bits;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    for (char c : text.substr(2)) {
      if (!std::isxdigit(static_cast<unsigned char>(c))) {
        throw std::invalid_argument("invalid hex digit in '" + std::string(text) + "'");
      }
      const int v = std::isdigit(static_cast<unsigned char>(c))
                        ? c - '0'
                        : std::tolower(static_cast<unsigned char>(c)) - 'a' + 10;
      for (int shift = 3; shift >= 0; --shift) {
        bits.push_back(static_cast<std::uint8_t>((v >> shift) & 1));
      }
    }
    return bits;
  }
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("invalid bit string '" + std::string(text) + "'");
    }
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return bits;
}

std::string FormatBits(std::span<const std::uint8_t> bits) {
  std::string s;
  s.reserve(bits.size());
  for (std::uint8_t b : bits) s.push_back(static_cast<char>('0' + b));
  return s;
}

InsufficientKey::InsufficientKey(std::string key, std::size_t have, std::size_t need)
    : ProtocolError("insufficient key material for " + key + ": have " +
                    std::to_string(have) + ", need " + std::to_string(need)),
      key_(std::move(key)),
      have_(have),
      need_(need) {}

std::size_t GroupRegister::AppendQubit(int bit) {
  const int bits[] = {bit};
  state = Compose(state, StateVector::BasisState(bits));
  return state.num_qubits() - 1;
}

UserOp GroupRecord::AliceOpAtOriginal(std::size_t original) const {
  const auto& op = alice_op[TransitOf(*this, original)];
  if (!op) throw IncompleteRecord("missing Alice operation");
  return *op;
}

UserOp GroupRecord::BobOpAtOriginal(std::size_t original) const {
  const auto& op = bob_op[TransitOf(*this, original)];
  if (!op) throw IncompleteRecord("missing Bob operation");
  return *op;
}

std::array<SiftClass, 2> SiftPair(bool check_group, std::array<UserOp, 2> alice,
                                  std::array<UserOp, 2> bob) {
  constexpr UserOp M = UserOp::kMeasure;
  constexpr UserOp R = UserOp::kReflect;
  const bool both_reflect_pair =
      alice[0] == R && bob[0] == R && alice[1] == R && bob[1] == R;
  if (both_reflect_pair) return {SiftClass::kEcBell, SiftClass::kEcBell};

  std::array<SiftClass, 2> out{};
  for (int k = 0; k < 2; ++k) {
    const UserOp a = alice[k];
    const UserOp b = bob[k];
    if (check_group) {
      out[k] = (a == M && b == M) ? SiftClass::kKabBit : SiftClass::kDiscard;
    } else if (a == M && b == M) {
      out[k] = SiftClass::kEcZ;
    } else if (a == M) {
      out[k] = SiftClass::kKtaBit;
    } else if (b == M) {
      out[k] = SiftClass::kKtbBit;
    } else {
      // A lone both-reflect qubit: its partner is not both-reflect.
      out[k] = SiftClass::kDiscard;
    }
  }
  return out;
}

std::array<SiftClass, kGroupQubits> Sift(const GroupRecord& record) {
  std::array<SiftClass, kGroupQubits> out{};
  for (std::size_t first = 0; first < kGroupQubits; first += 2) {
    const auto pair = SiftPair(
        record.check_group,
        {record.AliceOpAtOriginal(first), record.AliceOpAtOriginal(first + 1)},
        {record.BobOpAtOriginal(first), record.BobOpAtOriginal(first + 1)});
    out[first] = pair[0];
    out[first + 1] = pair[1];
  }
  return out;
}

Bits KeyValues(const KeyFragment& key) {
  Bits bits;
  bits.reserve(key.size());
  for (const KeyBit& k : key) bits.push_back(k.bit);
  return bits;
}

KeyTriple AssembleKeys(KeyFragment k_ab, KeyFragment k_ta, KeyFragment k_tb,
                       std::size_t n) {
  KeyTriple keys;
  keys.k_ab = Truncate("k_ab", std::move(k_ab), n);
  keys.k_ta = Truncate("k_ta", std::move(k_ta), n);
  keys.k_tb = Truncate("k_tb", std::move(k_tb), n);
  return keys;
}

Bits Encrypt(std::span<const std::uint8_t> secret, std::span<const std::uint8_t> k_ab,
             std::span<const std::uint8_t> k_own) {
  if (secret.size() != k_ab.size() || secret.size() != k_own.size()) {
    throw std::invalid_argument("Encrypt: secret and key lengths differ");
  }
  Bits q(secret.size());
  for (std::size_t j = 0; j < secret.size(); ++j) q[j] = k_ab[j] ^ k_own[j] ^ secret[j];
  return q;
}

ComparisonOutcome Compare(std::span<const std::uint8_t> q_a,
                          std::span<const std::uint8_t> q_b,
                          std::span<const std::uint8_t> k_ta,
                          std::span<const std::uint8_t> k_tb) {
  const std::size_t n = q_a.size();
  if (q_b.size() != n || k_ta.size() != n || k_tb.size() != n) {
    throw std::invalid_argument("Compare: length mismatch");
  }
  ComparisonOutcome outcome;
  outcome.r.resize(n);
  bool all_zero = true;
  for (std::size_t j = 0; j < n; ++j) {
    outcome.r[j] = q_a[j] ^ q_b[j] ^ k_ta[j] ^ k_tb[j];
    all_zero = all_zero && outcome.r[j] == 0;
  }
  outcome.verdict = all_zero ? Verdict::kEqual : Verdict::kNotEqual;
  return outcome;
}

GroupRegister TpBehavior::PrepareGroup(const GroupPlan& plan, Rng& /*rng*/) const {
  GroupRegister reg;
  reg.group_index = plan.group_index;
  reg.state = Compose(PrepareBell(BellKind::kPhiPlus), PrepareBell(BellKind::kPhiPlus));
  if (plan.swapped) reg.state = SwapPairing(reg.state);
  return reg;
}

CheckPublication TpBehavior::PublishCheckPair(GroupRegister& reg, std::size_t first,
                                              Rng& rng) const {
  BellMeasurement m =
      MeasureBell(reg.state, reg.transit[first], reg.transit[first + 1], rng);
  reg.state = std::move(m.state);
  return {m.kind, {std::move(m.record)}};
}

BellKind TpBehavior::Step6BellCheck(GroupRegister& reg, std::size_t first,
                                    std::vector<MeasurementRecord>& log,
                                    Rng& rng) const {
  BellMeasurement m =
      MeasureBell(reg.state, reg.transit[first], reg.transit[first + 1], rng);
  reg.state = std::move(m.state);
  log.push_back(std::move(m.record));
  return m.kind;
}

Preparation TpPrepare(std::size_t n, Rng& plan_rng, const TpBehavior& tp) {
  if (n == 0) throw std::invalid_argument("TpPrepare: n must be at least 1");
  Preparation prep;
  const std::size_t num_groups = 2 * n;
  prep.plans.reserve(num_groups);
  for (std::size_t g = 0; g < num_groups; ++g) {
    prep.plans.push_back(GroupPlan{g, plan_rng.Coin()});
  }
  prep.groups.reserve(num_groups);
  for (const GroupPlan& plan : prep.plans) {
    prep.groups.push_back(tp.PrepareGroup(plan, plan_rng));
  }
  return prep;
}

std::optional<int> ApplyUserOp(GroupRegister& reg, std::size_t transit_position,
                               UserOp op, Rng& rng) {
  if (transit_position >= kGroupQubits) {
    throw std::out_of_range("transit position out of range");
  }
  if (op == UserOp::kReflect) return std::nullopt;
  ZMeasurement m = MeasureZ(reg.state, reg.transit[transit_position], rng);
  reg.state = std::move(m.state);
  return m.bit;
}

UserAction UserAct(GroupRegister& reg, std::size_t transit_position, Rng& rng) {
  UserAction action;
  action.op = rng.Coin() ? UserOp::kMeasure : UserOp::kReflect;
  action.bit = ApplyUserOp(reg, transit_position, action.op, rng);
  return action;
}

void TpRestore(GroupRegister& reg, const GroupPlan& plan) {
  if (plan.swapped) reg.Apply(GateKind::kSwap, {reg.transit[1], reg.transit[2]});
}

std::set<std::size_t> SelectCheckGroups(std::size_t num_groups, Rng& rng) {
  if (num_groups % 2 != 0) {
    throw std::invalid_argument("SelectCheckGroups: group count must be even");
  }
  std::vector<std::size_t> order(num_groups);
  std::iota(order.begin(), order.end(), 0);
  // Partial Fisher-Yates: the first half is a uniform subset.
  for (std::size_t i = 0; i < num_groups / 2; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.Below(num_groups - i));
    std::swap(order[i], order[j]);
  }
  return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(num_groups / 2)};
}

Step5Result Step5VerifyAndExtract(std::span<Group* const> check_groups,
                                  const TpBehavior& tp, Rng& tp_rng, bool strict) {
  // TP measures and publishes every check pair before any op is revealed.
  for (Group* group : check_groups) {
    for (std::size_t first = 0; first < kGroupQubits; first += 2) {
      CheckPublication pub = tp.PublishCheckPair(group->reg, first, tp_rng);
      group->record.published[first / 2] = pub.published;
      for (MeasurementRecord& rec : pub.measurements) {
        TpMeasurement m = ToTpMeasurement(group->reg, std::move(rec));
        if (m.record.basis == Basis::kZ && m.positions.size() == 1) {
          group->record.tp_bit[m.positions[0]] = m.record.outcome;
        }
        group->record.tp_measurements.push_back(std::move(m));
      }
    }
  }

  Step5Result result;
  for (Group* group : check_groups) {
    GroupRecord& record = group->record;
    const auto sift = Sift(record);
    for (std::size_t o = 0; o < kGroupQubits; ++o) record.sift[o] = sift[o];

    for (std::size_t first = 0; first < kGroupQubits; first += 2) {
      if (sift[first] != SiftClass::kEcBell) continue;
      const bool passed = record.published[first / 2] == BellKind::kPhiPlus;
      record.checks.push_back({SiftClass::kEcBell, 5, {first, first + 1}, passed});
      ++result.bell.checks;
      if (!passed) ++result.bell.violations;
    }
    for (std::size_t o = 0; o < kGroupQubits; ++o) {
      if (sift[o] != SiftClass::kKabBit) continue;
      const std::size_t t = TransitOf(record, o);
      const int a = record.alice_bit[t].value();
      const int b = record.bob_bit[t].value();
      if (a != b) {
        if (strict) {
          throw KeyConsistencyViolation("K_AB bits differ in group " +
                                        std::to_string(record.plan.group_index));
        }
        ++result.kab_disagreements;
      }
      const std::size_t g = record.plan.group_index;
      result.k_ab_alice.push_back({static_cast<std::uint8_t>(a), g, t, o});
      result.k_ab_bob.push_back({static_cast<std::uint8_t>(b), g, t, o});
    }
  }
  return result;
}

Step6Result Step6Process(std::span<Group* const> groups, const TpBehavior& tp,
                         Rng& tp_rng) {
  Step6Result result;
  for (Group* group : groups) {
    GroupRecord& record = group->record;
    GroupRegister& reg = group->reg;
    const auto sift = Sift(record);
    for (std::size_t o = 0; o < kGroupQubits; ++o) record.sift[o] = sift[o];
    const std::size_t g = record.plan.group_index;

    for (std::size_t first = 0; first < kGroupQubits; first += 2) {
      if (sift[first] == SiftClass::kEcBell) {
        std::vector<MeasurementRecord> log;
        const BellKind kind = tp.Step6BellCheck(reg, first, log, tp_rng);
        for (MeasurementRecord& rec : log) {
          record.tp_measurements.push_back(ToTpMeasurement(reg, std::move(rec)));
        }
        const bool passed = kind == BellKind::kPhiPlus;
        record.checks.push_back({SiftClass::kEcBell, 6, {first, first + 1}, passed});
        ++result.bell.checks;
        if (!passed) ++result.bell.violations;
        continue;
      }
      for (std::size_t o = first; o < first + 2; ++o) {
        const SiftClass cls = sift[o];
        if (cls == SiftClass::kDiscard) continue;
        ZMeasurement m = MeasureZ(reg.state, reg.transit[o], tp_rng);
        reg.state = std::move(m.state);
        record.tp_measurements.push_back(TpMeasurement{std::move(m.record), {o}});
        record.tp_bit[o] = m.bit;

        const std::size_t t = TransitOf(record, o);
        const auto tp_bit = static_cast<std::uint8_t>(m.bit);
        if (cls == SiftClass::kKtaBit) {
          const int a = record.alice_bit[t].value();
          result.k_ta_tp.push_back({tp_bit, g, t, o});
          result.k_ta_alice.push_back({static_cast<std::uint8_t>(a), g, t, o});
          if (a != m.bit) ++result.kta_disagreements;
        } else if (cls == SiftClass::kKtbBit) {
          const int b = record.bob_bit[t].value();
          result.k_tb_tp.push_back({tp_bit, g, t, o});
          result.k_tb_bob.push_back({static_cast<std::uint8_t>(b), g, t, o});
          if (b != m.bit) ++result.ktb_disagreements;
        } else if (cls == SiftClass::kEcZ) {
          const int a = record.alice_bit[t].value();
          const int b = record.bob_bit[t].value();
          const bool passed = a == b && b == m.bit;
          record.checks.push_back({SiftClass::kEcZ, 6, {o}, passed});
          ++result.z.checks;
          if (!passed) ++result.z.violations;
        }
      }
    }
  }
  return result;
}

namespace {

std::vector<KeyQubit> KeyQubitsOf(const GroupRecord& record) {
  std::vector<KeyQubit> out;
  for (std::size_t o = 0; o < kGroupQubits; ++o) {
    if (!record.sift[o]) continue;
    const SiftClass cls = *record.sift[o];
    const std::size_t t = TransitOf(record, o);
    if (cls == SiftClass::kKabBit || cls == SiftClass::kKtaBit) {
      out.push_back({t, cls, record.alice_bit[t].value()});
    } else if (cls == SiftClass::kKtbBit) {
      out.push_back({t, cls, record.bob_bit[t].value()});
    }
  }
  return out;
}

void BuildViews(Transcript& t, const KeyFragment* k_ab_alice, const KeyFragment* k_ab_bob,
                const KeyFragment* k_ta_tp, const KeyFragment* k_ta_alice,
                const KeyFragment* k_tb_tp, const KeyFragment* k_tb_bob) {
  PartyView& tp = t.views[0];
  PartyView& alice = t.views[1];
  PartyView& bob = t.views[2];
  tp.role = Role::kTp;
  alice.role = Role::kAlice;
  bob.role = Role::kBob;

  for (PartyView* view : {&tp, &alice, &bob}) {
    view->check_groups = t.check_groups;
    for (const GroupRecord& record : t.groups) {
      // Ops are announced for a group once it has been sifted.
      const bool announced = record.sift[0].has_value();
      view->announced_alice_ops.push_back(announced ? OpsString(record.alice_op) : "");
      view->announced_bob_ops.push_back(announced ? OpsString(record.bob_op) : "");
      view->publications.push_back(record.published);
    }
  }
  for (const GroupRecord& record : t.groups) {
    alice.own_ops.push_back(OpsString(record.alice_op));
    alice.own_bits.push_back(BitsString(record.alice_bit));
    bob.own_ops.push_back(OpsString(record.bob_op));
    bob.own_bits.push_back(BitsString(record.bob_bit));
    tp.plans.push_back(record.plan);
    tp.tp_measurements.push_back(record.tp_measurements);
  }

  auto values = [&](const KeyFragment* key) {
    Bits bits = KeyValues(*key);
    if (bits.size() > t.config.n) bits.resize(t.config.n);
    return bits;
  };
  if (k_ab_alice) alice.keys["k_ab"] = values(k_ab_alice);
  if (k_ab_bob) bob.keys["k_ab"] = values(k_ab_bob);
  if (k_ta_alice) alice.keys["k_ta"] = values(k_ta_alice);
  if (k_ta_tp) tp.keys["k_ta"] = values(k_ta_tp);
  if (k_tb_bob) bob.keys["k_tb"] = values(k_tb_bob);
  if (k_tb_tp) tp.keys["k_tb"] = values(k_tb_tp);

  if (t.q_a) {
    alice.own_ciphertext = t.q_a;
    tp.received_q_a = t.q_a;
  }
  if (t.q_b) {
    bob.own_ciphertext = t.q_b;
    tp.received_q_b = t.q_b;
  }
  if (t.outcome) {
    for (PartyView* view : {&tp, &alice, &bob}) view->verdict = t.outcome->verdict;
  }
}

}  // namespace

Transcript RunProtocol(const ProtocolConfig& config, AttackStrategy* attack,
                       const TpBehavior* tp_behavior) {
  if (config.n == 0) throw std::invalid_argument("n must be at least 1");
  if (config.secret_a.size() != config.n || config.secret_b.size() != config.n) {
    throw std::invalid_argument("secrets must have exactly n bits");
  }
  CheckBits(config.secret_a, "secret_a");
  CheckBits(config.secret_b, "secret_b");
  if (!(config.threshold >= 0.0 && config.threshold <= 1.0)) {
    throw std::invalid_argument("threshold must lie in [0, 1]");
  }

  const TpBehavior honest;
  const TpBehavior& tp = tp_behavior ? *tp_behavior : honest;

  Transcript t;
  t.config = config;
  t.tp_strategy = tp.Name();
  if (attack) {
    t.attack_name = attack->Name();
    t.attack_params = attack->Params();
  }

  const Rng root(config.seed);
  Rng plan_rng = root.Fork("plan");
  Rng alice_rng = root.Fork("alice");
  Rng bob_rng = root.Fork("bob");
  Rng selection_rng = root.Fork("selection");
  Rng tp_rng = root.Fork("tp");
  Rng eve_rng = root.Fork("adversary");

  // Step 1.
  Preparation prep = TpPrepare(config.n, plan_rng, tp);
  const std::size_t num_groups = prep.groups.size();
  std::vector<Group> groups(num_groups);
  for (std::size_t g = 0; g < num_groups; ++g) {
    groups[g].reg = std::move(prep.groups[g]);
    groups[g].record.plan = prep.plans[g];
  }
  t.resources.tp_prepared_qubits = kGroupQubits * num_groups;

  // Steps 2-4. Groups are independent, so the loop runs group by group; each
  // party still handles its qubits in sequence order.
  for (Group& group : groups) {
    GroupRegister& reg = group.reg;
    GroupRecord& record = group.record;
    if (attack) attack->Intercept(ChannelLeg::kTpToAlice, reg, eve_rng);
    for (std::size_t p = 0; p < kGroupQubits; ++p) {
      const UserAction a = UserAct(reg, p, alice_rng);
      record.alice_op[p] = a.op;
      record.alice_bit[p] = a.bit;
      ++t.resources.alice_received_qubits;
      if (a.bit) ++t.resources.alice_regenerated_qubits;
    }
    if (attack) attack->Intercept(ChannelLeg::kAliceToBob, reg, eve_rng);
    for (std::size_t p = 0; p < kGroupQubits; ++p) {
      const UserAction b = UserAct(reg, p, bob_rng);
      record.bob_op[p] = b.op;
      record.bob_bit[p] = b.bit;
      ++t.resources.bob_received_qubits;
      if (b.bit) ++t.resources.bob_regenerated_qubits;
    }
    if (attack) attack->Intercept(ChannelLeg::kBobToTp, reg, eve_rng);
    TpRestore(reg, record.plan);
  }

  // Step 5.
  const std::set<std::size_t> check_set = SelectCheckGroups(num_groups, selection_rng);
  t.check_groups.assign(check_set.begin(), check_set.end());
  std::vector<Group*> check_groups;
  std::vector<Group*> other_groups;
  for (std::size_t g = 0; g < num_groups; ++g) {
    groups[g].record.check_group = check_set.count(g) > 0;
    (groups[g].record.check_group ? check_groups : other_groups).push_back(&groups[g]);
  }
  const bool strict = attack == nullptr && tp.IsHonest();
  Step5Result s5 = Step5VerifyAndExtract(check_groups, tp, tp_rng, strict);
  t.violations.step5_bell = s5.bell;
  t.violations.kab_disagreements = s5.kab_disagreements;

  auto finish_groups = [&](const std::vector<Group*>& done) {
    if (!attack) return;
    for (Group* group : done) {
      const auto key_qubits = KeyQubitsOf(group->record);
      attack->OnGroupComplete(group->reg, key_qubits, eve_rng);
    }
  };
  auto finalize = [&](Transcript& out, const Step6Result* s6) {
    for (Group& group : groups) out.groups.push_back(group.record);
    if (attack) {
      out.attack_info = attack->InfoMetric();
      out.attack_diagnostics = attack->Diagnostics();
    }
    BuildViews(out, &s5.k_ab_alice, &s5.k_ab_bob, s6 ? &s6->k_ta_tp : nullptr,
               s6 ? &s6->k_ta_alice : nullptr, s6 ? &s6->k_tb_tp : nullptr,
               s6 ? &s6->k_tb_bob : nullptr);
  };

  t.fragment_lengths["k_ab"] = s5.k_ab_alice.size();
  if (s5.bell.Rate() > config.threshold) {
    finish_groups(check_groups);
    t.status = RunStatus::kDetectionAbort;
    t.status_detail = "step 5 Bell-check error rate " + std::to_string(s5.bell.Rate()) +
                      " exceeds threshold";
    finalize(t, nullptr);
    return t;
  }

  // Step 6.
  Step6Result s6 = Step6Process(other_groups, tp, tp_rng);
  t.violations.step6_bell = s6.bell;
  t.violations.step6_z = s6.z;
  t.violations.kta_disagreements = s6.kta_disagreements;
  t.violations.ktb_disagreements = s6.ktb_disagreements;
  t.fragment_lengths["k_ta"] = s6.k_ta_tp.size();
  t.fragment_lengths["k_tb"] = s6.k_tb_tp.size();
  finish_groups(check_groups);
  finish_groups(other_groups);

  CheckTally step6_all{s6.bell.checks + s6.z.checks, s6.bell.violations + s6.z.violations};
  if (step6_all.Rate() > config.threshold) {
    t.status = RunStatus::kDetectionAbort;
    t.status_detail = "step 6 error rate " + std::to_string(step6_all.Rate()) +
                      " exceeds threshold";
    finalize(t, &s6);
    return t;
  }

  // Step 7 preamble: every holder truncates its own copies.
  try {
    KeyTriple canonical = AssembleKeys(s5.k_ab_alice, s6.k_ta_tp, s6.k_tb_tp, config.n);
    KeyTriple alice_keys = AssembleKeys(s5.k_ab_alice, s6.k_ta_alice, s6.k_tb_tp, config.n);
    KeyTriple bob_keys = AssembleKeys(s5.k_ab_bob, s6.k_ta_tp, s6.k_tb_bob, config.n);

    // Steps 7 and 8.
    t.q_a = Encrypt(config.secret_a, KeyValues(alice_keys.k_ab), KeyValues(alice_keys.k_ta));
    t.q_b = Encrypt(config.secret_b, KeyValues(bob_keys.k_ab), KeyValues(bob_keys.k_tb));
    t.outcome = Compare(*t.q_a, *t.q_b, KeyValues(canonical.k_ta), KeyValues(canonical.k_tb));
    t.keys = std::move(canonical);
    t.resources.comparison_bits_published = t.q_a->size() + t.q_b->size() + 1;
    t.resources.compared_bits = config.n;
  } catch (const InsufficientKey& e) {
    t.status = RunStatus::kInsufficientKey;
    t.status_detail = e.what();
  }
  finalize(t, &s6);
  return t;
}

Transcript RunProtocolWithRetry(const ProtocolConfig& config, std::size_t max_attempts,
                                AttackStrategy* attack, const TpBehavior* tp,
                                std::size_t* attempts_used) {
  if (max_attempts == 0) max_attempts = 1;
  ProtocolConfig attempt = config;
  Transcript t;
  for (std::size_t k = 0; k < max_attempts; ++k) {
    attempt.seed = k == 0 ? config.seed : DeriveSeed(config.seed, "attempt", k);
    t = RunProtocol(attempt, attack, tp);
    if (attempts_used) *attempts_used = k + 1;
    if (t.status != RunStatus::kInsufficientKey) break;
  }
  return t;
}

std::pair<Bits, Bits> RandomSecrets(std::size_t n, bool force_equal, Rng& rng) {
  Bits a(n), b(n);
  for (auto& bit : a) bit = rng.Coin() ? 1 : 0;
  if (force_equal) {
    b = a;
  } else {
    for (auto& bit : b) bit = rng.Coin() ? 1 : 0;
  }
  return {a, b};
}

}  // namespace sqpc
