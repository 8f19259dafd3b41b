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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
// and exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "sqpc/adversary.h"
#include "sqpc/analysis.h"
#include "sqpc/protocol.h"
#include "sqpc/report_io.h"

namespace sqpc {
namespace {

constexpr std::uint64_t kSeed = 20260401;

int failures = 0;

void Report(int id, bool pass, const std::string& title, const std::string& detail) {
  std::printf("%s %2d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string Fmt(const char* format, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

const CheckClassReport& ClassOf(const AttackReport& r, const std::string& name) {
  for (const auto& c : r.classes) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("missing class " + name);
}

void HonestSweep() {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = 16;
  std::size_t completed = 0, correct = 0, short_key = 0, violations = 0;
  for (std::size_t k = 0; k < 1000; ++k) {
    Rng rng(DeriveSeed(kSeed, "sweep", k));
    auto [a, b] = RandomSecrets(n, k % 2 == 0, rng);
    ProtocolConfig c;
    c.n = n;
    c.seed = rng.NextU64();
    c.secret_a = a;
    c.secret_b = b;
    Transcript t = RunProtocol(c);
    violations += t.violations.TotalViolations();
    if (t.status == RunStatus::kInsufficientKey) {
      ++short_key;
      continue;
    }
    if (t.status != RunStatus::kCompleted) continue;
    ++completed;
    correct += (t.outcome->verdict == Verdict::kEqual) == (a == b);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool pass = completed > 0 && correct == completed &&
                    completed + short_key == 1000 && violations == 0 && secs < 60.0;
  Report(1, pass, "honest correctness sweep",
         Fmt("%.0f/%.0f verdicts correct, ", correct, completed) +
             Fmt("%.0f insufficient-key runs, %.0f violations, %.2f s", short_key, violations,
                 secs));
}

void CrossPairIdentity() {
  const StateVector phi = PrepareBell(BellKind::kPhiPlus);
  auto c = BellDecomposition(Compose(phi, phi), {{0, 2}, {1, 3}});
  std::size_t nonzero = 0;
  bool matched = true;
  double worst = 0.0;
  for (const auto& [key, amp] : c) {
    if (std::abs(amp) <= 1e-12) continue;
    ++nonzero;
    matched = matched && key.first == key.second;
    worst = std::max(worst, std::abs(std::abs(amp) - 0.5));
  }
  Report(2, nonzero == 4 && matched && worst <= 1e-12, "cross-pair Bell decomposition",
         Fmt("%.0f nonzero coefficients, matched=%.0f, max |c|-1/2 deviation %.2e", nonzero,
             matched, worst));
}

// Two-bit code read off the amplitudes: parity bit set when |01>,|10>
// carry the weight, phase bit set when the two terms have opposite sign.
std::string CodeFromAmplitudes(BellKind kind) {
  const StateVector s = PrepareBell(kind);
  const bool parity = std::abs(s.amplitude("01")) > 0.5;
  const Amplitude x = parity ? s.amplitude("01") : s.amplitude("00");
  const Amplitude y = parity ? s.amplitude("10") : s.amplitude("11");
  const bool phase = (x * std::conj(y)).real() < 0;
  return std::string{parity ? '1' : '0', phase ? '1' : '0'};
}

void BellPrepMeasure() {
  bool pass = true;
  std::string detail;
  for (BellKind kind : kAllBellKinds) {
    ScenarioSpec spec;
    spec.bell = kind;
    spec.shots = 1024;
    spec.seed = kSeed;
    Histogram h = RunScenario(spec);
    const std::string want = CodeFromAmplitudes(kind);
    const bool ok = h.counts.size() == 1 && h.counts.count(want) && h.counts.at(want) == 1024;
    pass = pass && ok;
    detail += std::string(BellKindName(kind)) + "->" + h.counts.begin()->first + ":" +
              std::to_string(h.counts.begin()->second) + " ";
  }
  Report(3, pass, "Bell preparation and measurement", detail);
}

void ReflectReflect() {
  bool pass = true;
  std::string detail;
  for (bool swapped : {false, true}) {
    Histogram h =
        RunScenario({ScenarioKind::kReflectReflect, BellKind::kPhiPlus, swapped, 1024, kSeed});
    pass = pass && h.counts.size() == 1 && h.counts.count("0000") &&
           h.counts.at("0000") == 1024;
    detail += std::string(swapped ? "swapped " : "unswapped ") + h.counts.begin()->first +
              ":" + std::to_string(h.counts.begin()->second) + " ";
  }
  Report(4, pass, "reflect-reflect register", detail);
}

void MeasureAll() {
  const std::set<std::string> want = {"0000", "0001", "0100", "0101"};
  bool pass = true;
  std::string detail;
  for (bool swapped : {false, true}) {
    Histogram h =
        RunScenario({ScenarioKind::kMeasureAll, BellKind::kPhiPlus, swapped, 4096, kSeed});
    std::set<std::string> support;
    double worst = 0.0;
    for (const auto& [k, v] : h.counts) {
      support.insert(k);
      worst = std::max(worst, std::abs(v / 4096.0 - 0.25));
    }
    const std::size_t equal = h.relations.count("alice_bob_equal")
                                  ? h.relations.at("alice_bob_equal")
                                  : 0;
    pass = pass && support == want && worst <= 0.03 && equal == 4096;
    detail += std::string(swapped ? "swapped" : "unswapped") +
              Fmt(" support %.0f, max frequency deviation %.4f, alice=bob %.0f/4096; ",
                  support.size(), worst, equal);
  }
  Report(5, pass, "measure-all register", detail);
}

void MixedOps() {
  // Alice MRMR, Bob MMRR in transit order. The re-pairing exchanges transit
  // positions 1 and 2, so original position o held transit perm[o].
  const std::string alice = "MRMR", bob = "MMRR";
  bool pass = true;
  std::string detail;
  for (bool swapped : {false, true}) {
    const std::size_t perm[4] = {0, swapped ? 2u : 1u, swapped ? 1u : 2u, 3};
    std::size_t three = 9, tp_a = 9, tp_b = 9;
    for (std::size_t o = 0; o < 3; ++o) {
      const char a = alice[perm[o]], b = bob[perm[o]];
      if (a == 'M' && b == 'M') three = o;
      if (a == 'M' && b == 'R') tp_a = o;
      if (a == 'R' && b == 'M') tp_b = o;
    }
    ScenarioSpec spec{ScenarioKind::kMixedOps, BellKind::kPhiPlus, swapped, 1024, kSeed};
    MixedOpsReport r = MixedOpsConsistency(spec);
    const bool ok = r.AllHold() && r.shots == 1024 && r.three_way_position == three &&
                    r.tp_alice_position == tp_a && r.tp_bob_position == tp_b;
    pass = pass && ok;
    detail += std::string(swapped ? "swapped" : "unswapped") +
              Fmt(" tp=alice@%.0f %.0f, tp=bob@%.0f %.0f, ", r.tp_alice_position,
                  r.tp_alice_holds, r.tp_bob_position, r.tp_bob_holds) +
              Fmt("three-way@%.0f %.0f; ", r.three_way_position, r.three_way_holds);
  }
  Report(6, pass, "mixed-operation agreement", detail);
}

void DoubleCnotCheck() {
  ResolvedAttack a = ResolveAttack("double-cnot");
  AttackReport r = Evaluate(a.name, a.factory, nullptr, {100, 8, kSeed});
  const double dev = r.diagnostics.at("max_ancilla_deviation");
  const bool pass = dev <= 1e-12 && r.detection.successes == 0 && r.detection.rate == 0.0 &&
                    r.info_metric <= 1e-12 && r.diagnostics.at("ancilla_ones") == 0.0;
  Report(7, pass, "double-CNOT attack",
         Fmt("ancilla deviation %.2e, detection %.4f, info %.2e", dev, r.detection.rate,
             r.info_metric));
}

void CollectiveTheorem() {
  Rng root(kSeed);
  double worst_analytic = 0.0, worst_info = 0.0;
  std::size_t empirical_violations = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    Rng rng = root.Fork("constrained", i);
    CollectiveUnitary u = SampleConstrainedCollective(rng, true);
    AnalyticDetection d = AnalyzeCollective(u);
    worst_analytic = std::max({worst_analytic, d.bell_failure, d.z_mismatch});
    AttackFactory factory = [u](std::size_t, Rng&) {
      return std::make_unique<CollectiveAttack>(u, "collective-constrained");
    };
    AttackReport r = Evaluate("collective-constrained", factory, nullptr,
                              {2, 8, DeriveSeed(kSeed, "constrained-run", i)});
    worst_info = std::max(worst_info, r.info_metric);
    empirical_violations += r.detection.successes;
  }
  const bool first = worst_analytic <= 1e-12 && worst_info < 1e-10 && empirical_violations == 0;

  std::size_t distinguishable = 0, caught = 0, min_groups = SIZE_MAX;
  std::size_t total_z_checks_failed = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    Rng rng = root.Fork("diagonal", i);
    CollectiveUnitary u = SampleConstrainedCollective(rng, false);
    const double dist = ConditionedProbeDistance(u);
    AnalyticDetection d = AnalyzeCollective(u);
    total_z_checks_failed += d.z_mismatch > 1e-12;
    // Enough groups for about ten expected violations, at least 1000.
    std::size_t groups = 1000;
    if (d.bell_failure > 0) {
      groups = std::max<std::size_t>(
          groups, static_cast<std::size_t>(std::ceil(5.0 / d.bell_failure)));
    }
    groups = std::min<std::size_t>(groups, 2000000);
    min_groups = std::min(min_groups, groups);
    CollectiveAttack attack(u, "collective-diagonal");
    Rng mc = root.Fork("diagonal-mc", i);
    CheckTally t = SampleReflectChecks(attack, groups, mc);
    if (dist > 0.01) {
      ++distinguishable;
      caught += t.violations > 0;
    }
  }
  const bool second = caught == distinguishable && total_z_checks_failed == 0;
  Report(8, first && second, "collective attacks",
         Fmt("independent probe: max analytic detection %.2e, max info %.2e, ", worst_analytic,
             worst_info) +
             Fmt("%.0f run violations; dependent probe: %.0f/%.0f distinguishable samples "
                 "detected, ",
                 empirical_violations, caught, distinguishable) +
             Fmt(">= %.0f groups each, %.0f with Z mismatch", min_groups,
                 total_z_checks_failed));
}

void DishonestTp() {
  ResolvedAttack a = ResolveAttack("tp-zmeasure");
  AttackReport r = Evaluate(a.name, a.factory, a.tp.get(), {1500, 64, kSeed});
  const CheckClassReport& bell = ClassOf(r, "step5_bell");
  const Proportion& p = bell.violations;
  bool pass = p.trials >= 10000 && std::abs(p.rate - 0.5) <= 0.015;
  std::string detail = Fmt("%.0f pairs, per-pair detection %.4f; ", p.trials, p.rate);
  const std::size_t ks[] = {1, 2, 4, 8};
  for (const DetectionPoint& pt : DetectionCurve(0.5, ks, bell.outcomes, 2.576)) {
    const bool inside =
        pt.analytic >= pt.empirical.ci_low && pt.analytic <= pt.empirical.ci_high;
    pass = pass && inside;
    detail += Fmt("k=%.0f %.4f vs %.4f [%.4f, ", pt.k, pt.empirical.rate, pt.analytic,
                  pt.empirical.ci_low) +
              Fmt("%.4f] ", pt.empirical.ci_high);
  }
  Report(9, pass, "dishonest TP random publication", detail);
}

void MeasureResendZ() {
  ResolvedAttack a = ResolveAttack("measure-resend-z");
  AttackReport r = Evaluate(a.name, a.factory, nullptr, {800, 64, kSeed});
  const Proportion& s5 = ClassOf(r, "step5_bell").violations;
  const Proportion& s6 = ClassOf(r, "step6_bell").violations;
  const std::size_t pairs = s5.trials + s6.trials;
  const double rate = static_cast<double>(s5.successes + s6.successes) / pairs;
  Report(10, pairs >= 10000 && std::abs(rate - 0.5) <= 0.02, "measure-resend Z attack",
         Fmt("%.0f both-reflect pairs, Bell-check failure %.4f", pairs, rate));
}

void Efficiency() {
  bool pass = true;
  std::string detail;
  for (std::int64_t n : {1, 8, 64}) {
    ProtocolConfig c;
    c.n = static_cast<std::size_t>(n);
    c.seed = DeriveSeed(kSeed, "efficiency", n);
    c.secret_a = Bits(c.n, 0);
    c.secret_b = Bits(c.n, 1);
    Transcript t = RunProtocolWithRetry(c, 1000);
    if (t.status != RunStatus::kCompleted) {
      pass = false;
      detail += "n=" + std::to_string(n) + " no completed run; ";
      continue;
    }
    RunEfficiency e = EfficiencyFromRun(t);
    const std::int64_t den = 18 * n + 1;
    const std::int64_t g = std::gcd(n, den);
    const bool ok = e.eta.num == n / g && e.eta.den == den / g;
    pass = pass && ok;
    detail += "n=" + std::to_string(n) + " eta " + e.eta.ToString() + " (realized " +
              e.eta_realized.ToString() + "); ";
  }
  const auto rows = EfficiencyTable();
  std::ostringstream text;
  const std::int64_t ns[] = {1, 8, 64};
  WriteEfficiencyText(text, rows, ns, Json::object());
  std::size_t emitted = 0;
  for (const auto& row : rows) {
    if (text.str().find(row.label) != std::string::npos) ++emitted;
    for (std::int64_t n : {1, 10, 100}) {
      const std::int64_t num = row.shared_bits.At(n), den = row.consumed.At(n);
      const std::int64_t g = std::gcd(num, den);
      pass = pass && row.Eta(n).num == num / g && row.Eta(n).den == den / g;
    }
  }
  pass = pass && rows.size() == 8 && emitted == 8;
  detail += std::to_string(emitted) + " table rows emitted";
  Report(11, pass, "qubit efficiency", detail);
}

void KeyStatistics() {
  const std::size_t n = 32;
  std::map<std::string, double> sums;
  std::map<std::string, std::array<std::size_t, 2>> counts;
  std::size_t events = 0, runs = 0;
  auto run_one = [&](std::size_t k) {
    Rng rng(DeriveSeed(kSeed, "keys", k));
    auto [a, b] = RandomSecrets(n, false, rng);
    ProtocolConfig c;
    c.n = n;
    c.seed = rng.NextU64();
    c.secret_a = a;
    c.secret_b = b;
    return RunProtocol(c);
  };
  for (; runs < 200; ++runs) {
    Transcript t = run_one(runs);
    for (const auto& [key, len] : t.fragment_lengths) sums[key] += len;
    TallyKabByTpView(t, counts);
  }
  // Further runs only to reach the event count for the independence test.
  for (std::size_t k = runs;; ++k) {
    events = 0;
    for (const auto& [key, c] : counts) events += c[0] + c[1];
    if (events >= 10000) break;
    TallyKabByTpView(run_one(k), counts);
  }
  bool pass = true;
  std::string detail;
  for (const char* key : {"k_ab", "k_ta", "k_tb"}) {
    const double mean = sums[key] / 200.0;
    pass = pass && std::abs(mean - n) <= 0.15 * n;
    detail += std::string("mean ") + key + Fmt(" %.2f, ", mean);
  }
  ChiSquareResult chi = FairBitChiSquare(counts);
  pass = pass && chi.p_value > 0.01;
  detail += Fmt("chi-square %.2f on %.0f df over %.0f events, p=%.4f", chi.statistic,
                chi.degrees_of_freedom, events, chi.p_value);
  Report(12, pass, "key statistics", detail);
}

}  // namespace
}  // namespace sqpc

int main() {
  using namespace sqpc;
  HonestSweep();
  CrossPairIdentity();
  BellPrepMeasure();
  ReflectReflect();
  MeasureAll();
  MixedOps();
  DoubleCnotCheck();
  CollectiveTheorem();
  DishonestTp();
  MeasureResendZ();
  Efficiency();
  KeyStatistics();
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
