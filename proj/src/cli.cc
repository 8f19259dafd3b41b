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

#include "sqpc/cli.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "sqpc/adversary.h"
#include "sqpc/analysis.h"
#include "sqpc/protocol.h"
#include "sqpc/report_io.h"

namespace sqpc {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string output;
};

struct AttackFlags {
  std::string attack = "none";
  std::string tp = "honest";
  std::string attacker = "eve";
  std::string leg;
  bool random_pairing = false;
};

struct RunOptions {
  CommonOptions common;
  AttackFlags attack;
  std::size_t n = 8;
  std::string secret_a = "random";
  std::string secret_b = "random";
  double threshold = 0.0;
  std::size_t retries = 0;
};

struct EvalOptions {
  CommonOptions common;
  AttackFlags attack;
  std::size_t n = 8;
  std::size_t trials = 100;
};

struct HistogramOptions {
  CommonOptions common;
  std::string scenario = "bell";
  std::string kind = "phi+";
  bool swapped = false;
  std::size_t shots = 1024;
};

struct EfficiencyOptions {
  CommonOptions common;
  std::vector<std::int64_t> n = {1, 8, 64};
};

void AddCommon(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("--seed", opts.seed, "Root seed")->capture_default_str();
  sub->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
  sub->add_option("--output,-o", opts.output, "Write to this file instead of stdout");
}

void AddAttackFlags(CLI::App* sub, AttackFlags& opts) {
  sub->add_option("--attack", opts.attack, "Attack name")
      ->check(CLI::IsMember(AttackNames()))
      ->capture_default_str();
  sub->add_option("--tp", opts.tp, "TP behaviour")
      ->check(CLI::IsMember({"honest", "zmeasure", "fake-z"}))
      ->capture_default_str();
  sub->add_option("--attacker", opts.attacker,
                  "Who runs the channel attack; alice acts on the Bob -> TP leg only")
      ->check(CLI::IsMember({"eve", "alice"}))
      ->capture_default_str();
  sub->add_option("--leg", opts.leg, "Leg for measure-resend attacks")
      ->check(CLI::IsMember({"tp_to_alice", "alice_to_bob", "bob_to_tp"}));
  sub->add_flag("--random-pairing", opts.random_pairing,
                "Bell measure-resend draws a random pairing per group");
}

Json AttackFlagsJson(const AttackFlags& a) {
  return {{"attack", a.attack},
          {"tp", a.tp},
          {"attacker", a.attacker},
          {"leg", a.leg.empty() ? Json(nullptr) : Json(a.leg)},
          {"random_pairing", a.random_pairing}};
}

ChannelLeg ParseLeg(const std::string& text) {
  for (ChannelLeg leg :
       {ChannelLeg::kTpToAlice, ChannelLeg::kAliceToBob, ChannelLeg::kBobToTp}) {
    if (LegName(leg) == text) return leg;
  }
  throw UsageError("unknown leg '" + text + "'");
}

struct AttackSetup {
  std::string name;
  AttackFactory factory;
  std::shared_ptr<const TpBehavior> tp;
};

AttackSetup ResolveFlags(const AttackFlags& flags) {
  AttackOptions options;
  if (!flags.leg.empty()) options.leg = ParseLeg(flags.leg);
  options.random_pairing = flags.random_pairing;
  options.alice_attacker = flags.attacker == "alice";
  ResolvedAttack resolved;
  try {
    resolved = ResolveAttack(flags.attack, options);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  AttackSetup setup{resolved.name, resolved.factory, resolved.tp};
  if (flags.tp != "honest") {
    if (setup.tp) throw UsageError("--tp conflicts with attack '" + flags.attack + "'");
    setup.tp = MakeTpBehavior(flags.tp);
  }
  return setup;
}

Bits ResolveSecret(const std::string& text, const Bits& random_value) {
  if (text == "random") return random_value;
  try {
    return ParseBits(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// Writes the document to --output or `out`.
void Emit(const CommonOptions& common, std::ostream& out,
          const std::function<void(std::ostream&)>& write) {
  if (common.output.empty()) {
    write(out);
    return;
  }
  std::ofstream file(common.output, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + common.output);
  write(file);
  if (!file) throw std::runtime_error("failed writing " + common.output);
}

void EmitJson(const CommonOptions& common, std::ostream& out, Json doc, const Json& config) {
  doc["effective_config"] = config;
  Emit(common, out, [&](std::ostream& os) { os << doc.dump(2) << "\n"; });
}

int CmdRun(const RunOptions& opts, bool n_given, std::ostream& out) {
  Rng root(opts.common.seed);
  std::size_t n = opts.n;
  if (!n_given) {
    if (opts.secret_a != "random") n = ResolveSecret(opts.secret_a, {}).size();
    else if (opts.secret_b != "random") n = ResolveSecret(opts.secret_b, {}).size();
  }
  if (n == 0) throw UsageError("--n must be at least 1");
  Rng secret_rng = root.Fork("secrets");
  const auto [random_a, random_b] = RandomSecrets(n, false, secret_rng);
  const Bits secret_a = ResolveSecret(opts.secret_a, random_a);
  const Bits secret_b = ResolveSecret(opts.secret_b, random_b);
  if (secret_a.size() != n || secret_b.size() != n) {
    throw UsageError("secrets must have exactly n = " + std::to_string(n) + " bits");
  }
  if (!(opts.threshold >= 0.0 && opts.threshold <= 1.0)) {
    throw UsageError("--threshold must lie in [0, 1]");
  }

  AttackSetup setup = ResolveFlags(opts.attack);
  Rng sample_rng = root.Fork("attack-sample");
  std::unique_ptr<AttackStrategy> attack =
      setup.factory ? setup.factory(0, sample_rng) : nullptr;

  ProtocolConfig config;
  config.n = n;
  config.seed = opts.common.seed;
  config.secret_a = secret_a;
  config.secret_b = secret_b;
  config.threshold = opts.threshold;
  std::size_t attempts = 1;
  const Transcript t =
      RunProtocolWithRetry(config, opts.retries + 1, attack.get(), setup.tp.get(), &attempts);

  Json effective = {
      {"command", "run"},
      {"n", n},
      {"seed", opts.common.seed},
      {"secrets_a", FormatBits(secret_a)},
      {"secrets_b", FormatBits(secret_b)},
      {"threshold", opts.threshold},
      {"retries", opts.retries},
      {"attempts_used", attempts},
      {"format", opts.common.format},
  };
  effective.update(AttackFlagsJson(opts.attack));
  effective["tp"] = setup.tp ? setup.tp->Name() : "honest";

  if (opts.common.format == "json") {
    EmitJson(opts.common, out, TranscriptToJson(t), effective);
  } else if (opts.common.format == "csv") {
    Emit(opts.common, out, [&](std::ostream& os) { WriteTranscriptCsv(os, t, effective); });
  } else {
    Emit(opts.common, out, [&](std::ostream& os) { WriteTranscriptText(os, t, effective); });
  }

  switch (t.status) {
    case RunStatus::kCompleted: return kExitOk;
    case RunStatus::kDetectionAbort: return kExitDetectionAbort;
    case RunStatus::kInsufficientKey: return kExitInsufficientKey;
  }
  return kExitFailure;
}

int CmdAttackEval(const EvalOptions& opts, std::ostream& out) {
  if (opts.trials == 0) throw UsageError("--trials must be at least 1");
  if (opts.n == 0) throw UsageError("--n must be at least 1");
  AttackSetup setup = ResolveFlags(opts.attack);
  EvaluateConfig config{opts.trials, opts.n, opts.common.seed};
  const AttackReport report = Evaluate(setup.name, setup.factory, setup.tp.get(), config);

  Json effective = {
      {"command", "attack-eval"},
      {"n", opts.n},
      {"trials", opts.trials},
      {"seed", opts.common.seed},
      {"format", opts.common.format},
  };
  effective.update(AttackFlagsJson(opts.attack));
  effective["tp"] = setup.tp ? setup.tp->Name() : "honest";

  if (opts.common.format == "json") {
    EmitJson(opts.common, out, AttackReportToJson(report), effective);
  } else if (opts.common.format == "csv") {
    Emit(opts.common, out,
         [&](std::ostream& os) { WriteAttackReportCsv(os, report, effective); });
  } else {
    Emit(opts.common, out,
         [&](std::ostream& os) { WriteAttackReportText(os, report, effective); });
  }
  return kExitOk;
}

int CmdHistogram(const HistogramOptions& opts, std::ostream& out) {
  ScenarioSpec spec;
  const auto kind = ParseScenarioKind(opts.scenario);
  if (!kind) throw UsageError("unknown scenario '" + opts.scenario + "'");
  spec.kind = *kind;
  const auto bell = ParseBellKind(opts.kind);
  if (!bell) throw UsageError("unknown Bell state '" + opts.kind + "'");
  spec.bell = *bell;
  spec.swapped = opts.swapped;
  spec.shots = opts.shots;
  spec.seed = opts.common.seed;
  if (spec.shots == 0) throw UsageError("--shots must be at least 1");
  const Histogram hist = RunScenario(spec);

  Json effective = {
      {"command", "histogram"},
      {"scenario", opts.scenario},
      {"shots", opts.shots},
      {"seed", opts.common.seed},
      {"format", opts.common.format},
  };
  if (spec.kind == ScenarioKind::kBellPrepMeasure) {
    effective["kind"] = std::string(BellKindName(spec.bell));
  } else {
    effective["swapped"] = opts.swapped;
  }

  if (opts.common.format == "json") {
    EmitJson(opts.common, out, HistogramToJson(hist), effective);
  } else if (opts.common.format == "csv") {
    Emit(opts.common, out, [&](std::ostream& os) { WriteHistogramCsv(os, hist, effective); });
  } else {
    Emit(opts.common, out, [&](std::ostream& os) { WriteHistogramText(os, hist, effective); });
  }
  return kExitOk;
}

int CmdEfficiency(const EfficiencyOptions& opts, std::ostream& out) {
  for (std::int64_t n : opts.n) {
    if (n < 1) throw UsageError("--n values must be at least 1");
  }
  const auto rows = EfficiencyTable();
  Json effective = {
      {"command", "efficiency"},
      {"n", opts.n},
      {"format", opts.common.format},
  };
  if (opts.common.format == "json") {
    EmitJson(opts.common, out, EfficiencyTableToJson(rows, opts.n), effective);
  } else if (opts.common.format == "csv") {
    Emit(opts.common, out,
         [&](std::ostream& os) { WriteEfficiencyCsv(os, rows, opts.n, effective); });
  } else {
    Emit(opts.common, out,
         [&](std::ostream& os) { WriteEfficiencyText(os, rows, opts.n, effective); });
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semi-quantum private comparison simulator", "sqpc"};
  app.set_config("--config", "", "TOML or INI file with options; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  RunOptions run_opts;
  EvalOptions eval_opts;
  HistogramOptions hist_opts;
  EfficiencyOptions eff_opts;

  CLI::App* run = app.add_subcommand("run", "Run the protocol once");
  AddCommon(run, run_opts.common);
  AddAttackFlags(run, run_opts.attack);
  CLI::Option* n_opt = run->add_option("--n", run_opts.n, "Secret length in bits");
  run->add_option("--secrets-a", run_opts.secret_a, "Alice's secret: binary, 0x hex or random")
      ->capture_default_str();
  run->add_option("--secrets-b", run_opts.secret_b, "Bob's secret: binary, 0x hex or random")
      ->capture_default_str();
  run->add_option("--threshold", run_opts.threshold, "Abort when violations/checks exceeds this")
      ->capture_default_str();
  run->add_option("--retries", run_opts.retries,
                  "Extra attempts with derived seeds on insufficient key")
      ->capture_default_str();

  CLI::App* eval = app.add_subcommand("attack-eval", "Monte Carlo evaluation of an attack");
  AddCommon(eval, eval_opts.common);
  AddAttackFlags(eval, eval_opts.attack);
  eval->get_option("--attack")->required();
  eval->add_option("--n", eval_opts.n, "Secret length per run")->capture_default_str();
  eval->add_option("--trials", eval_opts.trials, "Independent runs")->capture_default_str();

  CLI::App* hist = app.add_subcommand("histogram", "Shot histogram of a circuit scenario");
  AddCommon(hist, hist_opts.common);
  hist->add_option("--scenario", hist_opts.scenario, "Scenario")
      ->check(CLI::IsMember({"bell", "reflect-reflect", "measure-all", "mixed-ops"}))
      ->capture_default_str();
  hist->add_option("--kind", hist_opts.kind, "Bell state for the bell scenario")
      ->capture_default_str();
  hist->add_flag("--swapped", hist_opts.swapped, "Re-pair the group");
  hist->add_option("--shots", hist_opts.shots, "Number of shots")->capture_default_str();

  CLI::App* eff = app.add_subcommand("efficiency", "Qubit efficiency table");
  AddCommon(eff, eff_opts.common);
  eff->add_option("--n", eff_opts.n, "Secret lengths at which to evaluate")
      ->capture_default_str();

  for (CLI::App* sub : {run, eval, hist, eff}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return CmdRun(run_opts, n_opt->count() > 0, out);
    if (eval->parsed()) return CmdAttackEval(eval_opts, out);
    if (hist->parsed()) return CmdHistogram(hist_opts, out);
    if (eff->parsed()) return CmdEfficiency(eff_opts, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace sqpc
