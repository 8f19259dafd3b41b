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

#include "sqpc/report_io.h"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace sqpc {
namespace {

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

Json OptionalBits(const std::optional<Bits>& bits) {
  return bits ? Json(FormatBits(*bits)) : Json(nullptr);
}

Json PublicationsJson(const std::array<std::optional<BellKind>, 2>& published) {
  Json out = Json::array();
  for (const auto& p : published) {
    out.push_back(p ? Json(std::string(BellKindName(*p))) : Json(nullptr));
  }
  return out;
}

Json MeasurementJson(const TpMeasurement& m) {
  const bool bell = m.record.basis == Basis::kBell;
  return {
      {"basis", bell ? "bell" : "z"},
      {"positions", m.positions},
      {"outcome", bell ? Json(std::string(BellKindName(BellKindFromCode(m.record.outcome))))
                       : Json(m.record.outcome)},
      {"probability", m.record.probability},
  };
}

Json KeyJson(const KeyFragment& key) {
  Json sources = Json::array();
  for (const KeyBit& k : key) {
    sources.push_back({{"group", k.group},
                       {"transit_position", k.transit_position},
                       {"original_position", k.original_position}});
  }
  return {{"bits", FormatBits(KeyValues(key))}, {"sources", sources}};
}

Json TallyJson(const CheckTally& t) {
  return {{"checks", t.checks}, {"violations", t.violations}, {"rate", t.Rate()}};
}

Json ViewJson(const PartyView& v) {
  Json out = {
      {"role", std::string(RoleName(v.role))},
      {"check_groups", v.check_groups},
      {"announced_alice_ops", v.announced_alice_ops},
      {"announced_bob_ops", v.announced_bob_ops},
  };
  Json pubs = Json::array();
  for (const auto& p : v.publications) pubs.push_back(PublicationsJson(p));
  out["publications"] = pubs;
  if (v.role != Role::kTp) {
    out["own_ops"] = v.own_ops;
    out["own_bits"] = v.own_bits;
    out["own_ciphertext"] = OptionalBits(v.own_ciphertext);
  } else {
    Json plans = Json::array();
    for (const GroupPlan& p : v.plans) plans.push_back(p.swapped);
    out["plans_swapped"] = plans;
    Json measurements = Json::array();
    for (const auto& group : v.tp_measurements) {
      Json g = Json::array();
      for (const TpMeasurement& m : group) g.push_back(MeasurementJson(m));
      measurements.push_back(g);
    }
    out["tp_measurements"] = measurements;
    out["received_q_a"] = OptionalBits(v.received_q_a);
    out["received_q_b"] = OptionalBits(v.received_q_b);
  }
  Json keys = Json::object();
  for (const auto& [name, bits] : v.keys) keys[name] = FormatBits(bits);
  out["keys"] = keys;
  out["verdict"] = v.verdict ? Json(std::string(VerdictName(*v.verdict))) : Json(nullptr);
  return out;
}

std::string ParamsString(const std::map<std::string, std::string>& params) {
  std::string s;
  for (const auto& [k, v] : params) {
    if (!s.empty()) s += ";";
    s += k + "=" + v;
  }
  return s;
}

std::string YesNo(bool b) { return b ? "yes" : "no"; }

std::string EtaFormula(const EfficiencyRow& row) {
  return row.shared_bits.ToString() + "/(" + row.consumed.ToString() + ")";
}

}  // namespace

std::string FormatNumber(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

void WriteHeader(std::ostream& out, const Json& config) {
  out << "# schema_version: " << kReportSchemaVersion << "\n";
  out << "# config: " << config.dump() << "\n";
}

Json TranscriptToJson(const Transcript& t) {
  Json doc;
  doc["schema_version"] = Transcript::kSchemaVersion;
  doc["kind"] = "transcript";
  doc["config"] = {
      {"n", t.config.n},
      {"seed", t.config.seed},
      {"secret_a", FormatBits(t.config.secret_a)},
      {"secret_b", FormatBits(t.config.secret_b)},
      {"threshold", t.config.threshold},
  };
  doc["attack"] = {
      {"name", t.attack_name},
      {"params", t.attack_params},
      {"info_metric", t.attack_info},
      {"diagnostics", t.attack_diagnostics},
  };
  doc["tp_strategy"] = t.tp_strategy;
  doc["status"] = std::string(RunStatusName(t.status));
  doc["status_detail"] = t.status_detail;
  doc["check_groups"] = t.check_groups;

  Json groups = Json::array();
  for (const GroupRecord& g : t.groups) {
    Json sift = Json::array();
    for (const auto& s : g.sift) {
      sift.push_back(s ? Json(std::string(SiftClassName(*s))) : Json(nullptr));
    }
    Json measurements = Json::array();
    for (const TpMeasurement& m : g.tp_measurements) measurements.push_back(MeasurementJson(m));
    Json checks = Json::array();
    for (const CheckEvent& c : g.checks) {
      checks.push_back({{"class", std::string(SiftClassName(c.cls))},
                        {"step", c.step},
                        {"positions", c.original_positions},
                        {"passed", c.passed}});
    }
    groups.push_back({
        {"index", g.plan.group_index},
        {"swapped", g.plan.swapped},
        {"check_group", g.check_group},
        {"alice_ops", OpsString(g.alice_op)},
        {"alice_bits", BitsString(g.alice_bit)},
        {"bob_ops", OpsString(g.bob_op)},
        {"bob_bits", BitsString(g.bob_bit)},
        {"published", PublicationsJson(g.published)},
        {"sift", sift},
        {"tp_bits", BitsString(g.tp_bit)},
        {"tp_measurements", measurements},
        {"checks", checks},
    });
  }
  doc["groups"] = groups;

  const ViolationSummary& v = t.violations;
  doc["violations"] = {
      {"step5_bell", TallyJson(v.step5_bell)},
      {"step6_bell", TallyJson(v.step6_bell)},
      {"step6_z", TallyJson(v.step6_z)},
      {"total_checks", v.TotalChecks()},
      {"total_violations", v.TotalViolations()},
      {"kab_disagreements", v.kab_disagreements},
      {"kta_disagreements", v.kta_disagreements},
      {"ktb_disagreements", v.ktb_disagreements},
  };
  doc["fragment_lengths"] = t.fragment_lengths;
  if (t.keys) {
    doc["keys"] = {{"k_ab", KeyJson(t.keys->k_ab)},
                   {"k_ta", KeyJson(t.keys->k_ta)},
                   {"k_tb", KeyJson(t.keys->k_tb)}};
  } else {
    doc["keys"] = nullptr;
  }
  doc["q_a"] = OptionalBits(t.q_a);
  doc["q_b"] = OptionalBits(t.q_b);
  if (t.outcome) {
    doc["outcome"] = {{"r", FormatBits(t.outcome->r)},
                      {"verdict", std::string(VerdictName(t.outcome->verdict))}};
  } else {
    doc["outcome"] = nullptr;
  }
  const ResourceCounters& r = t.resources;
  doc["resources"] = {
      {"tp_prepared_qubits", r.tp_prepared_qubits},
      {"alice_received_qubits", r.alice_received_qubits},
      {"bob_received_qubits", r.bob_received_qubits},
      {"alice_regenerated_qubits", r.alice_regenerated_qubits},
      {"bob_regenerated_qubits", r.bob_regenerated_qubits},
      {"comparison_bits_published", r.comparison_bits_published},
      {"compared_bits", r.compared_bits},
  };
  doc["views"] = {{"tp", ViewJson(t.View(Role::kTp))},
                  {"alice", ViewJson(t.View(Role::kAlice))},
                  {"bob", ViewJson(t.View(Role::kBob))}};
  return doc;
}

Json AttackReportToJson(const AttackReport& report) {
  auto proportion = [](const Proportion& p) {
    return Json{{"events", p.successes},
                {"trials", p.trials},
                {"rate", p.rate},
                {"ci_low", p.ci_low},
                {"ci_high", p.ci_high}};
  };
  Json classes = Json::array();
  for (const CheckClassReport& c : report.classes) {
    Json row = proportion(c.violations);
    row["class"] = c.name;
    classes.push_back(row);
  }
  return {
      {"schema_version", kReportSchemaVersion},
      {"kind", "attack_report"},
      {"attack", report.attack},
      {"params", report.params},
      {"tp_strategy", report.tp_strategy},
      {"config",
       {{"trials", report.config.trials}, {"n", report.config.n}, {"seed", report.config.seed}}},
      {"detection", proportion(report.detection)},
      {"info_metric", report.info_metric},
      {"check_classes", classes},
      {"diagnostics", report.diagnostics},
      {"insufficient_key_runs", report.insufficient_key_runs},
  };
}

Json HistogramToJson(const Histogram& hist) {
  Json spec = {
      {"scenario", std::string(ScenarioName(hist.spec.kind))},
      {"shots", hist.spec.shots},
      {"seed", hist.spec.seed},
  };
  if (hist.spec.kind == ScenarioKind::kBellPrepMeasure) {
    spec["kind"] = std::string(BellKindName(hist.spec.bell));
  } else {
    spec["swapped"] = hist.spec.swapped;
  }
  return {
      {"schema_version", kReportSchemaVersion},
      {"kind", "histogram"},
      {"spec", spec},
      {"width", hist.width},
      {"counts", hist.counts},
      {"relations", hist.relations},
  };
}

Json EfficiencyTableToJson(const std::vector<EfficiencyRow>& rows,
                           std::span<const std::int64_t> sample_n) {
  auto form = [](const LinearForm& f) { return Json{{"a", f.a}, {"b", f.b}}; };
  Json out_rows = Json::array();
  for (const EfficiencyRow& row : rows) {
    Json samples = Json::object();
    for (std::int64_t n : sample_n) samples[std::to_string(n)] = row.Eta(n).ToString();
    Json j = {
        {"label", row.label},
        {"resource", row.resource},
        {"transmission", row.transmission},
        {"entanglement_swapping", row.swapping},
        {"pre_shared_key", row.pre_shared_key},
        {"shared_bits", form(row.shared_bits)},
        {"consumed", form(row.consumed)},
        {"psk_cost", form(row.psk_cost)},
        {"comparison_cost", form(row.comparison_cost)},
        {"costs_consistent", row.CostsConsistent()},
        {"eta", EtaFormula(row)},
        {"eta_at", samples},
    };
    j["qubits"] = row.qubits ? form(*row.qubits) : Json(nullptr);
    j["classical_bits"] = row.classical_bits ? form(*row.classical_bits) : Json(nullptr);
    out_rows.push_back(j);
  }
  return {{"schema_version", kReportSchemaVersion},
          {"kind", "efficiency_table"},
          {"rows", out_rows}};
}

std::vector<EfficiencyRow> EfficiencyTableFromJson(const Json& doc) {
  auto form = [](const Json& j) {
    return LinearForm{j.at("a").get<std::int64_t>(), j.at("b").get<std::int64_t>()};
  };
  std::vector<EfficiencyRow> rows;
  for (const Json& j : doc.at("rows")) {
    EfficiencyRow row;
    row.label = j.at("label").get<std::string>();
    row.resource = j.at("resource").get<std::string>();
    row.transmission = j.at("transmission").get<std::string>();
    row.swapping = j.at("entanglement_swapping").get<bool>();
    row.pre_shared_key = j.at("pre_shared_key").get<bool>();
    row.shared_bits = form(j.at("shared_bits"));
    row.consumed = form(j.at("consumed"));
    row.psk_cost = form(j.at("psk_cost"));
    row.comparison_cost = form(j.at("comparison_cost"));
    if (!j.at("qubits").is_null()) row.qubits = form(j.at("qubits"));
    if (!j.at("classical_bits").is_null()) row.classical_bits = form(j.at("classical_bits"));
    rows.push_back(std::move(row));
  }
  return rows;
}

void WriteTranscriptText(std::ostream& out, const Transcript& t, const Json& config) {
  WriteHeader(out, config);
  out << "status: " << RunStatusName(t.status);
  if (!t.status_detail.empty()) out << " (" << t.status_detail << ")";
  out << "\n";
  out << "attack: " << t.attack_name << "\n";
  out << "tp: " << t.tp_strategy << "\n";
  const ViolationSummary& v = t.violations;
  out << "checks: " << v.TotalChecks() << "  violations: " << v.TotalViolations() << "\n";
  out << "  step5 bell  " << v.step5_bell.violations << "/" << v.step5_bell.checks << "\n";
  out << "  step6 bell  " << v.step6_bell.violations << "/" << v.step6_bell.checks << "\n";
  out << "  step6 z     " << v.step6_z.violations << "/" << v.step6_z.checks << "\n";
  out << "fragments:";
  for (const auto& [name, len] : t.fragment_lengths) out << " " << name << "=" << len;
  out << "\n";
  if (t.q_a) out << "q_a: " << FormatBits(*t.q_a) << "\n";
  if (t.q_b) out << "q_b: " << FormatBits(*t.q_b) << "\n";
  if (t.outcome) {
    out << "r: " << FormatBits(t.outcome->r) << "\n";
    out << "verdict: " << VerdictName(t.outcome->verdict) << "\n";
  }
  if (t.attack_name != "none") {
    out << "attack info: " << FormatNumber(t.attack_info) << "\n";
    for (const auto& [k, value] : t.attack_diagnostics) {
      out << "  " << k << ": " << FormatNumber(value) << "\n";
    }
  }
}

void WriteTranscriptCsv(std::ostream& out, const Transcript& t, const Json& config) {
  WriteHeader(out, config);
  out << "# status: " << RunStatusName(t.status);
  if (t.outcome) out << ", verdict: " << VerdictName(t.outcome->verdict);
  out << "\n";
  out << "group,swapped,check_group,alice_ops,alice_bits,bob_ops,bob_bits,published,"
         "sift,tp_bits,checks,violations\n";
  for (const GroupRecord& g : t.groups) {
    std::string published;
    for (const auto& p : g.published) {
      if (!published.empty()) published += " ";
      published += p ? std::string(BellKindName(*p)) : "-";
    }
    std::string sift;
    for (const auto& s : g.sift) {
      if (!sift.empty()) sift += " ";
      sift += s ? std::string(SiftClassName(*s)) : "-";
    }
    std::size_t failed = 0;
    for (const CheckEvent& c : g.checks) failed += c.passed ? 0 : 1;
    out << g.plan.group_index << "," << (g.plan.swapped ? 1 : 0) << ","
        << (g.check_group ? 1 : 0) << "," << OpsString(g.alice_op) << ","
        << BitsString(g.alice_bit) << "," << OpsString(g.bob_op) << ","
        << BitsString(g.bob_bit) << "," << published << "," << sift << ","
        << BitsString(g.tp_bit) << "," << g.checks.size() << "," << failed << "\n";
  }
}

void WriteAttackReportCsv(std::ostream& out, const AttackReport& report, const Json& config) {
  WriteHeader(out, config);
  out << "attack,params,scope,trials,events,detection_rate,ci_low,ci_high,info_metric\n";
  auto row = [&](const std::string& scope, const Proportion& p) {
    out << report.attack << "," << ParamsString(report.params) << "," << scope << ","
        << p.trials << "," << p.successes << "," << FormatNumber(p.rate) << ","
        << FormatNumber(p.ci_low) << "," << FormatNumber(p.ci_high) << ","
        << FormatNumber(report.info_metric) << "\n";
  };
  row("run", report.detection);
  for (const CheckClassReport& c : report.classes) row(c.name, c.violations);
}

void WriteAttackReportText(std::ostream& out, const AttackReport& report,
                           const Json& config) {
  WriteHeader(out, config);
  out << "attack: " << report.attack;
  if (!report.params.empty()) out << " (" << ParamsString(report.params) << ")";
  out << "\n";
  out << "tp: " << report.tp_strategy << "\n";
  out << "trials: " << report.config.trials << "  n: " << report.config.n << "\n";
  out << "info metric: " << FormatNumber(report.info_metric) << "\n";
  out << std::left << std::setw(12) << "scope" << std::setw(10) << "events" << std::setw(10)
      << "trials" << std::setw(14) << "rate"
      << "95% interval\n";
  auto row = [&](const std::string& scope, const Proportion& p) {
    out << std::left << std::setw(12) << scope << std::setw(10) << p.successes
        << std::setw(10) << p.trials << std::setw(14) << FormatNumber(p.rate) << "["
        << FormatNumber(p.ci_low) << ", " << FormatNumber(p.ci_high) << "]\n";
  };
  row("run", report.detection);
  for (const CheckClassReport& c : report.classes) row(c.name, c.violations);
  for (const auto& [k, value] : report.diagnostics) {
    out << k << ": " << FormatNumber(value) << "\n";
  }
}

void WriteHistogramCsv(std::ostream& out, const Histogram& hist, const Json& config) {
  WriteHeader(out, config);
  out << "outcome,count,frequency\n";
  const double shots = static_cast<double>(hist.spec.shots);
  for (const auto& [outcome, count] : hist.counts) {
    out << outcome << "," << count << "," << FormatNumber(static_cast<double>(count) / shots)
        << "\n";
  }
}

void WriteHistogramText(std::ostream& out, const Histogram& hist, const Json& config) {
  WriteHeader(out, config);
  out << "scenario: " << ScenarioName(hist.spec.kind) << "  shots: " << hist.spec.shots
      << "\n";
  out << std::left << std::setw(std::max<int>(static_cast<int>(hist.width), 7) + 2)
      << "outcome"
      << "count\n";
  for (const auto& [outcome, count] : hist.counts) {
    out << std::left << std::setw(std::max<int>(static_cast<int>(hist.width), 7) + 2)
        << outcome << count << "\n";
  }
  for (const auto& [name, holds] : hist.relations) {
    out << "relation " << name << ": " << holds << "/" << hist.spec.shots << "\n";
  }
}

void WriteEfficiencyCsv(std::ostream& out, const std::vector<EfficiencyRow>& rows,
                        std::span<const std::int64_t> sample_n, const Json& config) {
  WriteHeader(out, config);
  out << "protocol,resource,transmission,entanglement_swapping,pre_shared_key,psk_cost,"
         "comparison_cost,eta";
  for (std::int64_t n : sample_n) out << ",eta_n" << n;
  out << ",costs_consistent\n";
  for (const EfficiencyRow& row : rows) {
    out << row.label << "," << row.resource << "," << row.transmission << ","
        << YesNo(row.swapping) << "," << YesNo(row.pre_shared_key) << ","
        << row.psk_cost.ToString() << "," << row.comparison_cost.ToString() << ","
        << EtaFormula(row);
    for (std::int64_t n : sample_n) out << "," << row.Eta(n).ToString();
    out << "," << YesNo(row.CostsConsistent()) << "\n";
  }
}

void WriteEfficiencyText(std::ostream& out, const std::vector<EfficiencyRow>& rows,
                         std::span<const std::int64_t> sample_n, const Json& config) {
  WriteHeader(out, config);
  out << std::left << std::setw(16) << "protocol" << std::setw(30) << "resource"
      << std::setw(13) << "transmission" << std::setw(9) << "swapping" << std::setw(5)
      << "psk" << std::setw(10) << "psk cost" << std::setw(12) << "comparison"
      << std::setw(14) << "eta";
  for (std::int64_t n : sample_n) out << std::setw(10) << ("n=" + std::to_string(n));
  out << "\n";
  for (const EfficiencyRow& row : rows) {
    out << std::left << std::setw(16) << row.label << std::setw(30) << row.resource
        << std::setw(13) << row.transmission << std::setw(9) << YesNo(row.swapping)
        << std::setw(5) << YesNo(row.pre_shared_key) << std::setw(10)
        << row.psk_cost.ToString() << std::setw(12) << row.comparison_cost.ToString()
        << std::setw(14) << EtaFormula(row);
    for (std::int64_t n : sample_n) out << std::setw(10) << row.Eta(n).ToString();
    out << "\n";
  }
  for (const EfficiencyRow& row : rows) {
    if (!row.CostsConsistent()) {
      out << "note: " << row.label << " cost columns sum to "
          << (row.psk_cost + row.comparison_cost).ToString() << ", efficiency as reported uses "
          << row.consumed.ToString() << "\n";
    }
  }
}

}  // namespace sqpc
