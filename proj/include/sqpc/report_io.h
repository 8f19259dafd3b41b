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

#ifndef SQPC_REPORT_IO_H_
#define SQPC_REPORT_IO_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sqpc/adversary.h"
#include "sqpc/analysis.h"
#include "sqpc/protocol.h"

// JSON documents, CSV tables and plain-text renderings of simulator
// outputs. Every document carries "schema_version"; CSV and text outputs
// start with "# " comment lines holding the schema version and the
// effective configuration. See docs/formats.md.

namespace sqpc {

inline constexpr int kReportSchemaVersion = 1;

using Json = nlohmann::json;

Json TranscriptToJson(const Transcript& transcript);
Json AttackReportToJson(const AttackReport& report);
Json HistogramToJson(const Histogram& hist);
Json EfficiencyTableToJson(const std::vector<EfficiencyRow>& rows,
                           std::span<const std::int64_t> sample_n);
// Inverse of EfficiencyTableToJson for the row data. Throws Json exceptions
// on malformed input.
std::vector<EfficiencyRow> EfficiencyTableFromJson(const Json& doc);

// Compact "%.10g" rendering used by every CSV and text writer.
std::string FormatNumber(double value);

void WriteHeader(std::ostream& out, const Json& config);

void WriteTranscriptText(std::ostream& out, const Transcript& transcript, const Json& config);
void WriteTranscriptCsv(std::ostream& out, const Transcript& transcript, const Json& config);
void WriteAttackReportCsv(std::ostream& out, const AttackReport& report, const Json& config);
void WriteAttackReportText(std::ostream& out, const AttackReport& report, const Json& config);
void WriteHistogramCsv(std::ostream& out, const Histogram& hist, const Json& config);
void WriteHistogramText(std::ostream& out, const Histogram& hist, const Json& config);
void WriteEfficiencyCsv(std::ostream& out, const std::vector<EfficiencyRow>& rows,
                        std::span<const std::int64_t> sample_n, const Json& config);
void WriteEfficiencyText(std::ostream& out, const std::vector<EfficiencyRow>& rows,
                         std::span<const std::int64_t> sample_n, const Json& config);

}  // namespace sqpc

#endif  // SQPC_REPORT_IO_H_
