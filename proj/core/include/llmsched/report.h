// Copyright 2026 The llmsched Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "llmsched/simulator.h"

namespace llmsched {

inline constexpr int kReportFormatVersion = 1;

// report.jsonl: a header record, one record per period, then a totals
// record. Contains nothing run-environment specific, so equal runs produce
// equal bytes.
std::string report_jsonl(const RunReport& report);
std::string jobs_jsonl(const RunReport& report, const std::vector<LLMProfile>& llms);
std::string events_jsonl(const RunReport& report);

// Writes `content` to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Creates and returns parent/<prefix>-NNN, the first index not yet taken.
std::filesystem::path create_session_dir(const std::filesystem::path& parent, const std::string& prefix);

// Writes report.jsonl, jobs.jsonl, events.jsonl and manifest.json into `dir`.
void write_run_dir(const std::filesystem::path& dir, const RunReport& report, const std::vector<LLMProfile>& llms,
                   const nlohmann::json& manifest);

nlohmann::json aggregate_json(const AggregateReport& aggregate, const std::string& scenario_hash,
                              const nlohmann::json& config);

// Headline numbers from a report.jsonl, an aggregate.json or a directory
// holding either (aggregate preferred).
struct ReportSummary {
  std::string source;
  std::string method;
  std::string scenario_hash;
  double perf = 0.0;
  double cost_usd = 0.0;
  double makespan_ms = 0.0;
  nlohmann::json config;
};

ReportSummary read_summary(const std::filesystem::path& path);

struct ComparisonRow {
  ReportSummary summary;
  // Percentages relative to the reference; unset when the reference is 0.
  std::optional<double> perf_impv;
  std::optional<double> cost_saving;
  std::optional<double> makespan_saving;
};

// IMPV = (method - ref) / ref and SAVING = (ref - method) / ref, in percent.
// Throws InvalidInput when scenario hashes differ.
std::vector<ComparisonRow> compare(const ReportSummary& reference, std::span<const ReportSummary> others);

std::string format_comparison(const ReportSummary& reference, std::span<const ComparisonRow> rows);

}  // namespace llmsched
