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

#include "llmsched/report.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "llmsched/errors.h"

namespace llmsched {

using nlohmann::json;

std::string report_jsonl(const RunReport& r) {
  std::string out;
  json header = {{"record", "header"},
                 {"format", "llmsched.report"},
                 {"version", kReportFormatVersion},
                 {"seed", r.seed},
                 {"method", r.method},
                 {"scenario_hash", r.scenario_hash},
                 {"config", r.config}};
  out += header.dump() + "\n";
  for (const auto& p : r.periods) {
    json rec = p.to_json();
    rec["record"] = "period";
    out += rec.dump() + "\n";
  }
  json totals = {{"record", "totals"},
                 {"cost_picos", r.total_cost.picos()},
                 {"cost_usd", r.total_cost.dollars()},
                 {"perf", r.total_perf},
                 {"makespan_ms", r.total_makespan_ms},
                 {"jobs", r.total_jobs},
                 {"correct", r.total_correct},
                 {"periods", r.periods.size()},
                 {"lambda", r.lambda},
                 {"initialization", {{"queries", r.init_queries},
                                     {"cost_picos", r.init_cost.picos()},
                                     {"cost_usd", r.init_cost.dollars()},
                                     {"time_ms", r.init_time_ms}}}};
  out += totals.dump() + "\n";
  return out;
}

std::string jobs_jsonl(const RunReport& r, const std::vector<LLMProfile>& llms) {
  std::string out;
  for (const auto& rec : r.jobs) {
    const auto& j = rec.job;
    json line = {{"query_id", j.query_id},
                 {"period", j.period},
                 {"target", target_label(j.target, llms)},
                 {"response", j.response},
                 {"cost_picos", j.actual_cost.picos()},
                 {"latency_ms", j.actual_latency.count()},
                 {"output_tokens", j.output_tokens},
                 {"correct", rec.correct},
                 {"inspected", rec.inspected}};
    out += line.dump() + "\n";
  }
  return out;
}

std::string events_jsonl(const RunReport& r) {
  std::string out;
  for (const auto& e : r.events) out += e.to_json().dump() + "\n";
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out << content;
    if (!out) throw FormatError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::filesystem::path create_session_dir(const std::filesystem::path& parent, const std::string& prefix) {
  std::filesystem::create_directories(parent);
  for (int i = 1; i < 100000; ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "%s-%03d", prefix.c_str(), i);
    auto dir = parent / name;
    std::error_code ec;
    if (std::filesystem::create_directory(dir, ec)) return dir;
    if (ec) throw FormatError("cannot create " + dir.string() + ": " + ec.message());
  }
  throw FormatError("no free session directory under " + parent.string());
}

void write_run_dir(const std::filesystem::path& dir, const RunReport& report, const std::vector<LLMProfile>& llms,
                   const json& manifest) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "report.jsonl", report_jsonl(report));
  write_file_atomic(dir / "jobs.jsonl", jobs_jsonl(report, llms));
  write_file_atomic(dir / "events.jsonl", events_jsonl(report));
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

json aggregate_json(const AggregateReport& aggregate, const std::string& scenario_hash, const json& config) {
  json j = aggregate.to_json();
  j["format"] = "llmsched.aggregate";
  j["version"] = kReportFormatVersion;
  j["scenario_hash"] = scenario_hash;
  j["config"] = config;
  return j;
}

namespace {

ReportSummary summary_from_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open report " + path.string());
  ReportSummary s;
  s.source = path.string();
  bool header = false, totals = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
    auto kind = rec.value("record", "");
    if (kind == "header") {
      if (rec.value("format", "") != "llmsched.report" || rec.value("version", 0) != kReportFormatVersion) {
        throw FormatError(path.string() + ": unsupported report format");
      }
      s.method = rec.at("method").get<std::string>();
      s.scenario_hash = rec.at("scenario_hash").get<std::string>();
      s.config = rec.at("config");
      header = true;
    } else if (kind == "totals") {
      s.perf = rec.at("perf").get<double>();
      s.cost_usd = rec.at("cost_usd").get<double>();
      s.makespan_ms = rec.at("makespan_ms").get<double>();
      totals = true;
    }
  }
  if (!header || !totals) throw FormatError(path.string() + ": missing header or totals record");
  return s;
}

ReportSummary summary_from_aggregate(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open aggregate " + path.string());
  try {
    json j = json::parse(in);
    if (j.value("format", "") != "llmsched.aggregate") throw FormatError(path.string() + ": not an aggregate");
    ReportSummary s;
    s.source = path.string();
    s.method = j.at("method").get<std::string>();
    s.scenario_hash = j.at("scenario_hash").get<std::string>();
    s.perf = j.at("perf").at("mean").get<double>();
    s.cost_usd = j.at("cost_usd").at("mean").get<double>();
    s.makespan_ms = j.at("makespan_ms").at("mean").get<double>();
    s.config = j.at("config");
    return s;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::optional<double> relative(double numerator, double reference) {
  if (reference == 0.0) return std::nullopt;
  return 100.0 * numerator / reference;
}

std::string pct(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f%%", *v);
  return buf;
}

}  // namespace

ReportSummary read_summary(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) {
    if (std::filesystem::exists(path / "aggregate.json")) return summary_from_aggregate(path / "aggregate.json");
    if (std::filesystem::exists(path / "report.jsonl")) return summary_from_report(path / "report.jsonl");
    throw FormatError(path.string() + " holds neither aggregate.json nor report.jsonl");
  }
  if (path.extension() == ".json") return summary_from_aggregate(path);
  return summary_from_report(path);
}

std::vector<ComparisonRow> compare(const ReportSummary& reference, std::span<const ReportSummary> others) {
  std::vector<ComparisonRow> rows;
  for (const auto& o : others) {
    if (o.scenario_hash != reference.scenario_hash) {
      throw InvalidInput("cannot compare " + o.source + " with " + reference.source +
                         ": they ran different scenarios or workloads (scenario hash " + o.scenario_hash +
                         " vs " + reference.scenario_hash + ")");
    }
    ComparisonRow row;
    row.summary = o;
    row.perf_impv = relative(o.perf - reference.perf, reference.perf);
    row.cost_saving = relative(reference.cost_usd - o.cost_usd, reference.cost_usd);
    row.makespan_saving = relative(reference.makespan_ms - o.makespan_ms, reference.makespan_ms);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_comparison(const ReportSummary& reference, std::span<const ComparisonRow> rows) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-24s %10s %10s %12s %10s %14s %10s\n", "Method", "Perf", "IMPV", "Cost($)",
                "SAVING", "Makespan(ms)", "SAVING");
  out << buf;
  std::snprintf(buf, sizeof buf, "%-24s %10.4f %10s %12.6f %10s %14.1f %10s\n", (reference.method + " (ref)").c_str(),
                reference.perf, "-", reference.cost_usd, "-", reference.makespan_ms, "-");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-24s %10.4f %10s %12.6f %10s %14.1f %10s\n", r.summary.method.c_str(),
                  r.summary.perf, pct(r.perf_impv).c_str(), r.summary.cost_usd, pct(r.cost_saving).c_str(),
                  r.summary.makespan_ms, pct(r.makespan_saving).c_str());
    out << buf;
  }
  return out.str();
}

}  // namespace llmsched
