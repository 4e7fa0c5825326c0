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

#include "llmsched_cli/commands.h"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <sstream>

#include "llmsched/errors.h"
#include "llmsched/report.h"
#include "llmsched/scenario.h"
#include "llmsched/sim_config.h"
#include "llmsched/simulator.h"
#include "llmsched/workload_generator.h"
#include "llmsched/workload_io.h"

#ifndef LLMSCHED_VERSION
#define LLMSCHED_VERSION "0.0.0"
#endif

namespace llmsched::cli {

using nlohmann::json;

namespace {

std::filesystem::path g_last_session;

std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void print_config_error(const ConfigError& e, std::ostream& err) {
  err << "invalid configuration:\n";
  for (const auto& d : e.diagnostics()) err << "  " << d << "\n";
}

struct Inputs {
  Scenario scenario;
  std::vector<Query> dataset;
  std::string fingerprint;
};

Inputs load_inputs(const SimConfig& config) {
  Inputs in;
  in.scenario = Scenario::load(config.scenario);
  in.dataset = read_workload(config.workload);
  in.scenario.check_workload(in.dataset);
  in.fingerprint = scenario_fingerprint(in.scenario, in.dataset);
  return in;
}

json manifest_for(const SimConfig& config, const std::filesystem::path& config_path, uint64_t seed,
                  const std::filesystem::path& dir, const std::string& started) {
  SimConfig resolved = config;
  resolved.seed = seed;
  resolved.repetitions = 1;
  return {{"format", "llmsched.manifest"},
          {"version", kReportFormatVersion},
          {"tool_version", LLMSCHED_VERSION},
          {"config_path", std::filesystem::absolute(config_path).lexically_normal().string()},
          {"resolved_config", resolved.to_json()},
          {"output_dir", std::filesystem::absolute(dir).lexically_normal().string()},
          {"started_at", started},
          {"finished_at", utc_now()}};
}

std::string rep_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "rep-%03d", i + 1);
  return buf;
}

// Runs every repetition into <dir>/rep-NNN and writes aggregate.json.
AggregateReport run_into(const SimConfig& config, const std::filesystem::path& config_path, const Inputs& inputs,
                         const std::filesystem::path& dir) {
  std::vector<RunReport> runs;
  for (int i = 0; i < config.repetitions; ++i) {
    std::string started = utc_now();
    uint64_t seed = config.seed + static_cast<uint64_t>(i);
    RunReport r = run_once(config, inputs.scenario, inputs.dataset, seed);
    auto rep_dir = dir / rep_name(i);
    write_run_dir(rep_dir, r, inputs.scenario.llms, manifest_for(config, config_path, seed, rep_dir, started));
    r.jobs.clear();
    runs.push_back(std::move(r));
  }
  AggregateReport agg = aggregate(runs);
  write_file_atomic(dir / "aggregate.json", aggregate_json(agg, inputs.fingerprint, config.to_json()).dump(2) + "\n");
  return agg;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

}  // namespace

const std::filesystem::path& last_session_dir() { return g_last_session; }

int cmd_print_defaults(std::ostream& out) {
  out << SimConfig{}.to_json().dump(2) << "\n";
  return kOk;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  try {
    SimConfig config = SimConfig::load(args.config);
    for (const auto& o : args.overrides) apply_override(config, o);
    if (args.seed) config.seed = *args.seed;
    if (args.repetitions) config.repetitions = *args.repetitions;
    config.validate();
    Inputs inputs = load_inputs(config);

    auto session = create_session_dir(args.out, "sim");
    g_last_session = session;
    AggregateReport agg = run_into(config, args.config, inputs, session);
    out << "session " << session.string() << "\n";
    out << agg.method << " reps=" << agg.repetitions << " perf=" << fmt("%.4f", agg.perf.mean)
        << " cost_usd=" << fmt("%.6f", agg.cost_usd.mean) << " makespan_ms=" << fmt("%.1f", agg.makespan_ms.mean)
        << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    print_config_error(e, err);
    return kConfigInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  if (args.grid.empty()) {
    err << "sweep: at least one --grid KEY=V1,V2,... is required\n";
    return kUsage;
  }
  try {
    SimConfig base = SimConfig::load(args.config);
    for (const auto& o : args.overrides) apply_override(base, o);
    if (args.repetitions) base.repetitions = *args.repetitions;

    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
    for (const auto& g : args.grid) {
      auto eq = g.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == g.size()) {
        err << "sweep: grid '" << g << "' must look like KEY=V1,V2,...\n";
        return kUsage;
      }
      auto values = split(g.substr(eq + 1), ',');
      for (const auto& v : values) {
        if (v.empty()) {
          err << "sweep: grid '" << g << "' has an empty value\n";
          return kUsage;
        }
      }
      axes.emplace_back(g.substr(0, eq), std::move(values));
    }

    // Validate every point before running any of them.
    std::vector<std::vector<std::string>> points{{}};
    for (const auto& [key, values] : axes) {
      std::vector<std::vector<std::string>> next;
      for (const auto& p : points) {
        for (const auto& v : values) {
          auto q = p;
          q.push_back(key + "=" + v);
          next.push_back(std::move(q));
        }
      }
      points = std::move(next);
    }
    std::vector<SimConfig> configs;
    for (const auto& p : points) {
      SimConfig c = base;
      for (const auto& a : p) apply_override(c, a);
      c.validate();
      configs.push_back(std::move(c));
    }

    Inputs inputs = load_inputs(base);
    auto session = create_session_dir(args.out, "sweep");
    g_last_session = session;

    json table = json::array();
    std::ostringstream text;
    char line[512];
    std::snprintf(line, sizeof line, "%-32s | %8s %8s %8s | %11s %11s %11s | %12s %12s %12s | %8s %8s %8s %8s\n",
                  "Setting", "Perf avg", "max", "min", "Cost avg", "max", "min", "Makespan avg", "max", "min",
                  "C.hit", "C.perf", "S.hit", "S.perf");
    text << line;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "point-%03zu", i + 1);
      AggregateReport agg = run_into(configs[i], args.config, inputs, session / name);
      std::string label;
      for (const auto& a : points[i]) label += (label.empty() ? "" : " ") + a;
      json row = agg.to_json();
      row["setting"] = label;
      row["dir"] = name;
      table.push_back(row);
      std::snprintf(line, sizeof line,
                    "%-32s | %8.4f %8.4f %8.4f | %11.6f %11.6f %11.6f | %12.1f %12.1f %12.1f | %8.4f %8.4f %8.4f "
                    "%8.4f\n",
                    label.c_str(), agg.perf.mean, agg.perf.max, agg.perf.min, agg.cost_usd.mean, agg.cost_usd.max,
                    agg.cost_usd.min, agg.makespan_ms.mean, agg.makespan_ms.max, agg.makespan_ms.min,
                    agg.cache_hit_rate, agg.cache_perf, agg.scheduler_hit_rate, agg.scheduler_perf);
      text << line;
    }
    json comparison = {{"format", "llmsched.sweep"},
                       {"version", kReportFormatVersion},
                       {"scenario_hash", inputs.fingerprint},
                       {"repetitions", base.repetitions},
                       {"rows", table}};
    write_file_atomic(session / "comparison.json", comparison.dump(2) + "\n");
    write_file_atomic(session / "comparison.txt", text.str());
    out << "session " << session.string() << "\n" << text.str();
    return kOk;
  } catch (const ConfigError& e) {
    print_config_error(e, err);
    return kConfigInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

int cmd_compare(const std::vector<std::filesystem::path>& reports, std::ostream& out, std::ostream& err) {
  if (reports.size() < 2) {
    err << "compare: need a reference report and at least one other\n";
    return kUsage;
  }
  try {
    ReportSummary ref = read_summary(reports[0]);
    std::vector<ReportSummary> others;
    for (std::size_t i = 1; i < reports.size(); ++i) others.push_back(read_summary(reports[i]));
    auto rows = compare(ref, others);
    out << format_comparison(ref, rows);
    return kOk;
  } catch (const InvalidInput& e) {
    err << "compare: " << e.what() << "\n";
    return kIncompatible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

int cmd_synth_workload(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  try {
    Scenario scenario = Scenario::load(args.scenario);
    auto queries = synthesize_workload(scenario);
    write_workload(args.out, queries);
    out << "wrote " << queries.size() << " queries to " << args.out.string() << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    print_config_error(e, err);
    return kConfigInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace llmsched::cli
