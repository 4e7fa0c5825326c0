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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "llmsched/domain.h"
#include "llmsched/embedding.h"
#include "llmsched/scenario.h"
#include "llmsched/scheduler.h"
#include "llmsched/sim_config.h"
#include "llmsched/updater.h"
#include "llmsched/workload_generator.h"

namespace llmsched {

struct PeriodMetrics {
  int period = 0;
  std::size_t queries = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_correct = 0;
  std::size_t llm_jobs = 0;
  std::size_t llm_correct = 0;
  std::size_t skipped = 0;
  Money cost;
  double perf = 0.0;          // correct / queries; 0 for an empty period
  double makespan_ms = 0.0;   // max over serving LLMs of (llm time + cache time)
  double cache_time_ms = 0.0;
  std::vector<double> llm_time_ms;  // indexed by LLM
  double cache_hit_rate = 0.0;
  double cache_perf = 0.0;
  double scheduler_hit_rate = 0.0;
  double scheduler_perf = 0.0;
  ObjectiveSnapshot plan;
  // State at the end of the period, after any update.
  double tau = 0.0;
  std::string bundle_digest;

  nlohmann::json to_json() const;
};

// One job in the run log. `correct` is ground truth for metrics; `inspected`
// marks jobs whose label the updater consumed.
struct JobRecord {
  CompletedJob job;
  bool correct = false;
  bool inspected = false;
};

struct RunReport {
  uint64_t seed = 0;
  std::string method;
  nlohmann::json config;
  std::string scenario_hash;
  double lambda = 0.0;
  std::size_t init_queries = 0;
  Money init_cost;
  double init_time_ms = 0.0;
  std::vector<PeriodMetrics> periods;
  std::vector<JobRecord> jobs;
  std::vector<UpdateOutcome> events;
  // Totals: cost includes init cost and makespan includes init time for
  // methods that use the init set.
  Money total_cost;
  double total_perf = 0.0;
  double total_makespan_ms = 0.0;
  std::size_t total_jobs = 0;
  std::size_t total_correct = 0;
};

// Hash that identifies comparable runs: scenario plus workload content.
std::string scenario_fingerprint(const Scenario& scenario, std::span<const Query> dataset);

// Runs init and every period of `plan`. `embedder` may be null, in which
// case one is built from the config.
RunReport run_plan(const SimConfig& config, const Scenario& scenario, const WorkloadPlan& plan, uint64_t seed,
                   const std::string& fingerprint, const Embedder* embedder = nullptr);

// Generates the arrival plan from `seed` and runs it.
RunReport run_once(const SimConfig& config, const Scenario& scenario, std::span<const Query> dataset, uint64_t seed,
                   const Embedder* embedder = nullptr);

// config.repetitions runs with seeds seed, seed+1, ...
std::vector<RunReport> run_repetitions(const SimConfig& config, const Scenario& scenario,
                                       std::span<const Query> dataset, const Embedder* embedder = nullptr);

struct MetricSummary {
  double mean = 0.0;
  double max = 0.0;
  double min = 0.0;
};

MetricSummary summarize(std::span<const double> values);

struct AggregateReport {
  std::string method;
  std::size_t repetitions = 0;
  MetricSummary perf;
  MetricSummary cost_usd;
  MetricSummary makespan_ms;
  // Per-run averages over periods, then averaged over runs.
  double cache_hit_rate = 0.0;
  double cache_perf = 0.0;
  double scheduler_hit_rate = 0.0;
  double scheduler_perf = 0.0;

  nlohmann::json to_json() const;
};

AggregateReport aggregate(std::span<const RunReport> runs);

}  // namespace llmsched
