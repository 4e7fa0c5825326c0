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
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "llmsched/domain.h"
#include "llmsched/embedding.h"
#include "llmsched/predictor.h"
#include "llmsched/semantic_cache.h"

namespace llmsched {

struct UpdateConfig {
  int q_interval = 1;
  double inspection_rate = 0.01;
  double classifier_acc_floor = 0.85;
  // USD. Unset means mae_ceiling_fraction of the batch's mean observed cost.
  std::optional<double> regressor_mae_ceiling;
  double mae_ceiling_fraction = 0.25;
  std::size_t max_retrain_rows = 5000;
  std::size_t max_cache_checks = 10;

  void validate() const;
};

// Throws InvalidInput for period < 1.
bool should_update(int period, const UpdateConfig& config);

// Ground-truth check for one completed job. Every call consumes one label.
using LabelOracle = std::function<bool(const CompletedJob&)>;

// A completed job plus what the updater needs to learn from it.
struct InspectionCandidate {
  CompletedJob job;
  Embedding embedding;
  std::string cache_key;
  int64_t input_tokens = 0;
};

struct InspectionBatch {
  std::vector<InspectionCandidate> sampled;  // job.success resolved
  std::vector<std::size_t> per_llm_counts;   // indexed by LLM
  std::size_t labels_consumed = 0;
};

// Balanced, diversity-seeking sample of LLM-served jobs. The target size is
// max(#LLMs present, ceil(rate * eligible)), split as evenly as the pools
// allow; each pool is sampled by farthest-point traversal.
InspectionBatch sample_for_inspection(std::span<const InspectionCandidate> completed, std::size_t llm_count,
                                      const UpdateConfig& config, uint64_t seed, const LabelOracle& oracle);

// ceil(rate * jobs) + llm_count: the most labels one update may consume.
std::size_t label_budget(std::size_t window_jobs, std::size_t llm_count, const UpdateConfig& config);

// ceil(rate * n), ignoring floating-point noise below 1e-9.
std::size_t rate_quota(double rate, std::size_t n);

struct CacheCheck {
  std::size_t inspected = 0;
  std::size_t correct = 0;
};

// Label-checks a seeded sample of at most `max_checks` cache-served jobs.
CacheCheck inspect_cache_hits(std::span<const CompletedJob> hits, std::size_t max_checks, uint64_t seed,
                              const LabelOracle& oracle);

// Indices picked by farthest-point traversal. A seeded random point only
// locates the first pick (the point farthest from it); later picks maximize
// the minimum distance to those already chosen. Ties go to the lower index.
std::vector<std::size_t> farthest_point_sample(std::span<const std::span<const double>> points, std::size_t quota,
                                               uint64_t seed);

// FIFO buffer of inspected rows.
class RowBuffer {
 public:
  explicit RowBuffer(std::size_t capacity) : capacity_(capacity) {}
  void push(TrainingRow row);
  std::size_t size() const { return rows_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<TrainingRow>& rows() const { return rows_; }

 private:
  std::size_t capacity_;
  std::deque<TrainingRow> rows_;
};

struct UpdateOutcome {
  int period = 0;
  bool triggered = false;
  std::size_t samples = 0;
  std::size_t labels_consumed = 0;
  std::size_t cache_inserts = 0;
  std::size_t cache_checks = 0;
  std::optional<double> accuracy;
  std::optional<double> mae;
  double mae_ceiling = 0.0;
  bool retrained_classifier = false;
  bool retrained_regressor = false;
  double tau_before = 0.0;
  double tau_after = 0.0;

  nlohmann::json to_json() const;
};

// Mutable learning state threaded through update phases.
struct UpdateState {
  ModelBundle bundle;
  std::vector<TrainingRow> init_rows;
  RowBuffer buffer{5000};
};

// Promotes correct jobs into the cache, buffers every sampled row, retrains
// the models whose batch metrics breach their limits and adapts tau from
// `cache_window`. An empty batch changes nothing except tau adaptation.
UpdateOutcome apply_update(const InspectionBatch& batch, const CacheStats& cache_window, SemanticCache* cache,
                           UpdateState& state, const std::vector<LLMProfile>& llms, const UpdateConfig& config,
                           const ModelConfig& model_config);

TrainingRow make_training_row(const Embedding& embedding, std::size_t llm_index, std::size_t llm_count,
                              bool success, Money cost);

}  // namespace llmsched
