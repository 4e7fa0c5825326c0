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

#include "llmsched/updater.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "llmsched/errors.h"
#include "llmsched/hashing.h"

namespace llmsched {

void UpdateConfig::validate() const {
  std::vector<std::string> errors;
  if (q_interval < 1) errors.push_back("update.q_interval must be >= 1");
  if (!(inspection_rate > 0.0 && inspection_rate <= 1.0)) errors.push_back("update.inspection_rate must lie in (0, 1]");
  if (!(classifier_acc_floor >= 0.0 && classifier_acc_floor <= 1.0)) {
    errors.push_back("update.classifier_acc_floor must lie in [0, 1]");
  }
  if (regressor_mae_ceiling && !(*regressor_mae_ceiling >= 0.0)) {
    errors.push_back("update.regressor_mae_ceiling must be >= 0");
  }
  if (!(mae_ceiling_fraction > 0.0)) errors.push_back("update.mae_ceiling_fraction must be > 0");
  if (max_retrain_rows < 1) errors.push_back("update.max_retrain_rows must be >= 1");
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

bool should_update(int period, const UpdateConfig& config) {
  if (period < 1) throw InvalidInput("should_update: period must be >= 1");
  return period % config.q_interval == 0;
}

std::size_t rate_quota(double rate, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(rate * static_cast<double>(n) - 1e-9));
}

std::size_t label_budget(std::size_t window_jobs, std::size_t llm_count, const UpdateConfig& config) {
  return rate_quota(config.inspection_rate, window_jobs) + llm_count;
}

std::vector<std::size_t> farthest_point_sample(std::span<const std::span<const double>> points, std::size_t quota,
                                               uint64_t seed) {
  const std::size_t n = points.size();
  quota = std::min(quota, n);
  std::vector<std::size_t> picked;
  if (quota == 0) return picked;
  picked.reserve(quota);

  std::mt19937_64 rng(seed);
  std::size_t start = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);

  // min_dist[i]: distance from i to the nearest picked point (or to the start
  // point before the first pick). -1 marks picked points.
  std::vector<double> min_dist(n);
  for (std::size_t i = 0; i < n; ++i) min_dist[i] = squared_distance(points[i], points[start]);
  while (picked.size() < quota) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (min_dist[i] < 0.0) continue;
      if (best == n || min_dist[i] > min_dist[best]) best = i;
    }
    picked.push_back(best);
    if (picked.size() == 1) {
      for (std::size_t i = 0; i < n; ++i) min_dist[i] = std::numeric_limits<double>::infinity();
    }
    min_dist[best] = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (min_dist[i] < 0.0) continue;
      min_dist[i] = std::min(min_dist[i], squared_distance(points[i], points[best]));
    }
  }
  return picked;
}

InspectionBatch sample_for_inspection(std::span<const InspectionCandidate> completed, std::size_t llm_count,
                                      const UpdateConfig& config, uint64_t seed, const LabelOracle& oracle) {
  InspectionBatch batch;
  batch.per_llm_counts.assign(llm_count, 0);

  std::vector<std::vector<std::size_t>> pools(llm_count);
  std::size_t eligible = 0;
  for (std::size_t i = 0; i < completed.size(); ++i) {
    const auto& job = completed[i].job;
    if (!job.target.is_llm()) continue;
    if (job.target.llm >= llm_count) throw InvalidInput("sample_for_inspection: LLM index out of range");
    pools[job.target.llm].push_back(i);
    ++eligible;
  }
  if (eligible == 0) return batch;

  std::size_t represented = 0;
  for (const auto& pool : pools) represented += pool.empty() ? 0 : 1;
  std::size_t target = std::max(represented, rate_quota(config.inspection_rate, eligible));
  target = std::min(target, eligible);

  // Water-fill: one slot per LLM per round, skipping exhausted pools.
  std::vector<std::size_t> quota(llm_count, 0);
  for (std::size_t assigned = 0; assigned < target;) {
    for (std::size_t k = 0; k < llm_count && assigned < target; ++k) {
      if (quota[k] < pools[k].size()) {
        ++quota[k];
        ++assigned;
      }
    }
  }

  for (std::size_t k = 0; k < llm_count; ++k) {
    if (quota[k] == 0) continue;
    std::vector<std::span<const double>> points;
    points.reserve(pools[k].size());
    for (std::size_t idx : pools[k]) points.push_back(completed[idx].embedding.values());
    auto picks = farthest_point_sample(points, quota[k], combine_seed(seed, k));
    for (std::size_t p : picks) {
      InspectionCandidate c = completed[pools[k][p]];
      c.job.success = oracle(c.job);
      ++batch.labels_consumed;
      batch.sampled.push_back(std::move(c));
    }
    batch.per_llm_counts[k] = picks.size();
  }
  return batch;
}

CacheCheck inspect_cache_hits(std::span<const CompletedJob> hits, std::size_t max_checks, uint64_t seed,
                              const LabelOracle& oracle) {
  CacheCheck check;
  std::size_t take = std::min(max_checks, hits.size());
  if (take == 0) return check;
  std::vector<std::size_t> order(hits.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    std::size_t j = std::uniform_int_distribution<std::size_t>(i, order.size() - 1)(rng);
    std::swap(order[i], order[j]);
  }
  for (std::size_t i = 0; i < take; ++i) {
    ++check.inspected;
    if (oracle(hits[order[i]])) ++check.correct;
  }
  return check;
}

void RowBuffer::push(TrainingRow row) {
  if (capacity_ == 0) return;
  if (rows_.size() == capacity_) rows_.pop_front();
  rows_.push_back(std::move(row));
}

TrainingRow make_training_row(const Embedding& embedding, std::size_t llm_index, std::size_t llm_count,
                              bool success, Money cost) {
  TrainingRow row;
  row.features = build_features(embedding, llm_index, llm_count);
  row.success_label = success ? 1 : 0;
  row.cost_label = cost.dollars();
  return row;
}

nlohmann::json UpdateOutcome::to_json() const {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"P", period},
          {"triggered", triggered},
          {"samples", samples},
          {"labels_consumed", labels_consumed},
          {"cache_inserts", cache_inserts},
          {"cache_checks", cache_checks},
          {"accuracy", opt(accuracy)},
          {"mae", opt(mae)},
          {"mae_ceiling", mae_ceiling},
          {"retrained_classifier", retrained_classifier},
          {"retrained_regressor", retrained_regressor},
          {"tau_before", tau_before},
          {"tau_after", tau_after}};
}

UpdateOutcome apply_update(const InspectionBatch& batch, const CacheStats& cache_window, SemanticCache* cache,
                           UpdateState& state, const std::vector<LLMProfile>& llms, const UpdateConfig& config,
                           const ModelConfig& model_config) {
  UpdateOutcome out;
  out.triggered = true;
  out.samples = batch.sampled.size();
  out.labels_consumed = batch.labels_consumed;
  out.cache_checks = static_cast<std::size_t>(cache_window.inspected_hits);
  out.tau_before = cache ? cache->tau() : 0.0;
  out.tau_after = out.tau_before;

  if (!batch.sampled.empty()) {
    std::vector<TrainingRow> rows;
    rows.reserve(batch.sampled.size());
    double cost_sum = 0.0;
    for (const auto& c : batch.sampled) {
      if (!c.job.success) throw InvalidInput("apply_update: sampled job has no resolved label");
      bool ok = *c.job.success;
      if (ok && cache) {
        cache->insert(c.cache_key, c.embedding, c.job.response);
        ++out.cache_inserts;
      }
      rows.push_back(make_training_row(c.embedding, c.job.target.llm, llms.size(), ok, c.job.actual_cost));
      cost_sum += c.job.actual_cost.dollars();
    }
    auto metrics = evaluate(state.bundle, rows);
    out.accuracy = metrics.accuracy;
    out.mae = metrics.mae;
    out.mae_ceiling = config.regressor_mae_ceiling.value_or(config.mae_ceiling_fraction * cost_sum /
                                                            static_cast<double>(rows.size()));
    for (auto& row : rows) state.buffer.push(std::move(row));

    bool retrain_cls = metrics.accuracy < config.classifier_acc_floor;
    bool retrain_reg = metrics.mae > out.mae_ceiling;
    if (retrain_cls || retrain_reg) {
      std::vector<TrainingRow> corpus = state.init_rows;
      corpus.insert(corpus.end(), state.buffer.rows().begin(), state.buffer.rows().end());
      state.bundle = retrain(state.bundle, corpus, model_config, retrain_cls, retrain_reg);
      out.retrained_classifier = retrain_cls;
      out.retrained_regressor = retrain_reg;
    }
  }

  if (cache) out.tau_after = cache->adapt(cache_window);
  return out;
}

}  // namespace llmsched
