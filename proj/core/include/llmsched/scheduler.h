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

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "llmsched/domain.h"
#include "llmsched/embedding.h"
#include "llmsched/predictor.h"

namespace llmsched {

struct SchedulingRule {
  enum class Kind { kRatio, kMaxPerf, kMinCost, kCustom };

  Kind kind = Kind::kRatio;
  double ratio_weight = 1.0;        // RATIO: perf / cost^w
  double feasibility_cutoff = 0.5;  // MIN_COST: perf must exceed this
  // CUSTOM: -inf means "do not submit".
  std::function<double(const PredictionPair&)> custom;

  void validate() const;
};

std::string rule_kind_name(SchedulingRule::Kind kind);
// Accepts RATIO, MAX_PERF, MIN_COST, CUSTOM. Throws InvalidInput otherwise.
SchedulingRule::Kind parse_rule_kind(std::string_view name);

// Throws InvalidInput when pair.cost <= 0 or a custom rule returns NaN.
double score(const SchedulingRule& rule, const PredictionPair& pair);

struct ObjectiveSnapshot {
  double predicted_total_cost = 0.0;  // USD
  // Mean over every query in the plan; SKIPPED contributes 0.
  double predicted_mean_perf = 0.0;
  std::size_t scheduled = 0;
  std::size_t skipped = 0;
};

struct HorizonPlan {
  std::vector<Assignment> assignments;
  ObjectiveSnapshot objective;
};

// Per-query argmax over a prediction matrix (predictions[q][k]). Ties on
// score prefer lower predicted cost, then lower LLM index; a best score of
// -inf yields SKIPPED.
HorizonPlan allocate(std::span<const std::string> query_ids,
                     const std::vector<std::vector<PredictionPair>>& predictions, const SchedulingRule& rule);

// Predicts every (query, LLM) pair with the bundle and allocates.
// `embeddings` is parallel to `queries`.
HorizonPlan allocate(std::span<const Query> queries, std::span<const Embedding> embeddings,
                     const ModelBundle& bundle, const std::vector<LLMProfile>& llms, const SchedulingRule& rule);

}  // namespace llmsched
