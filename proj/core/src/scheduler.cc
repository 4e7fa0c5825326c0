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

#include "llmsched/scheduler.h"

#include <cmath>
#include <limits>

#include "llmsched/errors.h"

namespace llmsched {

void SchedulingRule::validate() const {
  std::vector<std::string> errors;
  if (!(ratio_weight > 0.0) || !std::isfinite(ratio_weight)) errors.push_back("rule.ratio_weight must be > 0");
  if (!(feasibility_cutoff > 0.0 && feasibility_cutoff < 1.0)) {
    errors.push_back("rule.feasibility_cutoff must lie in (0, 1)");
  }
  if (kind == Kind::kCustom && !custom) errors.push_back("rule.kind CUSTOM requires a scoring function");
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

std::string rule_kind_name(SchedulingRule::Kind kind) {
  switch (kind) {
    case SchedulingRule::Kind::kRatio: return "RATIO";
    case SchedulingRule::Kind::kMaxPerf: return "MAX_PERF";
    case SchedulingRule::Kind::kMinCost: return "MIN_COST";
    case SchedulingRule::Kind::kCustom: return "CUSTOM";
  }
  return "RATIO";
}

SchedulingRule::Kind parse_rule_kind(std::string_view name) {
  if (name == "RATIO") return SchedulingRule::Kind::kRatio;
  if (name == "MAX_PERF") return SchedulingRule::Kind::kMaxPerf;
  if (name == "MIN_COST") return SchedulingRule::Kind::kMinCost;
  if (name == "CUSTOM") return SchedulingRule::Kind::kCustom;
  throw InvalidInput("unknown scheduling rule '" + std::string(name) + "'");
}

double score(const SchedulingRule& rule, const PredictionPair& pair) {
  if (!(pair.cost > 0.0)) throw InvalidInput("score: predicted cost must be positive");
  constexpr double kInfeasible = -std::numeric_limits<double>::infinity();
  switch (rule.kind) {
    case SchedulingRule::Kind::kRatio:
      return rule.ratio_weight == 1.0 ? pair.perf / pair.cost : pair.perf / std::pow(pair.cost, rule.ratio_weight);
    case SchedulingRule::Kind::kMaxPerf:
      return pair.perf;
    case SchedulingRule::Kind::kMinCost:
      return pair.perf > rule.feasibility_cutoff ? -pair.cost : kInfeasible;
    case SchedulingRule::Kind::kCustom: {
      if (!rule.custom) throw InvalidInput("score: custom rule has no scoring function");
      double s = rule.custom(pair);
      if (std::isnan(s)) throw InvalidInput("score: custom rule returned NaN");
      return s;
    }
  }
  return kInfeasible;
}

HorizonPlan allocate(std::span<const std::string> query_ids,
                     const std::vector<std::vector<PredictionPair>>& predictions, const SchedulingRule& rule) {
  if (query_ids.size() != predictions.size()) throw InvalidInput("allocate: ids and predictions differ in length");
  HorizonPlan plan;
  plan.assignments.reserve(query_ids.size());
  for (std::size_t q = 0; q < query_ids.size(); ++q) {
    const auto& row = predictions[q];
    if (row.empty()) throw InvalidInput("allocate: no candidate LLMs");
    std::size_t best = 0;
    double best_score = score(rule, row[0]);
    for (std::size_t k = 1; k < row.size(); ++k) {
      double s = score(rule, row[k]);
      if (s > best_score || (s == best_score && row[k].cost < row[best].cost)) {
        best = k;
        best_score = s;
      }
    }
    Assignment a;
    a.query_id = query_ids[q];
    if (best_score == -std::numeric_limits<double>::infinity()) {
      a.target = Target::skipped();
      ++plan.objective.skipped;
    } else {
      a.target = Target::to_llm(best);
      a.predicted_perf = row[best].perf;
      a.predicted_cost = row[best].cost;
      plan.objective.predicted_total_cost += a.predicted_cost;
      plan.objective.predicted_mean_perf += a.predicted_perf;
    }
    plan.assignments.push_back(std::move(a));
  }
  plan.objective.scheduled = query_ids.size();
  if (!query_ids.empty()) plan.objective.predicted_mean_perf /= static_cast<double>(query_ids.size());
  return plan;
}

HorizonPlan allocate(std::span<const Query> queries, std::span<const Embedding> embeddings,
                     const ModelBundle& bundle, const std::vector<LLMProfile>& llms, const SchedulingRule& rule) {
  if (!bundle.trained()) throw StateError("allocate: model bundle is not trained");
  if (llms.empty()) throw InvalidInput("allocate: no candidate LLMs");
  if (queries.size() != embeddings.size()) throw InvalidInput("allocate: queries and embeddings differ in length");
  std::vector<std::string> ids;
  std::vector<std::vector<PredictionPair>> predictions(queries.size());
  ids.reserve(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    ids.push_back(queries[q].id());
    predictions[q].reserve(llms.size());
    for (std::size_t k = 0; k < llms.size(); ++k) {
      predictions[q].push_back(bundle.predict(embeddings[q], k, queries[q].input_tokens(), llms[k]));
    }
  }
  return allocate(ids, predictions, rule);
}

}  // namespace llmsched
