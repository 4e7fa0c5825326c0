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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "llmsched/errors.h"
#include "llmsched/scheduler.h"

namespace llmsched {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

SchedulingRule rule_of(SchedulingRule::Kind kind, double w = 1.0) {
  SchedulingRule r;
  r.kind = kind;
  r.ratio_weight = w;
  return r;
}

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("q" + std::to_string(i));
  return out;
}

TEST(Score, RuleDefinitions) {
  PredictionPair p{0.8, 0.002};
  EXPECT_DOUBLE_EQ(score(rule_of(SchedulingRule::Kind::kRatio), p), 400.0);
  EXPECT_DOUBLE_EQ(score(rule_of(SchedulingRule::Kind::kRatio, 0.5), p), 0.8 / std::sqrt(0.002));
  EXPECT_DOUBLE_EQ(score(rule_of(SchedulingRule::Kind::kMaxPerf), p), 0.8);
  EXPECT_DOUBLE_EQ(score(rule_of(SchedulingRule::Kind::kMinCost), p), -0.002);
  EXPECT_EQ(score(rule_of(SchedulingRule::Kind::kMinCost), PredictionPair{0.5, 0.001}), kNegInf);
}

TEST(Score, RejectsNonPositiveCostAndNaNCustom) {
  EXPECT_THROW(score(rule_of(SchedulingRule::Kind::kRatio), PredictionPair{0.5, 0.0}), InvalidInput);
  SchedulingRule custom = rule_of(SchedulingRule::Kind::kCustom);
  custom.custom = [](const PredictionPair&) { return std::nan(""); };
  EXPECT_THROW(score(custom, PredictionPair{0.5, 1.0}), InvalidInput);
}

TEST(Allocate, TiesPreferLowerCostThenLowerIndex) {
  std::vector<std::vector<PredictionPair>> preds{
      {{0.9, 0.3}, {0.9, 0.2}, {0.9, 0.2}},
  };
  auto plan = allocate(ids(1), preds, rule_of(SchedulingRule::Kind::kMaxPerf));
  EXPECT_EQ(plan.assignments[0].target, Target::to_llm(1));
}

TEST(Allocate, MinCostSkipsWhenNothingFeasible) {
  std::vector<std::vector<PredictionPair>> preds{
      {{0.4, 0.1}, {0.5, 0.05}},
      {{0.7, 0.3}, {0.6, 0.2}},
  };
  auto plan = allocate(ids(2), preds, rule_of(SchedulingRule::Kind::kMinCost));
  EXPECT_EQ(plan.assignments[0].target, Target::skipped());
  EXPECT_EQ(plan.assignments[1].target, Target::to_llm(1));
  EXPECT_EQ(plan.objective.skipped, 1u);
  EXPECT_DOUBLE_EQ(plan.objective.predicted_total_cost, 0.2);
  EXPECT_DOUBLE_EQ(plan.objective.predicted_mean_perf, 0.3);
}

TEST(Allocate, CustomNegativeInfinityMeansDoNotSubmit) {
  SchedulingRule r = rule_of(SchedulingRule::Kind::kCustom);
  r.custom = [](const PredictionPair& p) { return p.perf > 0.9 ? p.perf : kNegInf; };
  std::vector<std::vector<PredictionPair>> preds{{{0.5, 1}, {0.6, 1}}, {{0.95, 1}, {0.5, 1}}};
  auto plan = allocate(ids(2), preds, r);
  EXPECT_EQ(plan.assignments[0].target, Target::skipped());
  EXPECT_EQ(plan.assignments[1].target, Target::to_llm(0));
}

TEST(Allocate, ShapeErrors) {
  std::vector<std::vector<PredictionPair>> preds{{}};
  EXPECT_THROW(allocate(ids(1), preds, SchedulingRule{}), InvalidInput);
  EXPECT_THROW(allocate(ids(2), preds, SchedulingRule{}), InvalidInput);
  ModelBundle untrained;
  std::vector<Query> qs;
  std::vector<Embedding> es;
  EXPECT_THROW(allocate(qs, es, untrained, {}, SchedulingRule{}), StateError);
}

TEST(Allocate, EmptyHorizonIsEmptyPlan) {
  std::vector<std::vector<PredictionPair>> none;
  auto plan = allocate(ids(0), none, SchedulingRule{});
  EXPECT_TRUE(plan.assignments.empty());
  EXPECT_EQ(plan.objective.predicted_mean_perf, 0.0);
}

TEST(SchedulingRule, ValidateAndParse) {
  SchedulingRule r;
  r.ratio_weight = 0;
  r.feasibility_cutoff = 1.0;
  EXPECT_THROW(r.validate(), ConfigError);
  EXPECT_EQ(parse_rule_kind("MIN_COST"), SchedulingRule::Kind::kMinCost);
  EXPECT_EQ(rule_kind_name(SchedulingRule::Kind::kMaxPerf), "MAX_PERF");
  EXPECT_THROW(parse_rule_kind("ratio"), InvalidInput);
}

// Exhaustive m^n enumeration: fewest infeasible queries, then the highest
// score sum, then the lowest cost sum, then the lexicographically smallest
// index vector.
std::vector<int> brute_force(const std::vector<std::vector<PredictionPair>>& preds, const SchedulingRule& rule) {
  const std::size_t n = preds.size(), m = preds[0].size();
  std::vector<int> cur(n, 0), best;
  std::size_t best_inf = 0;
  double best_sum = 0, best_cost = 0;
  for (;;) {
    std::size_t inf = 0;
    double sum = 0, cost = 0;
    for (std::size_t q = 0; q < n; ++q) {
      double s = score(rule, preds[q][cur[q]]);
      if (s == kNegInf) {
        ++inf;
      } else {
        sum += s;
        cost += preds[q][cur[q]].cost;
      }
    }
    bool better = best.empty() || inf < best_inf ||
                  (inf == best_inf && (sum > best_sum || (sum == best_sum && cost < best_cost)));
    if (better) {
      best = cur;
      best_inf = inf;
      best_sum = sum;
      best_cost = cost;
    }
    std::size_t pos = 0;
    while (pos < n && ++cur[pos] == static_cast<int>(m)) cur[pos++] = 0;
    if (pos == n) break;
  }
  for (std::size_t q = 0; q < n; ++q) {
    bool all_inf = true;
    for (const auto& p : preds[q]) all_inf = all_inf && score(rule, p) == kNegInf;
    if (all_inf) best[q] = -1;
  }
  return best;
}

TEST(Allocate, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0, 1);
  int mismatches = 0;
  for (int inst = 0; inst < 300; ++inst) {
    std::size_t n = 1 + rng() % 5, m = 1 + rng() % 4;
    std::vector<std::vector<PredictionPair>> preds(n, std::vector<PredictionPair>(m));
    for (auto& row : preds) {
      for (auto& p : row) p = {u(rng), 1e-5 + u(rng) * 1e-3};
    }
    for (auto kind : {SchedulingRule::Kind::kRatio, SchedulingRule::Kind::kMaxPerf, SchedulingRule::Kind::kMinCost}) {
      auto rule = rule_of(kind, inst % 3 == 0 ? 0.5 : 1.0);
      auto want = brute_force(preds, rule);
      auto plan = allocate(ids(n), preds, rule);
      for (std::size_t q = 0; q < n; ++q) {
        const Target& t = plan.assignments[q].target;
        int got = t.is_llm() ? static_cast<int>(t.llm) : -1;
        mismatches += got != want[q];
      }
    }
  }
  EXPECT_EQ(mismatches, 0);
}

}  // namespace
}  // namespace llmsched
