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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "llmsched/money.h"

namespace llmsched {

// Simulated time. Never wall clock.
using SimDuration = std::chrono::duration<double, std::milli>;

// One job. Immutable once built; arrival period is fixed at construction.
class Query {
 public:
  Query() = default;
  Query(std::string id, std::string payload, int64_t input_tokens, std::string truth_category,
        int arrival_period = 0);

  const std::string& id() const { return id_; }
  const std::string& payload() const { return payload_; }
  int64_t input_tokens() const { return input_tokens_; }
  const std::string& truth_category() const { return truth_category_; }
  int arrival_period() const { return arrival_period_; }

  // Copy of this query stamped with a different arrival period.
  Query with_period(int period) const;

  friend bool operator==(const Query&, const Query&) = default;

 private:
  std::string id_;
  std::string payload_;
  int64_t input_tokens_ = 0;
  std::string truth_category_;
  int arrival_period_ = 0;
};

struct LatencyModel {
  double base_ms = 0.0;
  double per_output_token_ms = 0.0;

  SimDuration operator()(int64_t output_tokens) const {
    return SimDuration(base_ms + per_output_token_ms * static_cast<double>(output_tokens));
  }
};

// One candidate endpoint. Prices are per token.
struct LLMProfile {
  std::string id;
  Money price_input;
  Money price_output;
  LatencyModel latency;
  // truth_category -> success probability. Simulator ground truth only; the
  // scheduler never reads it.
  std::map<std::string, double> success_table;

  // Throws InvalidInput when prices are negative, probabilities fall outside
  // [0,1] or the latency model is not positive.
  void validate() const;
};

// tn_i * price_input + tn_o * price_output, exact in pico-dollars.
Money invocation_cost(int64_t input_tokens, const LLMProfile& llm, int64_t output_tokens);
Money invocation_cost(const Query& query, const LLMProfile& llm, int64_t output_tokens);

// Where a query went. SKIPPED is admitted only for rules that may decline to
// submit (MIN_COST and custom rules returning -inf).
struct Target {
  enum class Kind { kLlm, kCache, kSkipped };

  Kind kind = Kind::kSkipped;
  std::size_t llm = 0;  // valid when kind == kLlm

  static Target to_llm(std::size_t index) { return {Kind::kLlm, index}; }
  static Target cache() { return {Kind::kCache, 0}; }
  static Target skipped() { return {Kind::kSkipped, 0}; }

  bool is_llm() const { return kind == Kind::kLlm; }
  friend bool operator==(const Target&, const Target&) = default;
};

// "cache", "skipped" or the LLM id.
std::string target_label(const Target& target, const std::vector<LLMProfile>& llms);

struct Assignment {
  std::string query_id;
  Target target;
  double predicted_perf = 0.0;
  double predicted_cost = 0.0;  // USD
};

struct CompletedJob {
  std::string query_id;
  Target target;
  std::string response;
  Money actual_cost;
  SimDuration actual_latency{0.0};
  int64_t output_tokens = 0;
  // Set once the job has been checked against ground truth.
  std::optional<bool> success;
  int period = 0;
};

// All queries that arrived during one scheduling horizon.
struct HorizonBatch {
  int period = 0;
  std::vector<Query> queries;

  // Throws InvalidInput if a member query carries a different arrival period.
  void validate() const;
};

}  // namespace llmsched
