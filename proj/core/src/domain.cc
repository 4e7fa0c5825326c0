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

#include "llmsched/domain.h"

#include <cmath>

#include "llmsched/errors.h"
#include "llmsched/hashing.h"

namespace llmsched {

Query::Query(std::string id, std::string payload, int64_t input_tokens, std::string truth_category,
             int arrival_period)
    : id_(std::move(id)),
      payload_(std::move(payload)),
      input_tokens_(input_tokens),
      truth_category_(std::move(truth_category)),
      arrival_period_(arrival_period) {
  if (input_tokens_ < 0) {
    throw InvalidInput("query '" + id_ + "': input_tokens must be non-negative");
  }
  if (arrival_period_ < 0) {
    throw InvalidInput("query '" + id_ + "': arrival_period must be non-negative");
  }
}

Query Query::with_period(int period) const {
  return Query(id_, payload_, input_tokens_, truth_category_, period);
}

void LLMProfile::validate() const {
  if (id.empty()) throw InvalidInput("llm profile: empty id");
  if (price_input < Money{} || price_output < Money{}) {
    throw InvalidInput("llm '" + id + "': prices must be non-negative");
  }
  if (!(latency.base_ms >= 0.0) || !(latency.per_output_token_ms >= 0.0) ||
      latency.base_ms + latency.per_output_token_ms <= 0.0) {
    throw InvalidInput("llm '" + id + "': latency model must be positive");
  }
  for (const auto& [category, p] : success_table) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidInput("llm '" + id + "': success probability for '" + category +
                         "' outside [0,1]");
    }
  }
}

Money invocation_cost(int64_t input_tokens, const LLMProfile& llm, int64_t output_tokens) {
  if (input_tokens < 0 || output_tokens < 0) {
    throw InvalidInput("invocation_cost: token counts must be non-negative");
  }
  return llm.price_input * input_tokens + llm.price_output * output_tokens;
}

Money invocation_cost(const Query& query, const LLMProfile& llm, int64_t output_tokens) {
  return invocation_cost(query.input_tokens(), llm, output_tokens);
}

std::string target_label(const Target& target, const std::vector<LLMProfile>& llms) {
  switch (target.kind) {
    case Target::Kind::kCache:
      return "cache";
    case Target::Kind::kSkipped:
      return "skipped";
    case Target::Kind::kLlm:
      return target.llm < llms.size() ? llms[target.llm].id : "llm#" + std::to_string(target.llm);
  }
  return "unknown";
}

void HorizonBatch::validate() const {
  for (const auto& q : queries) {
    if (q.arrival_period() != period) {
      throw InvalidInput("horizon batch " + std::to_string(period) + ": query '" + q.id() +
                         "' arrived in period " + std::to_string(q.arrival_period()));
    }
  }
}

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& d : diagnostics) msg += "\n  " + d;
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

std::string to_hex(uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xf];
    value >>= 4;
  }
  return out;
}

}  // namespace llmsched
