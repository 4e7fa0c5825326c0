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
#include <string>

#include "llmsched/domain.h"
#include "llmsched/scenario.h"

namespace llmsched {

// The one correct response for a query. Any other response is a failure.
std::string expected_response(const Query& query);

// Seeded stand-in for a provider API. Every outcome is a pure function of
// (run seed, provider id, query id), so all methods in a run see the same
// draws for the same query.
class MockProvider {
 public:
  MockProvider(const Scenario& scenario, std::size_t llm_index, uint64_t run_seed);

  const LLMProfile& profile() const { return *profile_; }
  std::size_t index() const { return index_; }

  // Success ~ Bernoulli(success_table[category]); output tokens are
  // log-normal with the category's mean and sigma, at least 1.
  CompletedJob execute(const Query& query, int period) const;

 private:
  const Scenario* scenario_;
  const LLMProfile* profile_;
  std::size_t index_;
  uint64_t stream_seed_;
};

}  // namespace llmsched
