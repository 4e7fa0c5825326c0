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

#include "llmsched/mock_provider.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "llmsched/errors.h"
#include "llmsched/hashing.h"

namespace llmsched {

std::string expected_response(const Query& query) {
  uint64_t h = fnv1a64(query.truth_category());
  h = fnv1a64("\x1f", h);
  h = fnv1a64(query.payload(), h);
  return "ans:" + to_hex(h);
}

MockProvider::MockProvider(const Scenario& scenario, std::size_t llm_index, uint64_t run_seed)
    : scenario_(&scenario), index_(llm_index) {
  if (llm_index >= scenario.llms.size()) throw InvalidInput("mock provider: LLM index out of range");
  profile_ = &scenario.llms[llm_index];
  stream_seed_ = combine_seed(run_seed, fnv1a64(profile_->id));
}

CompletedJob MockProvider::execute(const Query& query, int period) const {
  auto p_it = profile_->success_table.find(query.truth_category());
  auto m_it = scenario_->categories.find(query.truth_category());
  if (p_it == profile_->success_table.end() || m_it == scenario_->categories.end()) {
    throw ConfigError("unknown truth_category '" + query.truth_category() + "'");
  }
  std::mt19937_64 rng(combine_seed(stream_seed_, fnv1a64(query.id())));
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  bool success = u < p_it->second;

  const OutputTokenModel& m = m_it->second;
  double mu = std::log(m.mean) - 0.5 * m.sigma * m.sigma;
  double draw = m.sigma > 0.0 ? std::lognormal_distribution<double>(mu, m.sigma)(rng) : m.mean;
  int64_t output_tokens = std::max<int64_t>(1, std::llround(draw));

  CompletedJob job;
  job.query_id = query.id();
  job.target = Target::to_llm(index_);
  job.response = success ? expected_response(query)
                         : "err:" + profile_->id + ":" + to_hex(combine_seed(stream_seed_, fnv1a64(query.payload())));
  job.output_tokens = output_tokens;
  job.actual_cost = invocation_cost(query, *profile_, output_tokens);
  job.actual_latency = profile_->latency(output_tokens);
  job.period = period;
  return job;
}

}  // namespace llmsched
