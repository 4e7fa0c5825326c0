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
#include <random>
#include <span>
#include <vector>

#include "llmsched/domain.h"
#include "llmsched/scenario.h"

namespace llmsched {

struct ArrivalParams {
  double init_fraction = 0.01;
  // Poisson rate drawn once from [min_fraction * s, max_fraction * s].
  double lambda_min_fraction = 0.1;
  double lambda_max_fraction = 0.2;
};

struct WorkloadPlan {
  std::vector<Query> init;  // period 0
  std::vector<HorizonBatch> periods;  // periods 1..T, possibly empty
  double lambda = 0.0;
};

// First ceil(init_fraction * s) queries form the init set; the rest are cut
// into periods of Poisson(lambda) arrivals in file order, the last period
// taking whatever remains. Throws ConfigError when s < 10.
WorkloadPlan generate_workload(std::span<const Query> dataset, const ArrivalParams& params, uint64_t seed);

// Cuts `queries` into consecutive periods of the given sizes. The sizes must
// sum to the query count.
std::vector<HorizonBatch> partition_periods(std::span<const Query> queries, std::span<const std::size_t> sizes);

// Deterministic synthetic dataset for a scenario's recipe. A duplicate
// fraction of the queries are exact repeats of a small hot set whose first
// occurrences open the stream.
std::vector<Query> synthesize_workload(const Scenario& scenario);

}  // namespace llmsched
