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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "llmsched/domain.h"
#include "llmsched/scenario.h"
#include "llmsched/sim_config.h"
#include "llmsched/workload_generator.h"

namespace llmsched::testing {

std::filesystem::path source_dir();
std::filesystem::path shipped_scenario_dir();

// Fresh empty directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Two providers with deterministic outcomes on category "c" (5 output tokens,
// no spread): "good" always succeeds, "bad" always fails.
//   good: $1e-6 in, $2e-6 out, 100 ms + 10 ms/token
//   bad:  $3e-6 in, $6e-6 out, 200 ms + 20 ms/token
Scenario deterministic_pair();

// Small three-provider scenario with mixed success rates over two categories.
Scenario small_mixed();

// Deterministic queries q000..q{n-1}; payload i % distinct, category alternating
// over the scenario's categories.
std::vector<Query> make_queries(const Scenario& scenario, std::size_t n, std::size_t distinct);

SimConfig fast_config();

// Hand-checkable run over deterministic_pair(): init {q0}, period 1 {q1,q2,q3},
// period 2 {q4,q5}. q1 and q4 repeat q0's payload; the rest are distinct.
// Input tokens: q0 10, q1 10, q2 20, q3 30, q4 10, q5 40.
WorkloadPlan metric_fixture_plan();
// fast_config() with the given method, 256-dim embedder and updates off.
SimConfig metric_fixture_config(Method method);

struct Shipped {
  SimConfig config;
  Scenario scenario;
  std::vector<Query> dataset;
};
Shipped load_shipped();

}  // namespace llmsched::testing
