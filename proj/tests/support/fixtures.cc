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

#include "fixtures.h"

#include <atomic>
#include <random>

#include "llmsched/workload_io.h"

namespace llmsched::testing {

namespace fs = std::filesystem;

fs::path source_dir() { return LLMSCHED_SOURCE_DIR; }
fs::path shipped_scenario_dir() { return source_dir() / "scenarios" / "duplicate_heavy"; }

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("llmsched-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Scenario deterministic_pair() {
  Scenario s;
  s.name = "deterministic_pair";
  s.categories["c"] = OutputTokenModel{5.0, 0.0};
  LLMProfile good{"good", Money::from_dollars(1e-6), Money::from_dollars(2e-6), {100.0, 10.0}, {{"c", 1.0}}};
  LLMProfile bad{"bad", Money::from_dollars(3e-6), Money::from_dollars(6e-6), {200.0, 20.0}, {{"c", 0.0}}};
  s.llms = {good, bad};
  return s;
}

Scenario small_mixed() {
  Scenario s;
  s.name = "small_mixed";
  s.categories["easy"] = OutputTokenModel{30.0, 0.3};
  s.categories["hard"] = OutputTokenModel{120.0, 0.4};
  s.llms = {
      {"big", Money::from_dollars(4e-6), Money::from_dollars(1.2e-5), {500.0, 20.0}, {{"easy", 0.97}, {"hard", 0.9}}},
      {"small", Money::from_dollars(1e-6), Money::from_dollars(3e-6), {200.0, 5.0}, {{"easy", 0.9}, {"hard", 0.1}}},
      {"mid", Money::from_dollars(2e-6), Money::from_dollars(6e-6), {300.0, 10.0}, {{"easy", 0.8}, {"hard", 0.7}}},
  };
  return s;
}

std::vector<Query> make_queries(const Scenario& scenario, std::size_t n, std::size_t distinct) {
  std::vector<std::string> cats;
  for (const auto& [name, model] : scenario.categories) cats.push_back(name);
  std::vector<Query> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t p = i % distinct;
    const std::string& cat = cats[p % cats.size()];
    char id[24];
    std::snprintf(id, sizeof id, "q%03zu", i);
    std::string payload = cat + " task number " + std::to_string(p) + " word" + std::to_string(p * 7 % 13);
    out.emplace_back(id, payload, 8 + static_cast<int64_t>(p % 5), cat);
  }
  return out;
}

SimConfig fast_config() {
  SimConfig c;
  c.seed = 5;
  c.repetitions = 1;
  c.scenario = "inline-scenario.json";
  c.workload = "inline-workload.jsonl";
  c.embedder.dimension = 64;
  c.model.gbdt.n_trees = 20;
  c.model.gbdt.max_depth = 3;
  c.arrivals.init_fraction = 0.05;
  return c;
}

WorkloadPlan metric_fixture_plan() {
  WorkloadPlan plan;
  plan.init = {Query("q0", "alpha beta", 10, "c", 0)};
  plan.periods = {
      HorizonBatch{1, {Query("q1", "alpha beta", 10, "c", 1), Query("q2", "gamma delta", 20, "c", 1),
                       Query("q3", "epsilon zeta", 30, "c", 1)}},
      HorizonBatch{2, {Query("q4", "alpha beta", 10, "c", 2), Query("q5", "eta theta", 40, "c", 2)}},
  };
  plan.lambda = 2.5;
  return plan;
}

SimConfig metric_fixture_config(Method method) {
  SimConfig c = fast_config();
  c.method = std::move(method);
  c.embedder.dimension = 256;
  c.ablations.no_updater = true;
  return c;
}

Shipped load_shipped() {
  Shipped s;
  s.config = SimConfig::load(shipped_scenario_dir() / "config.json");
  s.scenario = Scenario::load(s.config.scenario);
  s.dataset = read_workload(s.config.workload);
  return s;
}

}  // namespace llmsched::testing
