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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "llmsched/domain.h"

namespace llmsched {

// Log-normal output length for one truth category.
struct OutputTokenModel {
  double mean = 100.0;
  double sigma = 0.4;
};

// Parameters for synthesizing a workload that fits the scenario.
struct WorkloadRecipe {
  std::size_t size = 3000;
  double duplicate_fraction = 0.5;
  std::size_t hot_set = 12;
  std::size_t words_per_query = 10;
  std::size_t vocabulary = 800;
  uint64_t seed = 2024;
  std::map<std::string, double> category_weights;  // empty = uniform
  // Each category's payloads begin with this phrase.
  std::map<std::string, std::string> category_prefix;
};

// Candidate providers plus the ground truth that drives the mock execution.
struct Scenario {
  std::string name;
  std::vector<LLMProfile> llms;
  std::map<std::string, OutputTokenModel> categories;
  std::optional<WorkloadRecipe> recipe;

  // Throws ConfigError: no providers, duplicate ids, a provider missing a
  // category, or a malformed output model.
  void validate() const;
  std::optional<std::size_t> index_of(const std::string& llm_id) const;
  // Throws ConfigError naming the first query whose category is unknown.
  void check_workload(std::span<const Query> queries) const;

  nlohmann::json to_json() const;
  static Scenario from_json(const nlohmann::json& j);
  static Scenario load(const std::filesystem::path& path);
  // FNV-1a of the canonical serialization.
  std::string hash() const;
};

}  // namespace llmsched
