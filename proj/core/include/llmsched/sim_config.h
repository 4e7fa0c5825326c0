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
#include <string_view>

#include "json.hpp"
#include "llmsched/embedding.h"
#include "llmsched/predictor.h"
#include "llmsched/scheduler.h"
#include "llmsched/semantic_cache.h"
#include "llmsched/updater.h"
#include "llmsched/workload_generator.h"

namespace llmsched {

struct Method {
  enum class Kind { kSls, kFifo, kRandom, kSingle, kStaticOnce };
  Kind kind = Kind::kSls;
  std::string llm;  // kSingle only

  // SLS, FIFO, RANDOM, STATIC_ONCE or SINGLE(<llm id>).
  std::string name() const;
  static Method parse(std::string_view text);
  // Methods that pay for the init set and train the predictor.
  bool uses_init() const { return kind == Kind::kSls || kind == Kind::kStaticOnce; }
  friend bool operator==(const Method&, const Method&) = default;
};

struct Ablations {
  bool no_cache = false;
  bool no_scheduler = false;
  bool no_updater = false;
};

struct SimConfig {
  uint64_t seed = 42;
  std::filesystem::path scenario;
  std::filesystem::path workload;
  ArrivalParams arrivals;
  int repetitions = 30;
  Method method;
  Ablations ablations;
  // Correct init responses enter the cache before period 1.
  bool seed_cache_from_init = true;
  EmbedderConfig embedder;
  CacheConfig cache;
  SchedulingRule rule;
  UpdateConfig update;
  ModelConfig model;

  // Throws ConfigError with one diagnostic per offending field.
  void validate() const;

  // Full resolved configuration; paths are absolute.
  nlohmann::json to_json() const;
  // Unknown or mistyped fields raise ConfigError. Relative paths resolve
  // against `base_dir`. Missing fields keep their defaults.
  static SimConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  // Accepts a config file or a run manifest (its resolved_config).
  static SimConfig load(const std::filesystem::path& path);
};

// Expands sweep shorthands (tau, Q, w) to full dotted keys.
std::string canonical_key(std::string_view key);

// KEY=VALUE with a dotted key. VALUE parses as JSON when it can, otherwise
// as a string. Throws ConfigError on unknown keys or invalid results.
void apply_override(SimConfig& config, std::string_view assignment);

}  // namespace llmsched
