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
#include <list>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "llmsched/embedding.h"

namespace llmsched {

struct ThresholdPolicy {
  double tau_min = 0.7;
  double tau_max = 0.99;
  double tau_step = 0.01;
  // Success rate below low tightens, above high relaxes.
  double low_success_bound = 0.90;
  double high_success_bound = 0.98;
};

struct CacheConfig {
  std::size_t capacity = 10000;
  double tau = 0.9;
  ThresholdPolicy threshold;
  bool adaptive_threshold = true;

  std::size_t cluster_trigger = 500;
  std::size_t recluster_interval = 100;
  // 0 selects ceil(sqrt(size / 2)) clamped to [2, 64]; otherwise a fixed k.
  std::size_t fixed_k = 0;
  std::size_t probe_clusters = 1;
  uint64_t kmeans_seed = 17;
  int kmeans_max_iterations = 50;

  double lookup_latency_ms = 1.0;

  // Throws ConfigError naming every offending field.
  void validate() const;
};

struct CacheStats {
  int64_t lookups = 0;
  int64_t hits = 0;
  int64_t inspected_hits = 0;
  int64_t inspected_correct = 0;

  std::optional<double> success_rate() const {
    if (inspected_hits <= 0) return std::nullopt;
    return static_cast<double>(inspected_correct) / static_cast<double>(inspected_hits);
  }
  double hit_rate() const {
    return lookups > 0 ? static_cast<double>(hits) / static_cast<double>(lookups) : 0.0;
  }
};

// Returns the next threshold given the latest inspection window. Stays inside
// [tau_min, tau_max]; an undefined success rate leaves tau unchanged.
double adapt_threshold(double tau, const CacheStats& stats, const ThresholdPolicy& policy);

struct CacheEntry {
  std::string key;
  Embedding embedding;
  std::string response;
  int64_t hit_count = 0;
  uint64_t last_access = 0;
  std::optional<std::size_t> cluster_id;
};

struct CacheHit {
  std::string key;
  std::string response;
  double similarity = 0.0;
};

// Similarity cache over query embeddings with LRU eviction and optional
// k-means partitioning. Once clustered, lookups only scan the members of the
// `probe_clusters` nearest centroids.
//
// lookup/insert/recluster/adapt take an exclusive lock; peek and the
// read-only accessors share it.
class SemanticCache {
 public:
  explicit SemanticCache(CacheConfig config);

  SemanticCache(const SemanticCache&) = delete;
  SemanticCache& operator=(const SemanticCache&) = delete;

  // Best entry with similarity >= tau. Ties on similarity prefer the most
  // recently accessed entry, then the smaller key. A hit bumps hit_count
  // and last_access; it never touches the stored response.
  std::optional<CacheHit> lookup(const Embedding& query);
  // Same search without touching access metadata or stats.
  std::optional<CacheHit> peek(const Embedding& query) const;

  // Stores (or refreshes) an entry, evicts the LRU entry when over capacity
  // and reclusters when the insertion/size triggers are both met.
  void insert(const std::string& key, const Embedding& embedding, const std::string& response);

  // No-op below cluster_trigger.
  void recluster();

  // Applies adapt_threshold when adaptive_threshold is enabled.
  double adapt(const CacheStats& window);

  double tau() const;
  void set_tau(double tau);
  std::size_t size() const;
  bool clustered() const;
  std::size_t cluster_count() const;
  const CacheConfig& config() const { return config_; }
  std::vector<std::vector<double>> centroids() const;
  // Entries sorted by key.
  std::vector<CacheEntry> entries() const;
  std::optional<CacheEntry> entry(const std::string& key) const;
  CacheStats stats() const;
  void reset_stats();
  std::size_t k_for_size(std::size_t size) const;

  nlohmann::json snapshot() const;
  static std::unique_ptr<SemanticCache> restore(const nlohmann::json& snapshot, CacheConfig config);
  void save(const std::filesystem::path& path) const;
  static std::unique_ptr<SemanticCache> load(const std::filesystem::path& path, CacheConfig config);

 private:
  struct Node {
    CacheEntry entry;
    std::list<std::string>::iterator lru_pos;
  };

  const Node* search(const Embedding& query) const;
  std::vector<std::size_t> probe_order(const Embedding& query) const;
  void touch(Node& node);
  void evict_lru();
  void recluster_locked();
  void attach_to_cluster(Node& node);
  void detach_from_cluster(const Node& node);

  CacheConfig config_;
  double tau_;
  uint64_t tick_ = 0;
  std::size_t insertions_since_recluster_ = 0;
  uint64_t recluster_runs_ = 0;
  std::unordered_map<std::string, Node> nodes_;
  std::list<std::string> lru_;  // front = most recently used
  std::vector<std::vector<double>> centroids_;
  std::vector<std::vector<Node*>> members_;
  CacheStats stats_;
  mutable std::shared_mutex mutex_;
};

}  // namespace llmsched
