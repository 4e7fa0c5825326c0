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

#include "llmsched/semantic_cache.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "llmsched/errors.h"
#include "llmsched/hashing.h"
#include "llmsched/kmeans.h"

namespace llmsched {

using nlohmann::json;

namespace {

// Keeps repeated +/- steps from drifting off the decimal grid.
double snap(double tau) { return std::round(tau * 1e9) / 1e9; }

}  // namespace

void CacheConfig::validate() const {
  std::vector<std::string> errors;
  if (capacity < 1) errors.push_back("cache.capacity must be >= 1");
  if (!(tau > 0.0 && tau <= 1.0)) errors.push_back("cache.tau must lie in (0, 1]");
  if (threshold.tau_min > threshold.tau_max) {
    errors.push_back("cache.tau_min (" + std::to_string(threshold.tau_min) +
                     ") must be <= cache.tau_max (" + std::to_string(threshold.tau_max) + ")");
  } else if (tau < threshold.tau_min || tau > threshold.tau_max) {
    errors.push_back("cache.tau must lie within [cache.tau_min, cache.tau_max]");
  }
  if (!(threshold.tau_step > 0.0)) errors.push_back("cache.tau_step must be positive");
  if (threshold.low_success_bound > threshold.high_success_bound) {
    errors.push_back("cache.low_success_bound must be <= cache.high_success_bound");
  }
  if (cluster_trigger < 2) errors.push_back("cache.cluster_trigger must be >= 2");
  if (recluster_interval < 1) errors.push_back("cache.recluster_interval must be >= 1");
  if (probe_clusters < 1) errors.push_back("cache.probe_clusters must be >= 1");
  if (kmeans_max_iterations < 1) errors.push_back("cache.kmeans_max_iterations must be >= 1");
  if (!(lookup_latency_ms >= 0.0)) errors.push_back("cache.lookup_latency_ms must be >= 0");
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

double adapt_threshold(double tau, const CacheStats& stats, const ThresholdPolicy& policy) {
  auto rate = stats.success_rate();
  if (!rate) return tau;
  if (*rate < policy.low_success_bound) return snap(std::min(tau + policy.tau_step, policy.tau_max));
  if (*rate > policy.high_success_bound) return snap(std::max(tau - policy.tau_step, policy.tau_min));
  return tau;
}

SemanticCache::SemanticCache(CacheConfig config) : config_(std::move(config)), tau_(config_.tau) {
  config_.validate();
}

std::size_t SemanticCache::k_for_size(std::size_t size) const {
  std::size_t k = config_.fixed_k;
  if (k == 0) {
    k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(size) / 2.0)));
    k = std::clamp<std::size_t>(k, 2, 64);
  }
  return std::min(k, size);
}

std::vector<std::size_t> SemanticCache::probe_order(const Embedding& query) const {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(centroids_.size());
  for (std::size_t c = 0; c < centroids_.size(); ++c) {
    dist.emplace_back(squared_distance(query.values(), centroids_[c]), c);
  }
  std::sort(dist.begin(), dist.end());
  std::size_t n = std::min(config_.probe_clusters, dist.size());
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(dist[i].second);
  return out;
}

const SemanticCache::Node* SemanticCache::search(const Embedding& query) const {
  const Node* best = nullptr;
  double best_sim = -2.0;
  auto consider = [&](const Node& node) {
    double sim = cosine(query, node.entry.embedding);
    if (best == nullptr || sim > best_sim ||
        (sim == best_sim &&
         (node.entry.last_access > best->entry.last_access ||
          (node.entry.last_access == best->entry.last_access && node.entry.key < best->entry.key)))) {
      best = &node;
      best_sim = sim;
    }
  };
  if (!centroids_.empty()) {
    for (auto c : probe_order(query)) {
      for (const Node* node : members_[c]) consider(*node);
    }
  } else {
    for (const auto& [key, node] : nodes_) consider(node);
  }
  if (best == nullptr || best_sim < tau_) return nullptr;
  return best;
}

std::optional<CacheHit> SemanticCache::peek(const Embedding& query) const {
  std::shared_lock lock(mutex_);
  const Node* node = search(query);
  if (node == nullptr) return std::nullopt;
  return CacheHit{node->entry.key, node->entry.response, cosine(query, node->entry.embedding)};
}

std::optional<CacheHit> SemanticCache::lookup(const Embedding& query) {
  std::unique_lock lock(mutex_);
  ++stats_.lookups;
  const Node* found = search(query);
  if (found == nullptr) return std::nullopt;
  Node& node = nodes_.at(found->entry.key);
  ++stats_.hits;
  ++node.entry.hit_count;
  touch(node);
  return CacheHit{node.entry.key, node.entry.response, cosine(query, node.entry.embedding)};
}

void SemanticCache::touch(Node& node) {
  node.entry.last_access = ++tick_;
  lru_.splice(lru_.begin(), lru_, node.lru_pos);
}

void SemanticCache::attach_to_cluster(Node& node) {
  if (centroids_.empty()) {
    node.entry.cluster_id.reset();
    return;
  }
  auto c = nearest_centroid(node.entry.embedding.values(), centroids_);
  node.entry.cluster_id = c;
  members_[c].push_back(&node);
}

void SemanticCache::detach_from_cluster(const Node& node) {
  if (!node.entry.cluster_id || *node.entry.cluster_id >= members_.size()) return;
  auto& list = members_[*node.entry.cluster_id];
  list.erase(std::remove(list.begin(), list.end(), &node), list.end());
}

void SemanticCache::evict_lru() {
  const std::string victim = lru_.back();
  auto it = nodes_.find(victim);
  detach_from_cluster(it->second);
  lru_.pop_back();
  nodes_.erase(it);
}

void SemanticCache::insert(const std::string& key, const Embedding& embedding,
                           const std::string& response) {
  std::unique_lock lock(mutex_);
  if (!nodes_.empty() && embedding.dimension() != nodes_.begin()->second.entry.embedding.dimension()) {
    throw InvalidInput("cache insert: embedding dimension mismatch");
  }
  auto it = nodes_.find(key);
  if (it != nodes_.end()) {
    Node& node = it->second;
    detach_from_cluster(node);
    node.entry.embedding = embedding;
    node.entry.response = response;
    node.entry.hit_count = 0;
    touch(node);
    attach_to_cluster(node);
  } else {
    lru_.push_front(key);
    Node node{CacheEntry{key, embedding, response, 0, ++tick_, std::nullopt}, lru_.begin()};
    auto [pos, inserted] = nodes_.emplace(key, std::move(node));
    attach_to_cluster(pos->second);
  }
  while (nodes_.size() > config_.capacity) evict_lru();
  ++insertions_since_recluster_;
  if (insertions_since_recluster_ >= config_.recluster_interval &&
      nodes_.size() >= config_.cluster_trigger) {
    recluster_locked();
  }
}

void SemanticCache::recluster() {
  std::unique_lock lock(mutex_);
  recluster_locked();
}

void SemanticCache::recluster_locked() {
  if (nodes_.size() < config_.cluster_trigger) return;
  std::vector<Node*> ordered;
  ordered.reserve(nodes_.size());
  for (auto& [key, node] : nodes_) ordered.push_back(&node);
  std::sort(ordered.begin(), ordered.end(),
            [](const Node* a, const Node* b) { return a->entry.key < b->entry.key; });
  std::vector<std::span<const double>> points;
  points.reserve(ordered.size());
  for (const Node* n : ordered) points.push_back(n->entry.embedding.values());

  auto result = kmeans(points, k_for_size(ordered.size()),
                       combine_seed(config_.kmeans_seed, recluster_runs_), config_.kmeans_max_iterations);
  ++recluster_runs_;
  centroids_ = std::move(result.centroids);
  members_.assign(centroids_.size(), {});
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    ordered[i]->entry.cluster_id = result.assignment[i];
    members_[result.assignment[i]].push_back(ordered[i]);
  }
  insertions_since_recluster_ = 0;
}

double SemanticCache::adapt(const CacheStats& window) {
  std::unique_lock lock(mutex_);
  if (config_.adaptive_threshold) tau_ = adapt_threshold(tau_, window, config_.threshold);
  return tau_;
}

double SemanticCache::tau() const {
  std::shared_lock lock(mutex_);
  return tau_;
}

void SemanticCache::set_tau(double tau) {
  std::unique_lock lock(mutex_);
  if (tau < config_.threshold.tau_min || tau > config_.threshold.tau_max) {
    throw InvalidInput("cache: tau outside [tau_min, tau_max]");
  }
  tau_ = tau;
}

std::size_t SemanticCache::size() const {
  std::shared_lock lock(mutex_);
  return nodes_.size();
}

bool SemanticCache::clustered() const {
  std::shared_lock lock(mutex_);
  return !centroids_.empty();
}

std::size_t SemanticCache::cluster_count() const {
  std::shared_lock lock(mutex_);
  return centroids_.size();
}

std::vector<std::vector<double>> SemanticCache::centroids() const {
  std::shared_lock lock(mutex_);
  return centroids_;
}

std::vector<CacheEntry> SemanticCache::entries() const {
  std::shared_lock lock(mutex_);
  std::vector<CacheEntry> out;
  out.reserve(nodes_.size());
  for (const auto& [key, node] : nodes_) out.push_back(node.entry);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  return out;
}

std::optional<CacheEntry> SemanticCache::entry(const std::string& key) const {
  std::shared_lock lock(mutex_);
  auto it = nodes_.find(key);
  if (it == nodes_.end()) return std::nullopt;
  return it->second.entry;
}

CacheStats SemanticCache::stats() const {
  std::shared_lock lock(mutex_);
  return stats_;
}

void SemanticCache::reset_stats() {
  std::unique_lock lock(mutex_);
  stats_ = {};
}

json SemanticCache::snapshot() const {
  std::shared_lock lock(mutex_);
  json entries = json::array();
  std::vector<const Node*> ordered;
  for (const auto& [key, node] : nodes_) ordered.push_back(&node);
  std::sort(ordered.begin(), ordered.end(),
            [](const Node* a, const Node* b) { return a->entry.key < b->entry.key; });
  for (const Node* n : ordered) {
    const auto& e = n->entry;
    entries.push_back({{"key", e.key},
                       {"embedding", std::vector<double>(e.embedding.values().begin(),
                                                         e.embedding.values().end())},
                       {"response", e.response},
                       {"hit_count", e.hit_count},
                       {"last_access", e.last_access},
                       {"cluster_id", e.cluster_id ? json(*e.cluster_id) : json(nullptr)}});
  }
  return {{"format", "llmsched.cache"},
          {"version", 1},
          {"tau", tau_},
          {"tick", tick_},
          {"insertions_since_recluster", insertions_since_recluster_},
          {"recluster_runs", recluster_runs_},
          {"centroids", centroids_},
          {"stats",
           {{"lookups", stats_.lookups},
            {"hits", stats_.hits},
            {"inspected_hits", stats_.inspected_hits},
            {"inspected_correct", stats_.inspected_correct}}},
          {"entries", std::move(entries)}};
}

std::unique_ptr<SemanticCache> SemanticCache::restore(const json& snap, CacheConfig config) {
  if (snap.value("format", "") != "llmsched.cache" || snap.value("version", 0) != 1) {
    throw FormatError("cache snapshot: unsupported format or version");
  }
  try {
    auto cache = std::make_unique<SemanticCache>(std::move(config));
    cache->tau_ = snap.at("tau").get<double>();
    cache->tick_ = snap.at("tick").get<uint64_t>();
    cache->insertions_since_recluster_ = snap.at("insertions_since_recluster").get<std::size_t>();
    cache->recluster_runs_ = snap.at("recluster_runs").get<uint64_t>();
    cache->centroids_ = snap.at("centroids").get<std::vector<std::vector<double>>>();
    cache->members_.assign(cache->centroids_.size(), {});
    const auto& st = snap.at("stats");
    cache->stats_ = {st.at("lookups").get<int64_t>(), st.at("hits").get<int64_t>(),
                     st.at("inspected_hits").get<int64_t>(), st.at("inspected_correct").get<int64_t>()};

    std::vector<Node*> by_access;
    for (const auto& e : snap.at("entries")) {
      CacheEntry entry;
      entry.key = e.at("key").get<std::string>();
      entry.embedding = Embedding(e.at("embedding").get<std::vector<double>>());
      entry.response = e.at("response").get<std::string>();
      entry.hit_count = e.at("hit_count").get<int64_t>();
      entry.last_access = e.at("last_access").get<uint64_t>();
      if (!e.at("cluster_id").is_null()) entry.cluster_id = e.at("cluster_id").get<std::size_t>();
      auto key = entry.key;
      auto [pos, inserted] = cache->nodes_.emplace(key, Node{std::move(entry), {}});
      if (!inserted) throw FormatError("cache snapshot: duplicate key " + key);
      by_access.push_back(&pos->second);
    }
    std::sort(by_access.begin(), by_access.end(), [](const Node* a, const Node* b) {
      return a->entry.last_access > b->entry.last_access;
    });
    for (Node* node : by_access) {
      cache->lru_.push_back(node->entry.key);
      node->lru_pos = std::prev(cache->lru_.end());
      if (node->entry.cluster_id) {
        if (*node->entry.cluster_id >= cache->members_.size()) {
          throw FormatError("cache snapshot: cluster id out of range");
        }
        cache->members_[*node->entry.cluster_id].push_back(node);
      }
    }
    return cache;
  } catch (const json::exception& e) {
    throw FormatError(std::string("cache snapshot: ") + e.what());
  }
}

void SemanticCache::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write cache snapshot " + path.string());
  out << snapshot().dump() << '\n';
}

std::unique_ptr<SemanticCache> SemanticCache::load(const std::filesystem::path& path,
                                                   CacheConfig config) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open cache snapshot " + path.string());
  json snap;
  try {
    snap = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("cache snapshot: ") + e.what());
  }
  return restore(snap, std::move(config));
}

}  // namespace llmsched
