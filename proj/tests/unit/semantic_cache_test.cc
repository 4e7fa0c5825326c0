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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <thread>

#include "fixtures.h"
#include "llmsched/errors.h"
#include "llmsched/kmeans.h"
#include "llmsched/semantic_cache.h"

namespace llmsched {
namespace {

Embedding unit(std::vector<double> v) {
  double n = 0;
  for (double x : v) n += x * x;
  for (double& x : v) x /= std::sqrt(n);
  return Embedding(std::move(v));
}

Embedding random_unit(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> nd;
  std::vector<double> v(d);
  for (auto& x : v) x = nd(rng);
  return unit(std::move(v));
}

Embedding jitter(const Embedding& e, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<double> v(e.values().begin(), e.values().end());
  for (auto& x : v) x += nd(rng);
  return unit(std::move(v));
}

// Linear scan with the documented tie order: similarity, then most recent
// access, then smaller key.
std::optional<std::string> linear_scan(const std::vector<CacheEntry>& entries, const Embedding& q, double tau) {
  const CacheEntry* best = nullptr;
  double best_sim = -2;
  for (const auto& e : entries) {
    double s = cosine(q, e.embedding);
    bool better = best == nullptr || s > best_sim ||
                  (s == best_sim && (e.last_access > best->last_access ||
                                     (e.last_access == best->last_access && e.key < best->key)));
    if (better) {
      best = &e;
      best_sim = s;
    }
  }
  if (best == nullptr || best_sim < tau) return std::nullopt;
  return best->key;
}

CacheConfig small_config() {
  CacheConfig c;
  c.capacity = 100;
  c.tau = 0.9;
  c.cluster_trigger = 1000;
  return c;
}

TEST(SemanticCache, ExactRepeatHitsAndReturnsStoredResponse) {
  SemanticCache cache(small_config());
  auto e = unit({1, 2, 3});
  cache.insert("k", e, "resp");
  auto hit = cache.lookup(e);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->response, "resp");
  EXPECT_NEAR(hit->similarity, 1.0, 1e-12);
  EXPECT_EQ(cache.entry("k")->hit_count, 1);
  EXPECT_EQ(cache.entry("k")->response, "resp");
}

TEST(SemanticCache, ThresholdIsInclusive) {
  CacheConfig c = small_config();
  c.tau = 0.8;
  SemanticCache cache(c);
  cache.insert("k", unit({1, 0}), "r");
  EXPECT_TRUE(cache.peek(Embedding({0.8, 0.6})));
  EXPECT_FALSE(cache.peek(Embedding({0.79, 0.6132})));
}

TEST(SemanticCache, MissCountsLookupButNotHit) {
  SemanticCache cache(small_config());
  cache.insert("k", unit({1, 0}), "r");
  EXPECT_FALSE(cache.lookup(unit({0, 1})));
  EXPECT_TRUE(cache.lookup(unit({1, 0})));
  auto st = cache.stats();
  EXPECT_EQ(st.lookups, 2);
  EXPECT_EQ(st.hits, 1);
  EXPECT_DOUBLE_EQ(st.hit_rate(), 0.5);
}

TEST(SemanticCache, PeekLeavesMetadataAlone) {
  SemanticCache cache(small_config());
  cache.insert("k", unit({1, 0}), "r");
  auto before = *cache.entry("k");
  EXPECT_TRUE(cache.peek(unit({1, 0})));
  EXPECT_EQ(cache.entry("k")->last_access, before.last_access);
  EXPECT_EQ(cache.stats().lookups, 0);
}

TEST(SemanticCache, EvictsLeastRecentlyUsed) {
  CacheConfig c = small_config();
  c.capacity = 3;
  SemanticCache cache(c);
  cache.insert("a", unit({1, 0, 0, 0}), "A");
  cache.insert("b", unit({0, 1, 0, 0}), "B");
  cache.insert("c", unit({0, 0, 1, 0}), "C");
  ASSERT_TRUE(cache.lookup(unit({1, 0, 0, 0})));  // a is now most recent
  cache.insert("d", unit({0, 0, 0, 1}), "D");
  EXPECT_EQ(cache.size(), 3u);
  EXPECT_TRUE(cache.entry("a"));
  EXPECT_FALSE(cache.entry("b"));
  EXPECT_TRUE(cache.entry("c"));
  EXPECT_TRUE(cache.entry("d"));
}

TEST(SemanticCache, ReinsertRefreshesInPlace) {
  SemanticCache cache(small_config());
  cache.insert("k", unit({1, 0}), "old");
  cache.insert("k", unit({0, 1}), "new");
  EXPECT_EQ(cache.size(), 1u);
  EXPECT_EQ(cache.peek(unit({0, 1}))->response, "new");
}

TEST(SemanticCache, TiesPreferRecentThenSmallerKey) {
  SemanticCache cache(small_config());
  auto e = unit({1, 1});
  cache.insert("b", e, "B");
  cache.insert("a", e, "A");
  EXPECT_EQ(cache.peek(e)->key, "a");
  cache.insert("b", e, "B");
  EXPECT_EQ(cache.peek(e)->key, "b");

  auto snap = cache.snapshot();
  for (auto& entry : snap["entries"]) entry["last_access"] = 7;
  auto same_age = SemanticCache::restore(snap, small_config());
  EXPECT_EQ(same_age->peek(e)->key, "a");
}

TEST(SemanticCache, DimensionMismatchRejected) {
  SemanticCache cache(small_config());
  cache.insert("k", unit({1, 0}), "r");
  EXPECT_THROW(cache.insert("j", unit({1, 0, 0}), "r"), InvalidInput);
}

TEST(SemanticCache, ConfigValidationNamesFields) {
  CacheConfig c;
  c.tau = 0.5;
  c.threshold.tau_min = 0.9;
  c.threshold.tau_max = 0.8;
  c.probe_clusters = 0;
  try {
    c.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.diagnostics().size(), 2u);
  }
}

TEST(AdaptThreshold, TightensRelaxesAndClamps) {
  ThresholdPolicy p;
  CacheStats low{0, 0, 10, 8};
  CacheStats mid{0, 0, 100, 95};
  CacheStats high{0, 0, 100, 99};
  CacheStats none{};
  EXPECT_DOUBLE_EQ(adapt_threshold(0.9, low, p), 0.91);
  EXPECT_DOUBLE_EQ(adapt_threshold(0.9, mid, p), 0.9);
  EXPECT_DOUBLE_EQ(adapt_threshold(0.9, high, p), 0.89);
  EXPECT_DOUBLE_EQ(adapt_threshold(0.9, none, p), 0.9);
  EXPECT_DOUBLE_EQ(adapt_threshold(0.99, low, p), 0.99);
  EXPECT_DOUBLE_EQ(adapt_threshold(0.7, high, p), 0.7);
}

TEST(AdaptThreshold, RepeatedStepsStayOnGrid) {
  ThresholdPolicy p;
  CacheStats low{0, 0, 10, 1};
  double tau = 0.7;
  for (int i = 0; i < 29; ++i) tau = adapt_threshold(tau, low, p);
  EXPECT_EQ(tau, 0.99);
}

TEST(SemanticCache, AdaptRespectsSwitch) {
  CacheConfig c = small_config();
  c.adaptive_threshold = false;
  SemanticCache cache(c);
  EXPECT_DOUBLE_EQ(cache.adapt(CacheStats{0, 0, 10, 1}), 0.9);
}

TEST(SemanticCache, KForSize) {
  SemanticCache cache(small_config());
  EXPECT_EQ(cache.k_for_size(2), 2u);
  EXPECT_EQ(cache.k_for_size(200), 10u);
  EXPECT_EQ(cache.k_for_size(100000), 64u);
}

// Cluster-scoped lookup probing every cluster equals a linear scan.
TEST(SemanticCache, ClusteredLookupMatchesLinearScan) {
  std::mt19937_64 rng(2024);
  int mismatches = 0;
  int probes = 0;
  for (int inst = 0; inst < 120; ++inst) {
    std::size_t d = 4 + rng() % 12;
    std::size_t n = 10 + rng() % 191;
    CacheConfig c;
    c.capacity = 1000;
    c.tau = 0.7 + 0.29 * std::uniform_real_distribution<double>(0, 1)(rng);
    c.cluster_trigger = 2;
    c.recluster_interval = 1'000'000;
    c.kmeans_seed = rng();
    SemanticCache cache(c);
    std::vector<Embedding> centers;
    for (int i = 0; i < 6; ++i) centers.push_back(random_unit(rng, d));
    for (std::size_t i = 0; i < n; ++i) {
      const auto& base = centers[rng() % centers.size()];
      // Some exact duplicates exercise the tie order.
      Embedding e = rng() % 10 == 0 ? base : jitter(base, 0.15, rng);
      cache.insert("k" + std::to_string(rng() % 100000), e, "r" + std::to_string(i));
    }
    cache.recluster();
    ASSERT_TRUE(cache.clustered());
    CacheConfig probe_all = c;
    probe_all.probe_clusters = cache.cluster_count();
    auto clustered = SemanticCache::restore(cache.snapshot(), probe_all);
    auto entries = clustered->entries();
    for (int p = 0; p < 20; ++p) {
      Embedding q = p % 4 == 0 ? random_unit(rng, d)
                               : jitter(entries[rng() % entries.size()].embedding, 0.05 * (p % 3), rng);
      auto want = linear_scan(entries, q, clustered->tau());
      auto got = clustered->peek(q);
      ++probes;
      if (want.has_value() != got.has_value() || (want && *want != got->key)) ++mismatches;
    }
  }
  EXPECT_EQ(mismatches, 0) << "of " << probes << " probes";
}

TEST(SemanticCache, ReclusterTriggersOnInsertThresholds) {
  CacheConfig c = small_config();
  c.cluster_trigger = 20;
  c.recluster_interval = 5;
  SemanticCache cache(c);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 19; ++i) cache.insert("k" + std::to_string(i), random_unit(rng, 8), "r");
  EXPECT_FALSE(cache.clustered());
  cache.insert("k19", random_unit(rng, 8), "r");
  EXPECT_TRUE(cache.clustered());
  EXPECT_EQ(cache.cluster_count(), cache.k_for_size(20));
  for (const auto& e : cache.entries()) EXPECT_TRUE(e.cluster_id.has_value());
}

TEST(SemanticCache, InsertAfterClusteringJoinsNearestCluster) {
  CacheConfig c = small_config();
  c.cluster_trigger = 4;
  c.recluster_interval = 1000;
  SemanticCache cache(c);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 8; ++i) cache.insert("k" + std::to_string(i), random_unit(rng, 6), "r");
  cache.recluster();
  auto e = random_unit(rng, 6);
  cache.insert("new", e, "N");
  auto entry = cache.entry("new");
  ASSERT_TRUE(entry->cluster_id);
  EXPECT_EQ(*entry->cluster_id, nearest_centroid(e.values(), cache.centroids()));
}

TEST(SemanticCache, SnapshotRoundTrip) {
  testing::TempDir dir("cache");
  CacheConfig c = small_config();
  c.cluster_trigger = 4;
  SemanticCache cache(c);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 12; ++i) cache.insert("k" + std::to_string(i), random_unit(rng, 5), "r" + std::to_string(i));
  cache.recluster();
  cache.lookup(cache.entries()[3].embedding);
  cache.set_tau(0.93);
  cache.save(dir.path() / "cache.json");
  auto back = SemanticCache::load(dir.path() / "cache.json", c);
  EXPECT_EQ(back->snapshot(), cache.snapshot());
  auto q = random_unit(rng, 5);
  EXPECT_EQ(back->peek(q).has_value(), cache.peek(q).has_value());
}

TEST(SemanticCache, RestoreRejectsForeignFormat) {
  EXPECT_THROW(SemanticCache::restore(nlohmann::json{{"format", "x"}}, small_config()), FormatError);
}

TEST(SemanticCache, SetTauOutsideBoundsRejected) {
  SemanticCache cache(small_config());
  EXPECT_THROW(cache.set_tau(0.5), InvalidInput);
}

TEST(SemanticCache, ConcurrentLookupsAndInsertsStayConsistent) {
  CacheConfig c = small_config();
  c.capacity = 50;
  c.cluster_trigger = 20;
  c.recluster_interval = 10;
  SemanticCache cache(c);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&cache, t] {
      std::mt19937_64 rng(t);
      for (int i = 0; i < 200; ++i) {
        auto e = random_unit(rng, 8);
        if (i % 2 == 0) {
          cache.insert("t" + std::to_string(t) + "-" + std::to_string(i), e, "r");
        } else {
          cache.lookup(e);
          cache.peek(e);
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_LE(cache.size(), 50u);
  EXPECT_EQ(cache.stats().lookups, 400);
}

}  // namespace
}  // namespace llmsched
