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

#include <limits>
#include <random>

#include "llmsched/errors.h"
#include "llmsched/kmeans.h"

namespace llmsched {
namespace {

using Points = std::vector<std::vector<double>>;

std::vector<std::span<const double>> views(const Points& pts) {
  return {pts.begin(), pts.end()};
}

// Bitmask of the points sharing a cluster with point 0.
unsigned side_of_first(const std::vector<std::size_t>& assignment) {
  unsigned mask = 0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == assignment[0]) mask |= 1u << i;
  }
  return mask;
}

double group_wcss(const Points& pts, unsigned mask, bool inside) {
  std::vector<double> mean(pts[0].size(), 0.0);
  int n = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (((mask >> i) & 1u) != inside) continue;
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += pts[i][j];
    ++n;
  }
  for (double& v : mean) v /= n;
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (((mask >> i) & 1u) != inside) continue;
    for (std::size_t j = 0; j < mean.size(); ++j) s += (pts[i][j] - mean[j]) * (pts[i][j] - mean[j]);
  }
  return s;
}

// Minimum-WCSS split into two non-empty groups, as the mask of point 0's group.
unsigned brute_force_split(const Points& pts) {
  const unsigned n = static_cast<unsigned>(pts.size());
  unsigned best = 0;
  double best_w = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << n) - 1; ++mask) {
    if ((mask & 1u) == 0) continue;
    double w = group_wcss(pts, mask, true) + group_wcss(pts, mask, false);
    if (w < best_w) {
      best_w = w;
      best = mask;
    }
  }
  return best;
}

TEST(KMeans, WcssNeverIncreasesAcrossIterations) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int inst = 0; inst < 1000; ++inst) {
    std::size_t n = 5 + rng() % 40;
    std::size_t d = 1 + rng() % 6;
    std::size_t k = 1 + rng() % 6;
    Points pts(n, std::vector<double>(d));
    for (auto& p : pts) {
      for (auto& v : p) v = nd(rng) + static_cast<double>(rng() % 3) * 4.0;
    }
    auto r = kmeans(views(pts), k, rng());
    for (std::size_t i = 1; i < r.wcss_history.size(); ++i) {
      ASSERT_LE(r.wcss_history[i], r.wcss_history[i - 1] * (1 + 1e-12) + 1e-12) << "instance " << inst;
    }
  }
}

TEST(KMeans, FourPointFixturesMatchBruteForce) {
  const std::vector<Points> fixtures{
      {{0, 0}, {0, 1}, {10, 0}, {10, 1}},
      {{0, 0}, {1, 0}, {2, 0}, {10, 0}},
      {{0, 0}, {0.5, 0.2}, {5, 5}, {5.5, 4.8}},
      {{1, 1, 1}, {1.2, 0.9, 1}, {-3, -3, 0}, {-3.1, -2.8, 0.2}},
      {{0}, {1}, {8}, {9.5}},
      {{-2, 0}, {2, 0}, {0, 9}, {0, 10}},
      {{0, 0}, {0, 1}, {10, 10}, {10, 11}},
  };
  for (std::size_t f = 0; f < fixtures.size(); ++f) {
    auto r = kmeans(views(fixtures[f]), 2, 1234 + f);
    EXPECT_EQ(side_of_first(r.assignment), brute_force_split(fixtures[f])) << "fixture " << f;
  }
}

TEST(KMeans, SeparatedRandomPairsMatchBruteForce) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    Points pts;
    for (int c = 0; c < 2; ++c) {
      double cx = c * 10.0 + u(rng), cy = u(rng) * 5.0;
      for (int i = 0; i < 2; ++i) pts.push_back({cx + u(rng), cy + u(rng)});
    }
    std::shuffle(pts.begin(), pts.end(), rng);
    auto r = kmeans(views(pts), 2, rng());
    EXPECT_EQ(side_of_first(r.assignment), brute_force_split(pts)) << "trial " << t;
  }
}

TEST(KMeans, DeterministicForSeed) {
  Points pts{{0, 0}, {1, 1}, {5, 5}, {6, 5}, {9, 0}, {9, 1}};
  auto a = kmeans(views(pts), 3, 7);
  auto b = kmeans(views(pts), 3, 7);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.centroids, b.centroids);
}

TEST(KMeans, KLargerThanPointsIsClamped) {
  Points pts{{0, 0}, {1, 1}};
  auto r = kmeans(views(pts), 5, 1);
  EXPECT_EQ(r.centroids.size(), 2u);
  EXPECT_DOUBLE_EQ(r.wcss_history.back(), 0.0);
}

TEST(KMeans, IdenticalPointsCollapse) {
  Points pts(5, std::vector<double>{3.0, 3.0});
  auto r = kmeans(views(pts), 3, 1);
  EXPECT_DOUBLE_EQ(r.wcss_history.back(), 0.0);
  for (auto a : r.assignment) EXPECT_EQ(a, 0u);
}

TEST(KMeans, RejectsBadInput) {
  Points empty;
  EXPECT_THROW(kmeans(views(empty), 2, 1), InvalidInput);
  Points pts{{0, 0}, {1}};
  EXPECT_THROW(kmeans(views(pts), 1, 1), InvalidInput);
  Points ok{{0, 0}};
  EXPECT_THROW(kmeans(views(ok), 0, 1), InvalidInput);
}

TEST(NearestCentroid, TiesGoToLowerIndex) {
  std::vector<std::vector<double>> c{{1, 0}, {-1, 0}};
  std::vector<double> p{0, 0};
  EXPECT_EQ(nearest_centroid(p, c), 0u);
}

}  // namespace
}  // namespace llmsched
