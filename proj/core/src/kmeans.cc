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

#include "llmsched/kmeans.h"

#include <limits>
#include <random>

#include "llmsched/embedding.h"
#include "llmsched/errors.h"

namespace llmsched {

std::size_t nearest_centroid(std::span<const double> point,
                             const std::vector<std::vector<double>>& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    double d = squared_distance(point, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

double wcss(std::span<const std::span<const double>> points,
            const std::vector<std::vector<double>>& centroids,
            std::span<const std::size_t> assignment) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    total += squared_distance(points[i], centroids[assignment[i]]);
  }
  return total;
}

namespace {

std::vector<std::vector<double>> seed_plus_plus(std::span<const std::span<const double>> points,
                                                std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> centers;
  centers.reserve(k);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const auto& first = points[pick(rng)];
  centers.emplace_back(first.begin(), first.end());

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], centers[0]);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (centers.size() < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    if (total <= 0.0) {
      centers.push_back(centers.back());
      continue;
    }
    double target = unit(rng) * total;
    std::size_t chosen = n - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (d2[i] > 0.0 && acc >= target) {
        chosen = i;
        break;
      }
    }
    // Guard the tail case where rounding leaves target above the running sum.
    while (d2[chosen] <= 0.0 && chosen > 0) --chosen;
    centers.emplace_back(points[chosen].begin(), points[chosen].end());
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], centers.back()));
    }
  }
  return centers;
}

}  // namespace

KMeansResult kmeans(std::span<const std::span<const double>> points, std::size_t k, uint64_t seed,
                    int max_iterations) {
  if (points.empty()) throw InvalidInput("kmeans: no points");
  if (k == 0) throw InvalidInput("kmeans: k must be positive");
  const std::size_t dim = points[0].size();
  for (const auto& p : points) {
    if (p.size() != dim) throw InvalidInput("kmeans: ragged input");
  }
  k = std::min(k, points.size());

  std::mt19937_64 rng(seed);
  KMeansResult result;
  result.centroids = seed_plus_plus(points, k, rng);
  result.assignment.assign(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    result.assignment[i] = nearest_centroid(points[i], result.centroids);
  }
  result.wcss_history.push_back(wcss(points, result.centroids, result.assignment));

  for (int iter = 0; iter < max_iterations; ++iter) {
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto c = result.assignment[i];
      ++counts[c];
      for (std::size_t j = 0; j < dim; ++j) sums[c][j] += points[i][j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its previous centroid
      for (std::size_t j = 0; j < dim; ++j) {
        result.centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
      }
    }
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto c = nearest_centroid(points[i], result.centroids);
      if (c != result.assignment[i]) {
        result.assignment[i] = c;
        changed = true;
      }
    }
    result.iterations = iter + 1;
    result.wcss_history.push_back(wcss(points, result.centroids, result.assignment));
    if (!changed) break;
  }
  return result;
}

}  // namespace llmsched
