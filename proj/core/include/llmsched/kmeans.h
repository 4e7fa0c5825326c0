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
#include <span>
#include <vector>

namespace llmsched {

struct KMeansResult {
  std::vector<std::vector<double>> centroids;
  std::vector<std::size_t> assignment;
  // WCSS after the initial assignment, then after every Lloyd iteration.
  std::vector<double> wcss_history;
  int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding drawn from `seed`. Stops when
// assignments are stable or after `max_iterations`. When every remaining
// point coincides with a chosen center the seeding duplicates centers, so
// identical inputs collapse onto a single effective centroid.
KMeansResult kmeans(std::span<const std::span<const double>> points, std::size_t k, uint64_t seed,
                    int max_iterations = 50);

// Index of the nearest centroid by squared Euclidean distance; ties go to the
// lower index.
std::size_t nearest_centroid(std::span<const double> point,
                             const std::vector<std::vector<double>>& centroids);

double wcss(std::span<const std::span<const double>> points,
            const std::vector<std::vector<double>>& centroids,
            std::span<const std::size_t> assignment);

}  // namespace llmsched
