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

#include <benchmark/benchmark.h>

#include <random>
#include <span>
#include <vector>

#include "llmsched/kmeans.h"

namespace {

void BM_KMeans(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> pts(n, std::vector<double>(64));
  for (auto& p : pts) {
    double shift = static_cast<double>(rng() % k);
    for (double& v : p) v = nd(rng) + shift;
  }
  std::vector<std::span<const double>> views(pts.begin(), pts.end());
  for (auto _ : state) benchmark::DoNotOptimize(llmsched::kmeans(views, k, 7));
}
BENCHMARK(BM_KMeans)->Args({500, 16})->Args({5000, 50});

}  // namespace
