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

#include "llmsched/workload_generator.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "llmsched/errors.h"
#include "llmsched/hashing.h"

namespace llmsched {

std::vector<HorizonBatch> partition_periods(std::span<const Query> queries, std::span<const std::size_t> sizes) {
  std::size_t total = 0;
  for (std::size_t s : sizes) total += s;
  if (total != queries.size()) throw InvalidInput("partition_periods: sizes do not sum to the query count");
  std::vector<HorizonBatch> out;
  out.reserve(sizes.size());
  std::size_t pos = 0;
  for (std::size_t t = 0; t < sizes.size(); ++t) {
    HorizonBatch batch;
    batch.period = static_cast<int>(t) + 1;
    batch.queries.reserve(sizes[t]);
    for (std::size_t i = 0; i < sizes[t]; ++i) batch.queries.push_back(queries[pos++].with_period(batch.period));
    out.push_back(std::move(batch));
  }
  return out;
}

WorkloadPlan generate_workload(std::span<const Query> dataset, const ArrivalParams& params, uint64_t seed) {
  const std::size_t s = dataset.size();
  if (s < 10) throw ConfigError("dataset has " + std::to_string(s) + " queries; at least 10 are required");
  if (!(params.init_fraction > 0.0 && params.init_fraction < 1.0)) {
    throw ConfigError("init_fraction must lie in (0, 1)");
  }
  if (!(params.lambda_min_fraction > 0.0 && params.lambda_min_fraction <= params.lambda_max_fraction)) {
    throw ConfigError("lambda_range must satisfy 0 < min <= max");
  }

  WorkloadPlan plan;
  auto n_init = static_cast<std::size_t>(std::ceil(params.init_fraction * static_cast<double>(s) - 1e-9));
  n_init = std::clamp<std::size_t>(n_init, 1, s - 1);
  for (std::size_t i = 0; i < n_init; ++i) plan.init.push_back(dataset[i].with_period(0));

  std::mt19937_64 rng(seed);
  double lo = params.lambda_min_fraction * static_cast<double>(s);
  double hi = params.lambda_max_fraction * static_cast<double>(s);
  plan.lambda = lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
  std::poisson_distribution<std::size_t> arrivals(plan.lambda);

  std::vector<std::size_t> sizes;
  std::size_t remaining = s - n_init;
  while (remaining > 0) {
    std::size_t n = std::min(arrivals(rng), remaining);
    sizes.push_back(n);
    remaining -= n;
  }
  plan.periods = partition_periods(dataset.subspan(n_init), sizes);
  return plan;
}

namespace {

std::string make_word(std::mt19937_64& rng) {
  static constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
                                            "br", "st", "tr", "pl", "gr", "sk"};
  static constexpr const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou", "ea"};
  std::uniform_int_distribution<std::size_t> onset(0, std::size(kOnsets) - 1);
  std::uniform_int_distribution<std::size_t> vowel(0, std::size(kVowels) - 1);
  std::uniform_int_distribution<int> syllables(2, 3);
  std::string w;
  for (int i = syllables(rng); i > 0; --i) {
    w += kOnsets[onset(rng)];
    w += kVowels[vowel(rng)];
  }
  return w;
}

}  // namespace

std::vector<Query> synthesize_workload(const Scenario& scenario) {
  if (!scenario.recipe) throw ConfigError("scenario has no workload recipe");
  scenario.validate();
  const WorkloadRecipe& r = *scenario.recipe;
  std::mt19937_64 rng(r.seed);

  std::vector<std::string> vocab;
  vocab.reserve(r.vocabulary);
  while (vocab.size() < r.vocabulary) {
    std::string w = make_word(rng);
    if (std::find(vocab.begin(), vocab.end(), w) == vocab.end()) vocab.push_back(std::move(w));
  }

  std::vector<std::string> cats;
  std::vector<double> weights;
  for (const auto& [name, _] : scenario.categories) {
    cats.push_back(name);
    auto it = r.category_weights.find(name);
    weights.push_back(r.category_weights.empty() ? 1.0 : (it == r.category_weights.end() ? 0.0 : it->second));
  }
  std::discrete_distribution<std::size_t> pick_cat(weights.begin(), weights.end());
  std::uniform_int_distribution<std::size_t> pick_word(0, vocab.size() - 1);

  struct Item {
    std::string payload;
    std::string category;
    int64_t tokens;
  };
  auto fresh = [&]() {
    Item item;
    item.category = cats[pick_cat(rng)];
    auto pre = r.category_prefix.find(item.category);
    item.payload = pre == r.category_prefix.end() ? item.category : pre->second;
    for (std::size_t i = 0; i < r.words_per_query; ++i) item.payload += " " + vocab[pick_word(rng)];
    std::size_t words = 1 + static_cast<std::size_t>(std::count(item.payload.begin(), item.payload.end(), ' '));
    item.tokens = static_cast<int64_t>(std::llround(1.3 * static_cast<double>(words))) + 4;
    return item;
  };

  const std::size_t n = r.size;
  auto n_dup = static_cast<std::size_t>(std::llround(r.duplicate_fraction * static_cast<double>(n)));
  std::size_t hot = std::min(r.hot_set, n - n_dup);
  if (n_dup > 0 && hot == 0) throw ConfigError("workload recipe: no room for a hot set");

  std::vector<Item> hot_items;
  for (std::size_t i = 0; i < hot; ++i) hot_items.push_back(fresh());

  // Tail after the hot set's first occurrences: repeats and unique items,
  // shuffled together.
  std::vector<Item> tail;
  std::uniform_int_distribution<std::size_t> pick_hot(0, hot == 0 ? 0 : hot - 1);
  for (std::size_t i = 0; i < n_dup; ++i) tail.push_back(hot_items[pick_hot(rng)]);
  while (hot + tail.size() < n) tail.push_back(fresh());
  std::shuffle(tail.begin(), tail.end(), rng);

  std::vector<Query> out;
  out.reserve(n);
  auto emit = [&](const Item& item) {
    char id[32];
    std::snprintf(id, sizeof id, "q%06zu", out.size());
    out.emplace_back(id, item.payload, item.tokens, item.category);
  };
  for (const auto& item : hot_items) emit(item);
  for (const auto& item : tail) emit(item);
  return out;
}

}  // namespace llmsched
