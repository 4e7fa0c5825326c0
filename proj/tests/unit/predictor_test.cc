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

#include <random>

#include "fixtures.h"
#include "llmsched/errors.h"
#include "llmsched/predictor.h"
#include "llmsched/updater.h"

namespace llmsched {
namespace {

constexpr std::size_t kDim = 6;
constexpr std::size_t kLlms = 2;

Embedding basis(std::size_t i) {
  std::vector<double> v(kDim, 0.0);
  v[i] = 1.0;
  return Embedding(std::move(v));
}

// Two LLMs over two "topics" (basis 0 vs 1): LLM 0 succeeds on topic 0 only,
// LLM 1 on both; LLM 1 costs three times as much.
std::vector<TrainingRow> topic_rows(std::size_t copies) {
  std::vector<TrainingRow> rows;
  for (std::size_t c = 0; c < copies; ++c) {
    for (std::size_t topic = 0; topic < 2; ++topic) {
      for (std::size_t k = 0; k < kLlms; ++k) {
        bool ok = k == 1 || topic == 0;
        rows.push_back(make_training_row(basis(topic), k, kLlms, ok, Money::from_dollars(k == 0 ? 1e-4 : 3e-4)));
      }
    }
  }
  return rows;
}

LLMProfile cheap_profile() {
  return {"p", Money::from_dollars(1e-6), Money::from_dollars(2e-6), {1.0, 0.0}, {}};
}

TEST(BuildFeatures, EmbeddingThenOneHot) {
  auto f = build_features(Embedding({0.6, 0.8}), 1, 3);
  std::vector<double> want{0.6, 0.8, 0, 1, 0};
  EXPECT_EQ(f.values, want);
  EXPECT_THROW(build_features(Embedding({1.0, 0.0}), 3, 3), InvalidInput);
}

TEST(MinMaxScaler, MatchesHandComputation) {
  DenseMatrix x(3, 3);
  double data[3][3] = {{0, 5, 2}, {10, 5, 4}, {5, 5, 6}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) x(i, j) = data[i][j];
  MinMaxScaler s;
  s.fit(x);
  std::vector<double> raw{2.5, 5, 7};
  auto t = s.transform(raw);
  EXPECT_DOUBLE_EQ(t[0], 0.25);
  EXPECT_DOUBLE_EQ(t[1], 0.0);  // constant column, at its value
  EXPECT_DOUBLE_EQ(t[2], 1.0);  // clipped
  std::vector<double> above{-1, 6, 3};
  t = s.transform(above);
  EXPECT_DOUBLE_EQ(t[0], 0.0);
  EXPECT_DOUBLE_EQ(t[1], 1.0);
  EXPECT_DOUBLE_EQ(t[2], 0.25);
  EXPECT_THROW(s.transform(std::vector<double>{1, 2}), InvalidInput);
  auto back = MinMaxScaler::from_json(s.to_json());
  EXPECT_EQ(back.min(), s.min());
  EXPECT_EQ(back.max(), s.max());
}

TEST(MinMaxScaler, OutputAlwaysInUnitInterval) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd(0, 5);
  DenseMatrix x(20, 4);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 4; ++j) x(i, j) = nd(rng);
  MinMaxScaler s;
  s.fit(x);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> v{nd(rng) * 3, nd(rng) * 3, nd(rng) * 3, nd(rng) * 3};
    for (double y : s.transform(v)) {
      EXPECT_GE(y, 0.0);
      EXPECT_LE(y, 1.0);
    }
  }
}

TEST(Predictor, LearnsTopicSpecificSuccess) {
  auto rows = topic_rows(10);
  ModelConfig cfg;
  cfg.gbdt.n_trees = 30;
  auto bundle = train(rows, cfg, kDim, kLlms);
  auto llm = cheap_profile();
  EXPECT_GT(bundle.predict(basis(0), 0, 10, llm).perf, 0.8);
  EXPECT_LT(bundle.predict(basis(1), 0, 10, llm).perf, 0.2);
  EXPECT_GT(bundle.predict(basis(1), 1, 10, llm).perf, 0.8);
  EXPECT_NEAR(bundle.predict(basis(0), 1, 10, llm).cost, 3e-4, 3e-5);
  EXPECT_DOUBLE_EQ(bundle.eval().accuracy, 1.0);
  EXPECT_TRUE(bundle.eval().holdout_accuracy.has_value());
  EXPECT_EQ(bundle.eval().rows, rows.size());
}

TEST(Predictor, CostNeverBelowOneOutputTokenFloor) {
  auto rows = topic_rows(4);
  for (auto& r : rows) r.cost_label = 1e-9;
  auto bundle = train(rows, ModelConfig{}, kDim, kLlms);
  auto llm = cheap_profile();
  // 100 input tokens * 1e-6 + 1 output token * 2e-6
  EXPECT_DOUBLE_EQ(bundle.predict(basis(0), 0, 100, llm).cost, 1.02e-4);
  LLMProfile free{"f", Money{}, Money{}, {1.0, 0.0}, {}};
  EXPECT_DOUBLE_EQ(bundle.predict(basis(0), 0, 100, free).cost, 1e-9);
  EXPECT_GT(bundle.predict(basis(0), 0, 0, free).cost, 0.0);
}

TEST(Predictor, SingleClassGivesConstantClassifier) {
  auto rows = topic_rows(3);
  for (auto& r : rows) r.success_label = 1;
  auto bundle = train(rows, ModelConfig{}, kDim, kLlms);
  EXPECT_TRUE(bundle.eval().classifier_degenerate);
  EXPECT_DOUBLE_EQ(bundle.predict(basis(1), 0, 1, cheap_profile()).perf, 1.0);
}

TEST(Predictor, ErrorsOnBadUse) {
  std::vector<TrainingRow> none;
  EXPECT_THROW(train(none, ModelConfig{}, kDim, kLlms), TrainingError);
  ModelBundle empty;
  EXPECT_THROW(empty.predict(basis(0), 0, 1, cheap_profile()), StateError);
  auto bundle = train(topic_rows(2), ModelConfig{}, kDim, kLlms);
  EXPECT_THROW(bundle.predict(Embedding({1.0, 0.0}), 0, 1, cheap_profile()), InvalidInput);
  auto bad = topic_rows(1);
  bad[0].success_label = 2;
  EXPECT_THROW(train(bad, ModelConfig{}, kDim, kLlms), TrainingError);
}

TEST(Predictor, TrainingIsDeterministic) {
  auto rows = topic_rows(5);
  auto a = train(rows, ModelConfig{}, kDim, kLlms);
  auto b = train(rows, ModelConfig{}, kDim, kLlms);
  EXPECT_EQ(a.digest(), b.digest());
}

TEST(Predictor, PartialRetrainKeepsScalerAndOtherModel) {
  auto rows = topic_rows(5);
  auto bundle = train(rows, ModelConfig{}, kDim, kLlms);
  auto shifted = rows;
  for (auto& r : shifted) r.cost_label *= 2;
  auto next = retrain(bundle, shifted, ModelConfig{}, false, true);
  EXPECT_EQ(next.scaler().min(), bundle.scaler().min());
  EXPECT_EQ(next.scaler().max(), bundle.scaler().max());
  auto llm = cheap_profile();
  EXPECT_EQ(next.predict(basis(0), 0, 1, llm).perf, bundle.predict(basis(0), 0, 1, llm).perf);
  EXPECT_NEAR(next.predict(basis(0), 1, 1, llm).cost, 6e-4, 6e-5);
  auto same = retrain(bundle, shifted, ModelConfig{}, false, false);
  EXPECT_EQ(same.digest(), bundle.digest());
}

TEST(Predictor, EvaluateCountsAccuracyAndMae) {
  auto rows = topic_rows(5);
  auto bundle = train(rows, ModelConfig{}, kDim, kLlms);
  auto flipped = rows;
  for (std::size_t i = 0; i < flipped.size(); i += 2) flipped[i].success_label ^= 1;
  auto m = evaluate(bundle, flipped);
  EXPECT_NEAR(m.accuracy, 0.5, 1e-12);
  EXPECT_EQ(m.rows, rows.size());
  EXPECT_LT(m.mae, 3e-5);
}

TEST(Predictor, SaveLoadRoundTrip) {
  testing::TempDir dir("bundle");
  auto bundle = train(topic_rows(5), ModelConfig{}, kDim, kLlms);
  bundle.save(dir.path() / "m.json");
  auto back = ModelBundle::load(dir.path() / "m.json");
  EXPECT_EQ(back.digest(), bundle.digest());
  auto llm = cheap_profile();
  EXPECT_EQ(back.predict(basis(1), 1, 7, llm).perf, bundle.predict(basis(1), 1, 7, llm).perf);
  EXPECT_THROW(ModelBundle::from_json(nlohmann::json{{"format", "nope"}}), FormatError);
}

TEST(Predictor, LinearFamilyAlsoLearns) {
  ModelConfig cfg;
  cfg.family = ModelConfig::Family::kLinear;
  auto bundle = train(topic_rows(10), cfg, kDim, kLlms);
  auto llm = cheap_profile();
  EXPECT_GT(bundle.predict(basis(0), 0, 1, llm).perf, bundle.predict(basis(1), 0, 1, llm).perf);
}

TEST(Predictor, CustomFamiliesAreUsed) {
  struct Half : SuccessClassifier {
    double probability(std::span<const double>) const override { return 0.5; }
    nlohmann::json to_json() const override { return {{"kind", "half"}}; }
  };
  ModelConfig cfg;
  cfg.custom_classifier = [](const DenseMatrix&, std::span<const double>) {
    return std::make_shared<const Half>();
  };
  auto bundle = train(topic_rows(3), cfg, kDim, kLlms);
  EXPECT_DOUBLE_EQ(bundle.predict(basis(0), 0, 1, cheap_profile()).perf, 0.5);
}

TEST(ModelConfig, ValidateRejectsBadParams) {
  ModelConfig cfg;
  cfg.gbdt.n_trees = 0;
  cfg.holdout_fraction = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace llmsched
