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
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "llmsched/dense_matrix.h"
#include "llmsched/domain.h"
#include "llmsched/embedding.h"
#include "llmsched/gbdt.h"
#include "llmsched/linear_model.h"

namespace llmsched {

// Raw (unscaled) features: embedding followed by a one-hot block of length m.
struct FeatureVector {
  std::vector<double> values;
};

FeatureVector build_features(const Embedding& embedding, std::size_t llm_index, std::size_t llm_count);

// Per-column min-max scaling. Values outside the fitted range clip to [0,1];
// a constant column maps to 0 at or below its value and 1 above it.
class MinMaxScaler {
 public:
  void fit(const DenseMatrix& x);
  std::vector<double> transform(std::span<const double> raw) const;
  void transform_in_place(std::span<double> values) const;

  bool fitted() const { return !min_.empty(); }
  const std::vector<double>& min() const { return min_; }
  const std::vector<double>& max() const { return max_; }

  nlohmann::json to_json() const;
  static MinMaxScaler from_json(const nlohmann::json& j);
  static MinMaxScaler from_ranges(std::vector<double> min, std::vector<double> max);

 private:
  std::vector<double> min_;
  std::vector<double> max_;
};

struct TrainingRow {
  FeatureVector features;  // raw
  int success_label = 0;
  double cost_label = 0.0;  // USD
};

struct PredictionPair {
  double perf = 0.0;  // [0,1]
  double cost = 0.0;  // USD, > 0
};

class SuccessClassifier {
 public:
  virtual ~SuccessClassifier() = default;
  virtual double probability(std::span<const double> scaled) const = 0;
  virtual nlohmann::json to_json() const = 0;
};

class CostRegressor {
 public:
  virtual ~CostRegressor() = default;
  virtual double cost(std::span<const double> scaled) const = 0;
  virtual nlohmann::json to_json() const = 0;
};

struct ModelConfig {
  enum class Family { kGbdt, kLinear };

  Family family = Family::kGbdt;
  GbdtParams gbdt;
  LinearParams linear;
  uint64_t seed = 7;
  // Fraction of rows held out for the recorded eval; the served models are
  // always fitted on every row. 0 disables the held-out pass.
  double holdout_fraction = 0.2;

  // Optional user-supplied model families. When set they replace the
  // built-in family for that model.
  std::function<std::shared_ptr<const SuccessClassifier>(const DenseMatrix&, std::span<const double>)>
      custom_classifier;
  std::function<std::shared_ptr<const CostRegressor>(const DenseMatrix&, std::span<const double>)>
      custom_regressor;

  void validate() const;
};

struct ModelEval {
  double accuracy = 0.0;  // on all training rows
  double mae = 0.0;       // USD, on all training rows
  std::optional<double> holdout_accuracy;
  std::optional<double> holdout_mae;
  std::size_t rows = 0;
  bool classifier_degenerate = false;
  uint64_t split_seed = 0;
};

// Accuracy (threshold 0.5) and MAE of raw regressor output.
struct BatchMetrics {
  double accuracy = 0.0;
  double mae = 0.0;
  std::size_t rows = 0;
};

// Trained success classifier + cost regressor sharing one scaler. Immutable
// once built; copies share the underlying models.
class ModelBundle {
 public:
  ModelBundle() = default;

  bool trained() const { return classifier_ != nullptr && regressor_ != nullptr; }
  std::size_t embedding_dim() const { return embedding_dim_; }
  std::size_t llm_count() const { return llm_count_; }
  const MinMaxScaler& scaler() const { return scaler_; }
  const ModelEval& eval() const { return eval_; }

  // perf is the clamped classifier probability; cost is
  // max(regressor output, tn_i * price_input + price_output).
  // Throws StateError when untrained.
  PredictionPair predict(const Embedding& embedding, std::size_t llm_index, int64_t input_tokens,
                         const LLMProfile& llm) const;

  double success_probability(std::span<const double> raw_features) const;
  double raw_cost(std::span<const double> raw_features) const;

  nlohmann::json to_json() const;
  static ModelBundle from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static ModelBundle load(const std::filesystem::path& path);
  // Stable hash of the serialized bundle.
  std::string digest() const;

 private:
  friend ModelBundle train(std::span<const TrainingRow>, const ModelConfig&, std::size_t, std::size_t);
  friend ModelBundle retrain(const ModelBundle&, std::span<const TrainingRow>, const ModelConfig&, bool,
                             bool);

  std::size_t embedding_dim_ = 0;
  std::size_t llm_count_ = 0;
  MinMaxScaler scaler_;
  std::shared_ptr<const SuccessClassifier> classifier_;
  std::shared_ptr<const CostRegressor> regressor_;
  ModelEval eval_;
};

// Fits the scaler and both models on `rows`. Throws TrainingError on empty
// input; single-class rows produce a constant classifier and set
// eval.classifier_degenerate.
ModelBundle train(std::span<const TrainingRow> rows, const ModelConfig& config, std::size_t embedding_dim,
                  std::size_t llm_count);

// Refits the selected models. Retraining both refits the scaler too;
// retraining one keeps the current scaler so the other model stays valid.
ModelBundle retrain(const ModelBundle& current, std::span<const TrainingRow> rows, const ModelConfig& config,
                    bool classifier, bool regressor);

BatchMetrics evaluate(const ModelBundle& bundle, std::span<const TrainingRow> rows);

}  // namespace llmsched
