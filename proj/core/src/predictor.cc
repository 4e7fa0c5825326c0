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

#include "llmsched/predictor.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "llmsched/errors.h"
#include "llmsched/hashing.h"

namespace llmsched {

using nlohmann::json;

FeatureVector build_features(const Embedding& embedding, std::size_t llm_index, std::size_t llm_count) {
  if (llm_index >= llm_count) {
    throw InvalidInput("build_features: llm index " + std::to_string(llm_index) + " out of range [0, " +
                       std::to_string(llm_count) + ")");
  }
  FeatureVector fv;
  fv.values.reserve(embedding.dimension() + llm_count);
  fv.values.assign(embedding.values().begin(), embedding.values().end());
  fv.values.resize(embedding.dimension() + llm_count, 0.0);
  fv.values[embedding.dimension() + llm_index] = 1.0;
  return fv;
}

// ---------------------------------------------------------------------------
// Scaler

void MinMaxScaler::fit(const DenseMatrix& x) {
  if (x.rows() == 0) throw TrainingError("scaler: no rows");
  min_.assign(x.cols(), 0.0);
  max_.assign(x.cols(), 0.0);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    min_[j] = max_[j] = x(0, j);
    for (std::size_t i = 1; i < x.rows(); ++i) {
      min_[j] = std::min(min_[j], x(i, j));
      max_[j] = std::max(max_[j], x(i, j));
    }
  }
}

void MinMaxScaler::transform_in_place(std::span<double> values) const {
  if (values.size() != min_.size()) throw InvalidInput("scaler: feature width mismatch");
  for (std::size_t j = 0; j < values.size(); ++j) {
    double range = max_[j] - min_[j];
    double v = values[j];
    if (range > 0.0) {
      values[j] = std::clamp((v - min_[j]) / range, 0.0, 1.0);
    } else {
      values[j] = v > max_[j] ? 1.0 : 0.0;
    }
  }
}

std::vector<double> MinMaxScaler::transform(std::span<const double> raw) const {
  std::vector<double> out(raw.begin(), raw.end());
  transform_in_place(out);
  return out;
}

json MinMaxScaler::to_json() const { return {{"min", min_}, {"max", max_}}; }

MinMaxScaler MinMaxScaler::from_json(const json& j) {
  return from_ranges(j.at("min").get<std::vector<double>>(), j.at("max").get<std::vector<double>>());
}

MinMaxScaler MinMaxScaler::from_ranges(std::vector<double> min, std::vector<double> max) {
  if (min.size() != max.size()) throw InvalidInput("scaler: range size mismatch");
  MinMaxScaler s;
  s.min_ = std::move(min);
  s.max_ = std::move(max);
  return s;
}

// ---------------------------------------------------------------------------
// Built-in model families

namespace {

class ConstantClassifier final : public SuccessClassifier {
 public:
  explicit ConstantClassifier(double p) : p_(p) {}
  double probability(std::span<const double>) const override { return p_; }
  json to_json() const override { return {{"kind", "constant"}, {"probability", p_}}; }

 private:
  double p_;
};

class GbdtClassifier final : public SuccessClassifier {
 public:
  explicit GbdtClassifier(GradientBoostedTrees model) : model_(std::move(model)) {}
  double probability(std::span<const double> x) const override { return model_.predict(x); }
  json to_json() const override { return {{"kind", "gbdt"}, {"model", model_.to_json()}}; }

 private:
  GradientBoostedTrees model_;
};

class GbdtRegressor final : public CostRegressor {
 public:
  explicit GbdtRegressor(GradientBoostedTrees model) : model_(std::move(model)) {}
  double cost(std::span<const double> x) const override { return model_.predict(x); }
  json to_json() const override { return {{"kind", "gbdt"}, {"model", model_.to_json()}}; }

 private:
  GradientBoostedTrees model_;
};

class LinearClassifier final : public SuccessClassifier {
 public:
  explicit LinearClassifier(LinearModel model) : model_(std::move(model)) {}
  double probability(std::span<const double> x) const override { return model_.predict(x); }
  json to_json() const override { return {{"kind", "linear"}, {"model", model_.to_json()}}; }

 private:
  LinearModel model_;
};

class LinearRegressor final : public CostRegressor {
 public:
  explicit LinearRegressor(LinearModel model) : model_(std::move(model)) {}
  double cost(std::span<const double> x) const override { return model_.predict(x); }
  json to_json() const override { return {{"kind", "linear"}, {"model", model_.to_json()}}; }

 private:
  LinearModel model_;
};

std::shared_ptr<const SuccessClassifier> classifier_from_json(const json& j) {
  auto kind = j.at("kind").get<std::string>();
  if (kind == "constant") return std::make_shared<ConstantClassifier>(j.at("probability").get<double>());
  if (kind == "gbdt") return std::make_shared<GbdtClassifier>(GradientBoostedTrees::from_json(j.at("model")));
  if (kind == "linear") return std::make_shared<LinearClassifier>(LinearModel::from_json(j.at("model")));
  throw FormatError("model bundle: cannot load classifier of kind '" + kind + "'");
}

std::shared_ptr<const CostRegressor> regressor_from_json(const json& j) {
  auto kind = j.at("kind").get<std::string>();
  if (kind == "gbdt") return std::make_shared<GbdtRegressor>(GradientBoostedTrees::from_json(j.at("model")));
  if (kind == "linear") return std::make_shared<LinearRegressor>(LinearModel::from_json(j.at("model")));
  throw FormatError("model bundle: cannot load regressor of kind '" + kind + "'");
}

struct Design {
  DenseMatrix x;
  std::vector<double> success;
  std::vector<double> cost;
};

Design make_design(std::span<const TrainingRow> rows, std::span<const std::size_t> subset, std::size_t width) {
  Design d{DenseMatrix(subset.size(), width), {}, {}};
  d.success.reserve(subset.size());
  d.cost.reserve(subset.size());
  for (std::size_t r = 0; r < subset.size(); ++r) {
    const auto& row = rows[subset[r]];
    if (row.features.values.size() != width) throw TrainingError("train: feature width mismatch");
    if (row.success_label != 0 && row.success_label != 1) throw TrainingError("train: label must be 0 or 1");
    if (!(row.cost_label >= 0.0)) throw TrainingError("train: cost label must be non-negative");
    std::copy(row.features.values.begin(), row.features.values.end(), d.x.row(r).begin());
    d.success.push_back(static_cast<double>(row.success_label));
    d.cost.push_back(row.cost_label);
  }
  return d;
}

void scale_rows(DenseMatrix& x, const MinMaxScaler& scaler) {
  for (std::size_t i = 0; i < x.rows(); ++i) scaler.transform_in_place(x.row(i));
}

std::shared_ptr<const SuccessClassifier> fit_classifier(const DenseMatrix& x, std::span<const double> y,
                                                        const ModelConfig& config, bool& degenerate) {
  degenerate = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
  if (degenerate) return std::make_shared<ConstantClassifier>(y[0]);
  if (config.custom_classifier) return config.custom_classifier(x, y);
  if (config.family == ModelConfig::Family::kLinear) {
    LinearModel m(LinearModel::Objective::kLogistic, config.linear);
    m.fit(x, y);
    return std::make_shared<LinearClassifier>(std::move(m));
  }
  GradientBoostedTrees m(BoostLoss::kLogistic, config.gbdt);
  m.fit(x, y);
  return std::make_shared<GbdtClassifier>(std::move(m));
}

std::shared_ptr<const CostRegressor> fit_regressor(const DenseMatrix& x, std::span<const double> y,
                                                   const ModelConfig& config) {
  if (config.custom_regressor) return config.custom_regressor(x, y);
  if (config.family == ModelConfig::Family::kLinear) {
    LinearModel m(LinearModel::Objective::kSquared, config.linear);
    m.fit(x, y);
    return std::make_shared<LinearRegressor>(std::move(m));
  }
  GradientBoostedTrees m(BoostLoss::kSquared, config.gbdt);
  m.fit(x, y);
  return std::make_shared<GbdtRegressor>(std::move(m));
}

BatchMetrics score_models(const SuccessClassifier& cls, const CostRegressor& reg, const Design& scaled) {
  BatchMetrics m;
  m.rows = scaled.x.rows();
  if (m.rows == 0) return m;
  std::size_t correct = 0;
  double abs_err = 0.0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    double p = cls.probability(scaled.x.row(i));
    int predicted = p >= 0.5 ? 1 : 0;
    if (predicted == static_cast<int>(scaled.success[i])) ++correct;
    abs_err += std::abs(reg.cost(scaled.x.row(i)) - scaled.cost[i]);
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(m.rows);
  m.mae = abs_err / static_cast<double>(m.rows);
  return m;
}

}  // namespace

void ModelConfig::validate() const {
  std::vector<std::string> errors;
  if (gbdt.n_trees < 1) errors.push_back("model.n_trees must be >= 1");
  if (gbdt.max_depth < 1) errors.push_back("model.max_depth must be >= 1");
  if (!(gbdt.learning_rate > 0.0)) errors.push_back("model.learning_rate must be positive");
  if (!(gbdt.lambda >= 0.0)) errors.push_back("model.lambda must be >= 0");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    errors.push_back("model.holdout_fraction must lie in [0, 1)");
  }
  if (linear.epochs < 1) errors.push_back("model.linear_epochs must be >= 1");
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

// ---------------------------------------------------------------------------
// Bundle

PredictionPair ModelBundle::predict(const Embedding& embedding, std::size_t llm_index, int64_t input_tokens,
                                    const LLMProfile& llm) const {
  if (!trained()) throw StateError("predict: model bundle is not trained");
  if (embedding.dimension() != embedding_dim_) throw InvalidInput("predict: embedding dimension mismatch");
  auto features = build_features(embedding, llm_index, llm_count_);
  scaler_.transform_in_place(features.values);
  PredictionPair pair;
  pair.perf = std::clamp(classifier_->probability(features.values), 0.0, 1.0);
  double floor = (llm.price_input * input_tokens + llm.price_output).dollars();
  floor = std::max(floor, 1e-12);
  double raw = regressor_->cost(features.values);
  pair.cost = std::isfinite(raw) ? std::max(raw, floor) : floor;
  return pair;
}

double ModelBundle::success_probability(std::span<const double> raw_features) const {
  if (!trained()) throw StateError("model bundle is not trained");
  return std::clamp(classifier_->probability(scaler_.transform(raw_features)), 0.0, 1.0);
}

double ModelBundle::raw_cost(std::span<const double> raw_features) const {
  if (!trained()) throw StateError("model bundle is not trained");
  return regressor_->cost(scaler_.transform(raw_features));
}

json ModelBundle::to_json() const {
  if (!trained()) throw StateError("cannot serialize an untrained model bundle");
  json eval = {{"accuracy", eval_.accuracy},
               {"mae", eval_.mae},
               {"holdout_accuracy", eval_.holdout_accuracy ? json(*eval_.holdout_accuracy) : json(nullptr)},
               {"holdout_mae", eval_.holdout_mae ? json(*eval_.holdout_mae) : json(nullptr)},
               {"rows", eval_.rows},
               {"classifier_degenerate", eval_.classifier_degenerate},
               {"split_seed", eval_.split_seed}};
  return {{"format", "llmsched.model_bundle"},
          {"version", 1},
          {"embedding_dim", embedding_dim_},
          {"llm_count", llm_count_},
          {"scaler", scaler_.to_json()},
          {"classifier", classifier_->to_json()},
          {"regressor", regressor_->to_json()},
          {"eval", eval}};
}

ModelBundle ModelBundle::from_json(const json& j) {
  if (j.value("format", "") != "llmsched.model_bundle" || j.value("version", 0) != 1) {
    throw FormatError("model bundle: unsupported format or version");
  }
  try {
    ModelBundle b;
    b.embedding_dim_ = j.at("embedding_dim").get<std::size_t>();
    b.llm_count_ = j.at("llm_count").get<std::size_t>();
    b.scaler_ = MinMaxScaler::from_json(j.at("scaler"));
    b.classifier_ = classifier_from_json(j.at("classifier"));
    b.regressor_ = regressor_from_json(j.at("regressor"));
    const auto& e = j.at("eval");
    b.eval_.accuracy = e.at("accuracy").get<double>();
    b.eval_.mae = e.at("mae").get<double>();
    if (!e.at("holdout_accuracy").is_null()) b.eval_.holdout_accuracy = e.at("holdout_accuracy").get<double>();
    if (!e.at("holdout_mae").is_null()) b.eval_.holdout_mae = e.at("holdout_mae").get<double>();
    b.eval_.rows = e.at("rows").get<std::size_t>();
    b.eval_.classifier_degenerate = e.at("classifier_degenerate").get<bool>();
    b.eval_.split_seed = e.at("split_seed").get<uint64_t>();
    return b;
  } catch (const json::exception& e) {
    throw FormatError(std::string("model bundle: ") + e.what());
  }
}

void ModelBundle::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write model bundle " + path.string());
  out << to_json().dump() << '\n';
}

ModelBundle ModelBundle::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open model bundle " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("model bundle: ") + e.what());
  }
}

std::string ModelBundle::digest() const {
  if (!trained()) return "untrained";
  return to_hex(fnv1a64(to_json().dump()));
}

ModelBundle train(std::span<const TrainingRow> rows, const ModelConfig& config, std::size_t embedding_dim,
                  std::size_t llm_count) {
  if (rows.empty()) throw TrainingError("train: no rows");
  config.validate();
  const std::size_t width = embedding_dim + llm_count;

  ModelBundle bundle;
  bundle.embedding_dim_ = embedding_dim;
  bundle.llm_count_ = llm_count;
  bundle.eval_.split_seed = config.seed;

  std::vector<std::size_t> all(rows.size());
  std::iota(all.begin(), all.end(), 0);

  if (config.holdout_fraction > 0.0 && rows.size() >= 5) {
    std::vector<std::size_t> perm = all;
    std::mt19937_64 rng(config.seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto n_hold = std::max<std::size_t>(1, static_cast<std::size_t>(config.holdout_fraction *
                                                                   static_cast<double>(rows.size())));
    std::span<const std::size_t> hold(perm.data(), n_hold);
    std::span<const std::size_t> fit(perm.data() + n_hold, perm.size() - n_hold);
    Design fit_d = make_design(rows, fit, width);
    Design hold_d = make_design(rows, hold, width);
    MinMaxScaler s;
    s.fit(fit_d.x);
    scale_rows(fit_d.x, s);
    scale_rows(hold_d.x, s);
    bool degenerate = false;
    auto cls = fit_classifier(fit_d.x, fit_d.success, config, degenerate);
    auto reg = fit_regressor(fit_d.x, fit_d.cost, config);
    auto m = score_models(*cls, *reg, hold_d);
    bundle.eval_.holdout_accuracy = m.accuracy;
    bundle.eval_.holdout_mae = m.mae;
  }

  Design d = make_design(rows, all, width);
  bundle.scaler_.fit(d.x);
  scale_rows(d.x, bundle.scaler_);
  bool degenerate = false;
  bundle.classifier_ = fit_classifier(d.x, d.success, config, degenerate);
  bundle.regressor_ = fit_regressor(d.x, d.cost, config);
  auto m = score_models(*bundle.classifier_, *bundle.regressor_, d);
  bundle.eval_.accuracy = m.accuracy;
  bundle.eval_.mae = m.mae;
  bundle.eval_.rows = rows.size();
  bundle.eval_.classifier_degenerate = degenerate;
  return bundle;
}

ModelBundle retrain(const ModelBundle& current, std::span<const TrainingRow> rows, const ModelConfig& config,
                    bool classifier, bool regressor) {
  if (!classifier && !regressor) return current;
  if (!current.trained()) throw StateError("retrain: current bundle is not trained");
  if (classifier && regressor) return train(rows, config, current.embedding_dim_, current.llm_count_);
  if (rows.empty()) throw TrainingError("retrain: no rows");

  std::vector<std::size_t> all(rows.size());
  std::iota(all.begin(), all.end(), 0);
  Design d = make_design(rows, all, current.embedding_dim_ + current.llm_count_);
  scale_rows(d.x, current.scaler_);

  ModelBundle next = current;
  if (classifier) {
    bool degenerate = false;
    next.classifier_ = fit_classifier(d.x, d.success, config, degenerate);
    next.eval_.classifier_degenerate = degenerate;
  } else {
    next.regressor_ = fit_regressor(d.x, d.cost, config);
  }
  auto m = score_models(*next.classifier_, *next.regressor_, d);
  next.eval_.accuracy = m.accuracy;
  next.eval_.mae = m.mae;
  next.eval_.rows = rows.size();
  next.eval_.holdout_accuracy.reset();
  next.eval_.holdout_mae.reset();
  return next;
}

BatchMetrics evaluate(const ModelBundle& bundle, std::span<const TrainingRow> rows) {
  if (!bundle.trained()) throw StateError("evaluate: model bundle is not trained");
  BatchMetrics m;
  m.rows = rows.size();
  if (rows.empty()) return m;
  std::size_t correct = 0;
  double abs_err = 0.0;
  for (const auto& row : rows) {
    int predicted = bundle.success_probability(row.features.values) >= 0.5 ? 1 : 0;
    if (predicted == row.success_label) ++correct;
    abs_err += std::abs(bundle.raw_cost(row.features.values) - row.cost_label);
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(rows.size());
  m.mae = abs_err / static_cast<double>(rows.size());
  return m;
}

}  // namespace llmsched
