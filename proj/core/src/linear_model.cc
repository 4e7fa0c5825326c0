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

#include "llmsched/linear_model.h"

#include <cmath>

#include "llmsched/errors.h"

namespace llmsched {

using nlohmann::json;

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void LinearModel::fit(const DenseMatrix& x, std::span<const double> y) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n == 0) throw TrainingError("linear model: no training rows");
  if (y.size() != n) throw TrainingError("linear model: label count does not match rows");

  std::vector<double> target(y.begin(), y.end());
  target_scale_ = 1.0;
  if (objective_ == Objective::kSquared) {
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += (std::abs(target[i]) - scale) / static_cast<double>(i + 1);
    if (scale > 0.0) {
      target_scale_ = scale;
      for (double& t : target) t /= scale;
    }
  }

  weights_.assign(p, 0.0);
  bias_ = 0.0;
  std::vector<double> gw(p);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int epoch = 0; epoch < params_.epochs; ++epoch) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto row = x.row(i);
      double z = bias_;
      for (std::size_t j = 0; j < p; ++j) z += weights_[j] * row[j];
      double pred = objective_ == Objective::kLogistic ? sigmoid(z) : z;
      double err = pred - target[i];
      for (std::size_t j = 0; j < p; ++j) gw[j] += err * row[j];
      gb += err;
    }
    for (std::size_t j = 0; j < p; ++j) {
      weights_[j] -= params_.learning_rate * (gw[j] * inv_n + params_.l2 * weights_[j]);
    }
    bias_ -= params_.learning_rate * gb * inv_n;
  }
  fitted_ = true;
}

double LinearModel::predict(std::span<const double> x) const {
  double z = bias_;
  for (std::size_t j = 0; j < weights_.size() && j < x.size(); ++j) z += weights_[j] * x[j];
  return objective_ == Objective::kLogistic ? sigmoid(z) : z * target_scale_;
}

json LinearModel::to_json() const {
  return {{"objective", objective_ == Objective::kLogistic ? "logistic" : "squared"},
          {"params",
           {{"epochs", params_.epochs}, {"learning_rate", params_.learning_rate}, {"l2", params_.l2}}},
          {"weights", weights_},
          {"bias", bias_},
          {"target_scale", target_scale_}};
}

LinearModel LinearModel::from_json(const json& j) {
  LinearParams params;
  params.epochs = j.at("params").at("epochs").get<int>();
  params.learning_rate = j.at("params").at("learning_rate").get<double>();
  params.l2 = j.at("params").at("l2").get<double>();
  LinearModel m(j.at("objective").get<std::string>() == "logistic" ? Objective::kLogistic
                                                                  : Objective::kSquared,
                params);
  m.weights_ = j.at("weights").get<std::vector<double>>();
  m.bias_ = j.at("bias").get<double>();
  m.target_scale_ = j.at("target_scale").get<double>();
  m.fitted_ = true;
  return m;
}

}  // namespace llmsched
