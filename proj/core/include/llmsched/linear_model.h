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

#include <span>
#include <vector>

#include "json.hpp"
#include "llmsched/dense_matrix.h"

namespace llmsched {

struct LinearParams {
  int epochs = 400;
  double learning_rate = 0.5;
  double l2 = 1e-4;
};

// Full-batch gradient descent; deterministic (zero init, fixed schedule).
// kLogistic fits log-loss and predicts a probability, kSquared fits
// squared error on an internally rescaled target.
class LinearModel {
 public:
  enum class Objective { kLogistic, kSquared };

  LinearModel() = default;
  LinearModel(Objective objective, LinearParams params) : objective_(objective), params_(params) {}

  void fit(const DenseMatrix& x, std::span<const double> y);
  double predict(std::span<const double> x) const;
  bool fitted() const { return fitted_; }

  nlohmann::json to_json() const;
  static LinearModel from_json(const nlohmann::json& j);

 private:
  Objective objective_ = Objective::kSquared;
  LinearParams params_;
  std::vector<double> weights_;
  double bias_ = 0.0;
  double target_scale_ = 1.0;
  bool fitted_ = false;
};

}  // namespace llmsched
