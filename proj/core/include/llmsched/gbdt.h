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
#include <span>
#include <vector>

#include "json.hpp"
#include "llmsched/dense_matrix.h"

namespace llmsched {

struct GbdtParams {
  int n_trees = 100;
  int max_depth = 4;
  double learning_rate = 0.1;
  double lambda = 1.0;            // L2 penalty on leaf weights
  double min_child_weight = 0.1;  // minimum hessian sum per child
  double min_split_gain = 0.0;
};

enum class BoostLoss { kLogistic, kSquared };

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  // Rows with x[feature] < threshold descend left.
  double predict(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }

 private:
  std::vector<TreeNode> nodes_;
};

// Second-order gradient boosting over depth-limited regression trees.
// Training is exact-greedy over presorted columns and fully deterministic.
class GradientBoostedTrees {
 public:
  GradientBoostedTrees() = default;
  GradientBoostedTrees(BoostLoss loss, GbdtParams params) : loss_(loss), params_(params) {}

  void fit(const DenseMatrix& x, std::span<const double> y);

  // Margin for logistic loss, target value for squared loss.
  double raw_predict(std::span<const double> x) const;
  // Probability for logistic loss, target value for squared loss.
  double predict(std::span<const double> x) const;

  bool fitted() const { return fitted_; }
  BoostLoss loss() const { return loss_; }
  double base_score() const { return base_score_; }
  double target_scale() const { return target_scale_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }

  nlohmann::json to_json() const;
  static GradientBoostedTrees from_json(const nlohmann::json& j);

 private:
  BoostLoss loss_ = BoostLoss::kSquared;
  GbdtParams params_;
  double base_score_ = 0.0;
  double target_scale_ = 1.0;
  std::vector<RegressionTree> trees_;
  bool fitted_ = false;
};

}  // namespace llmsched
