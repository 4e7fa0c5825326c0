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

#include "llmsched/gbdt.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "llmsched/errors.h"

namespace llmsched {

using nlohmann::json;

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// Mean computed incrementally so that a constant series returns the constant exactly.
double stable_mean(std::span<const double> v) {
  double mean = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) mean += (v[i] - mean) / static_cast<double>(i + 1);
  return mean;
}

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

// Gains within a relative 1e-12 are ties; ties go to the lower feature, then
// the lower threshold, so the result does not depend on scan order.
bool better_split(double gain, int feature, double threshold, const SplitCandidate& best) {
  if (best.feature < 0) return true;
  double tol = 1e-12 * std::max(1.0, std::abs(best.gain));
  if (gain > best.gain + tol) return true;
  if (gain < best.gain - tol) return false;
  return feature < best.feature || (feature == best.feature && threshold < best.threshold);
}

struct GrowNode {
  double g = 0.0;
  double h = 0.0;
  std::size_t count = 0;
  int tree_index = 0;  // position in the output node vector
  SplitCandidate best;
};

}  // namespace

double RegressionTree::predict(std::span<const double> x) const {
  int idx = 0;
  for (;;) {
    const TreeNode& n = nodes_[static_cast<std::size_t>(idx)];
    if (n.feature < 0) return n.value;
    idx = x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
  }
}

void GradientBoostedTrees::fit(const DenseMatrix& x, std::span<const double> y) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n == 0) throw TrainingError("gbdt: no training rows");
  if (y.size() != n) throw TrainingError("gbdt: label count does not match rows");

  std::vector<double> target(y.begin(), y.end());
  trees_.clear();
  target_scale_ = 1.0;
  if (loss_ == BoostLoss::kLogistic) {
    double mean = std::clamp(stable_mean(target), 1e-6, 1.0 - 1e-6);
    base_score_ = std::log(mean / (1.0 - mean));
  } else {
    std::vector<double> abs_y(n);
    for (std::size_t i = 0; i < n; ++i) abs_y[i] = std::abs(target[i]);
    double scale = stable_mean(abs_y);
    if (scale > 0.0 && std::isfinite(scale)) {
      target_scale_ = scale;
      for (double& t : target) t /= scale;
    }
    base_score_ = stable_mean(target);
  }

  // Presort every non-constant column once.
  std::vector<std::size_t> usable;
  std::vector<std::vector<uint32_t>> order;
  std::vector<std::vector<double>> sorted;  // column values in `order`
  std::vector<std::size_t> head_end;         // first rank above the column minimum
  for (std::size_t j = 0; j < p; ++j) {
    double lo = x(0, j);
    double hi = lo;
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, x(i, j));
      hi = std::max(hi, x(i, j));
    }
    if (lo == hi) continue;
    std::vector<uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    std::stable_sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) { return x(a, j) < x(b, j); });
    std::vector<double> vals(n);
    for (std::size_t r = 0; r < n; ++r) vals[r] = x(idx[r], j);
    std::size_t head = 1;
    while (vals[head] == vals[0]) ++head;
    usable.push_back(j);
    head_end.push_back(head);
    order.push_back(std::move(idx));
    sorted.push_back(std::move(vals));
  }

  std::vector<double> margin(n, base_score_);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  std::vector<int> node_of(n);
  const double lambda = params_.lambda;
  auto score = [lambda](double g, double h) { return g * g / (h + lambda); };

  for (int t = 0; t < params_.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (loss_ == BoostLoss::kLogistic) {
        double prob = sigmoid(margin[i]);
        grad[i] = prob - target[i];
        hess[i] = std::max(prob * (1.0 - prob), 1e-16);
      } else {
        grad[i] = margin[i] - target[i];
        hess[i] = 1.0;
      }
    }

    std::vector<TreeNode> out(1);
    std::vector<GrowNode> level(1);
    std::fill(node_of.begin(), node_of.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      level[0].g += grad[i];
      level[0].h += hess[i];
    }
    level[0].count = n;

    for (int depth = 0; depth < params_.max_depth && !level.empty(); ++depth) {
      const std::size_t nl = level.size();
      std::vector<double> g_above(nl);
      std::vector<double> h_above(nl);
      std::vector<double> prev(nl);
      std::vector<char> seen(nl);
      std::vector<std::size_t> cnt(nl);
      // Split between `lower` and `upper`; (gr, hr) are the sums at or above upper.
      auto consider = [&](GrowNode& gn, double gr, double hr, double lower, double upper, std::size_t j) {
        double gleft = gn.g - gr;
        double hleft = gn.h - hr;
        if (hleft < params_.min_child_weight || hr < params_.min_child_weight) return;
        double gain = 0.5 * (score(gleft, hleft) + score(gr, hr) - score(gn.g, gn.h));
        if (!(gain > params_.min_split_gain)) return;
        double thr = lower + (upper - lower) / 2.0;
        if (!(thr > lower)) thr = upper;
        if (better_split(gain, static_cast<int>(j), thr, gn.best)) gn.best = {gain, static_cast<int>(j), thr};
      };
      // Columns are scanned from the top down over rows above the column
      // minimum only; the minimum block of each node is the node total less
      // everything above it. Embedding columns are mostly at their minimum.
      for (std::size_t u = 0; u < usable.size(); ++u) {
        const std::size_t j = usable[u];
        const auto& ord = order[u];
        const auto& vals = sorted[u];
        std::fill(g_above.begin(), g_above.end(), 0.0);
        std::fill(h_above.begin(), h_above.end(), 0.0);
        std::fill(cnt.begin(), cnt.end(), 0);
        std::fill(seen.begin(), seen.end(), 0);
        for (std::size_t r = n; r-- > head_end[u];) {
          const uint32_t i = ord[r];
          int node = node_of[i];
          if (node < 0) continue;
          auto k = static_cast<std::size_t>(node);
          double v = vals[r];
          if (seen[k] && v < prev[k]) consider(level[k], g_above[k], h_above[k], v, prev[k], j);
          g_above[k] += grad[i];
          h_above[k] += hess[i];
          ++cnt[k];
          prev[k] = v;
          seen[k] = 1;
        }
        for (std::size_t k = 0; k < nl; ++k) {
          if (seen[k] && cnt[k] < level[k].count) consider(level[k], g_above[k], h_above[k], vals[0], prev[k], j);
        }
      }

      // Materialize splits; rows of unsplit nodes are retired (node_of = -1).
      std::vector<GrowNode> next;
      std::vector<int> left_of(nl, -1);
      for (std::size_t k = 0; k < nl; ++k) {
        GrowNode& gn = level[k];
        TreeNode& tn = out[static_cast<std::size_t>(gn.tree_index)];
        if (gn.best.feature < 0) {
          tn.value = -gn.g / (gn.h + lambda) * params_.learning_rate;
          continue;
        }
        tn.feature = gn.best.feature;
        tn.threshold = gn.best.threshold;
        tn.left = static_cast<int>(out.size());
        tn.right = tn.left + 1;
        left_of[k] = static_cast<int>(next.size());
        GrowNode l;
        l.tree_index = tn.left;
        GrowNode r;
        r.tree_index = tn.right;
        next.push_back(l);
        next.push_back(r);
        out.emplace_back();
        out.emplace_back();
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (node_of[i] < 0) continue;
        auto k = static_cast<std::size_t>(node_of[i]);
        if (left_of[k] < 0) {
          node_of[i] = -1;
          continue;
        }
        const TreeNode& tn = out[static_cast<std::size_t>(level[k].tree_index)];
        int child = left_of[k] + (x(i, static_cast<std::size_t>(tn.feature)) < tn.threshold ? 0 : 1);
        node_of[i] = child;
        next[static_cast<std::size_t>(child)].g += grad[i];
        next[static_cast<std::size_t>(child)].h += hess[i];
        ++next[static_cast<std::size_t>(child)].count;
      }
      level = std::move(next);
    }
    for (const GrowNode& gn : level) {
      out[static_cast<std::size_t>(gn.tree_index)].value = -gn.g / (gn.h + lambda) * params_.learning_rate;
    }

    RegressionTree tree(std::move(out));
    for (std::size_t i = 0; i < n; ++i) margin[i] += tree.predict(x.row(i));
    trees_.push_back(std::move(tree));
  }
  fitted_ = true;
}

double GradientBoostedTrees::raw_predict(std::span<const double> x) const {
  double m = base_score_;
  for (const auto& tree : trees_) m += tree.predict(x);
  return m;
}

double GradientBoostedTrees::predict(std::span<const double> x) const {
  double m = raw_predict(x);
  if (loss_ == BoostLoss::kLogistic) return sigmoid(m);
  return m * target_scale_;
}

json GradientBoostedTrees::to_json() const {
  json trees = json::array();
  for (const auto& tree : trees_) {
    json nodes = json::array();
    for (const auto& nd : tree.nodes()) {
      nodes.push_back(json::array({nd.feature, nd.threshold, nd.left, nd.right, nd.value}));
    }
    trees.push_back(std::move(nodes));
  }
  return {{"loss", loss_ == BoostLoss::kLogistic ? "logistic" : "squared"},
          {"params",
           {{"n_trees", params_.n_trees},
            {"max_depth", params_.max_depth},
            {"learning_rate", params_.learning_rate},
            {"lambda", params_.lambda},
            {"min_child_weight", params_.min_child_weight},
            {"min_split_gain", params_.min_split_gain}}},
          {"base_score", base_score_},
          {"target_scale", target_scale_},
          {"trees", std::move(trees)}};
}

GradientBoostedTrees GradientBoostedTrees::from_json(const json& j) {
  GbdtParams params;
  const auto& pj = j.at("params");
  params.n_trees = pj.at("n_trees").get<int>();
  params.max_depth = pj.at("max_depth").get<int>();
  params.learning_rate = pj.at("learning_rate").get<double>();
  params.lambda = pj.at("lambda").get<double>();
  params.min_child_weight = pj.at("min_child_weight").get<double>();
  params.min_split_gain = pj.at("min_split_gain").get<double>();
  GradientBoostedTrees model(j.at("loss").get<std::string>() == "logistic" ? BoostLoss::kLogistic
                                                                         : BoostLoss::kSquared,
                             params);
  model.base_score_ = j.at("base_score").get<double>();
  model.target_scale_ = j.at("target_scale").get<double>();
  for (const auto& tj : j.at("trees")) {
    std::vector<TreeNode> nodes;
    for (const auto& nj : tj) {
      nodes.push_back({nj.at(0).get<int>(), nj.at(1).get<double>(), nj.at(2).get<int>(),
                       nj.at(3).get<int>(), nj.at(4).get<double>()});
    }
    model.trees_.emplace_back(std::move(nodes));
  }
  model.fitted_ = true;
  return model;
}

}  // namespace llmsched
