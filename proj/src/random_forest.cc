// Copyright 2026 The SynthPriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "synthpriv/random_forest.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "synthpriv/error.h"

namespace synthpriv {

void ForestParams::Validate() const {
  if (n_trees < 1) throw Error(ErrorCode::kInvalidArgument, "n_trees < 1");
  if (max_features < 0 || max_depth < 0 || min_leaf < 1) {
    throw Error(ErrorCode::kInvalidArgument, "bad forest parameters");
  }
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, const std::vector<int>& y,
              int num_classes, const ForestParams& params,
              std::size_t max_features, Rng& rng)
      : x_(x),
        y_(y),
        num_classes_(num_classes),
        params_(params),
        max_features_(max_features),
        rng_(rng),
        features_(x.front().size()) {
    for (std::size_t f = 0; f < features_.size(); ++f) features_[f] = f;
  }

  RandomForest::Tree Build(std::vector<std::size_t> rows) {
    tree_.clear();
    Grow(rows, 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double score = -1.0;
  };

  int Majority(const std::vector<std::size_t>& counts) const {
    int best = 0;
    for (int c = 1; c < num_classes_; ++c) {
      if (counts[c] > counts[best]) best = c;
    }
    return best;
  }

  int Grow(const std::vector<std::size_t>& rows, int depth) {
    const int id = static_cast<int>(tree_.size());
    tree_.emplace_back();
    std::vector<std::size_t> counts(num_classes_, 0);
    for (std::size_t r : rows) ++counts[y_[r]];
    tree_[id].label = Majority(counts);

    const bool pure = counts[tree_[id].label] == rows.size();
    const bool too_small =
        rows.size() < 2 * static_cast<std::size_t>(params_.min_leaf);
    const bool too_deep = params_.max_depth > 0 && depth >= params_.max_depth;
    if (pure || too_small || too_deep) return id;

    const Split split = FindSplit(rows, counts);
    if (!split.found) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) {
      (x_[r][split.feature] <= split.threshold ? left : right).push_back(r);
    }
    tree_[id].feature = static_cast<int>(split.feature);
    tree_[id].threshold = split.threshold;
    const int l = Grow(left, depth + 1);
    tree_[id].left = l;
    const int r = Grow(right, depth + 1);
    tree_[id].right = r;
    return id;
  }

  // Features are visited in random order; constant ones do not count toward
  // max_features, so a split is found whenever one exists.
  Split FindSplit(const std::vector<std::size_t>& rows,
                  const std::vector<std::size_t>& counts) {
    const std::size_t d = features_.size();
    Split best;
    std::size_t visited = 0;
    std::vector<std::pair<double, int>> column(rows.size());
    for (std::size_t i = 0; i < d && visited < max_features_; ++i) {
      const std::size_t j = i + UniformIndex(d - i, rng_);
      std::swap(features_[i], features_[j]);
      const std::size_t f = features_[i];
      for (std::size_t k = 0; k < rows.size(); ++k) {
        column[k] = {x_[rows[k]][f], y_[rows[k]]};
      }
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;
      ++visited;
      EvaluateFeature(f, column, counts, best);
    }
    return best;
  }

  // Maximises sum_c nl_c^2 / nl + sum_c nr_c^2 / nr, which is minimising the
  // size-weighted Gini impurity of the children.
  void EvaluateFeature(std::size_t feature,
                       const std::vector<std::pair<double, int>>& column,
                       const std::vector<std::size_t>& counts, Split& best) {
    const std::size_t n = column.size();
    std::vector<double> left(num_classes_, 0.0);
    std::vector<double> right(counts.begin(), counts.end());
    double left_sq = 0.0;
    double right_sq = 0.0;
    for (double c : right) right_sq += c * c;
    const std::size_t min_leaf = static_cast<std::size_t>(params_.min_leaf);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const int c = column[i].second;
      left_sq += 2.0 * left[c] + 1.0;
      right_sq -= 2.0 * right[c] - 1.0;
      left[c] += 1.0;
      right[c] -= 1.0;
      if (column[i].first == column[i + 1].first) continue;
      const std::size_t nl = i + 1;
      const std::size_t nr = n - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double score = left_sq / static_cast<double>(nl) +
                           right_sq / static_cast<double>(nr);
      if (score > best.score) {
        best.found = true;
        best.score = score;
        best.feature = feature;
        double mid = 0.5 * (column[i].first + column[i + 1].first);
        if (!(mid < column[i + 1].first)) mid = column[i].first;
        best.threshold = mid;
      }
    }
  }

  const FeatureMatrix& x_;
  const std::vector<int>& y_;
  int num_classes_;
  const ForestParams& params_;
  std::size_t max_features_;
  Rng& rng_;
  std::vector<std::size_t> features_;
  RandomForest::Tree tree_;
};

RandomForest RandomForest::Fit(const FeatureMatrix& x,
                               const std::vector<int>& y,
                               const ForestParams& params, Rng& rng) {
  params.Validate();
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "forest needs >= 2 rows and one label per row");
  }
  const std::size_t d = x.front().size();
  for (const auto& row : x) {
    if (row.size() != d) {
      throw Error(ErrorCode::kInvalidArgument, "ragged feature matrix");
    }
  }
  RandomForest forest;
  forest.num_features_ = d;
  int max_label = 0;
  for (int label : y) {
    if (label < 0) throw Error(ErrorCode::kInvalidArgument, "negative label");
    max_label = std::max(max_label, label);
  }
  forest.num_classes_ = max_label + 1;
  if (std::all_of(y.begin(), y.end(), [&](int v) { return v == y.front(); })) {
    forest.degenerate_ = true;
    forest.constant_label_ = y.front();
    return forest;
  }
  if (d == 0) {
    throw Error(ErrorCode::kInvalidArgument, "forest needs >= 1 feature");
  }

  std::size_t max_features =
      params.max_features > 0
          ? static_cast<std::size_t>(params.max_features)
          : static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d))));
  max_features = std::clamp<std::size_t>(max_features, 1, d);

  const std::size_t n = x.size();
  forest.trees_.reserve(static_cast<std::size_t>(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    Rng tree_rng(rng());
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
      rows[i] = params.bootstrap ? UniformIndex(n, tree_rng) : i;
    }
    TreeBuilder builder(x, y, forest.num_classes_, params, max_features,
                        tree_rng);
    forest.trees_.push_back(builder.Build(std::move(rows)));
  }
  return forest;
}

int RandomForest::PredictTree(const Tree& tree, std::span<const double> x) {
  int node = 0;
  while (tree[node].feature >= 0) {
    node = x[tree[node].feature] <= tree[node].threshold ? tree[node].left
                                                         : tree[node].right;
  }
  return tree[node].label;
}

int RandomForest::Predict(std::span<const double> x) const {
  if (degenerate_) return constant_label_;
  if (x.size() != num_features_) {
    throw Error(ErrorCode::kInvalidArgument, "feature length mismatch");
  }
  std::vector<int> votes(num_classes_, 0);
  for (const auto& tree : trees_) ++votes[PredictTree(tree, x)];
  int best = 0;
  for (int c = 1; c < num_classes_; ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return best;
}

std::vector<int> RandomForest::Predict(const FeatureMatrix& x) const {
  std::vector<int> out;
  out.reserve(x.size());
  for (const auto& row : x) out.push_back(Predict(row));
  return out;
}

}  // namespace synthpriv
