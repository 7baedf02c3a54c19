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

#ifndef SYNTHPRIV_RANDOM_FOREST_H_
#define SYNTHPRIV_RANDOM_FOREST_H_

#include <cstddef>
#include <span>
#include <vector>

#include "synthpriv/random.h"

namespace synthpriv {

using FeatureMatrix = std::vector<std::vector<double>>;

struct ForestParams {
  int n_trees = 100;
  // 0 selects floor(sqrt(d)), at least 1.
  int max_features = 0;
  bool bootstrap = true;
  // 0 means unlimited.
  int max_depth = 0;
  int min_leaf = 1;

  void Validate() const;
};

// Bagged CART classifier with Gini splits at midpoints between sorted unique
// feature values. Labels are small non-negative integers.
class RandomForest {
 public:
  // Throws kInvalidArgument when |X| != |y|, |X| < 2 or rows are ragged.
  // A single-class input yields a constant classifier with degenerate() set.
  static RandomForest Fit(const FeatureMatrix& x, const std::vector<int>& y,
                          const ForestParams& params, Rng& rng);

  // Majority vote over trees; ties go to the lowest class index.
  int Predict(std::span<const double> x) const;
  std::vector<int> Predict(const FeatureMatrix& x) const;

  bool degenerate() const { return degenerate_; }
  int num_classes() const { return num_classes_; }
  std::size_t num_trees() const { return trees_.size(); }

 private:
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;
  };
  using Tree = std::vector<Node>;

  static int PredictTree(const Tree& tree, std::span<const double> x);

  std::vector<Tree> trees_;
  int num_classes_ = 0;
  int constant_label_ = 0;
  bool degenerate_ = false;
  std::size_t num_features_ = 0;

  friend class TreeBuilder;
};

}  // namespace synthpriv

#endif  // SYNTHPRIV_RANDOM_FOREST_H_
