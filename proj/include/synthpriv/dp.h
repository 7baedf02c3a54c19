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

#ifndef SYNTHPRIV_DP_H_
#define SYNTHPRIV_DP_H_

#include <cstddef>
#include <span>
#include <vector>

#include "synthpriv/random.h"

namespace synthpriv {

// Total epsilon plus the share of it spent on choosing the network
// structure; the rest is split evenly over the noisy conditional tables.
struct PrivacyBudget {
  double epsilon_total = 1.0;
  double structure_fraction = 0.5;

  double structure_epsilon() const {
    return epsilon_total * structure_fraction;
  }
  double tables_epsilon() const {
    return epsilon_total * (1.0 - structure_fraction);
  }
  // Throws kInvalidArgument.
  void Validate() const;
};

// One draw from Laplace(0, scale) by inverting the CDF of a uniform draw.
// Throws kInvalidScale for non-positive or non-finite scale.
double LaplaceNoise(double scale, Rng& rng);

// Selection probabilities proportional to exp(epsilon * score /
// (2 * sensitivity)), computed after subtracting the maximum score.
std::vector<double> ExponentialMechanismWeights(std::span<const double> scores,
                                                double sensitivity,
                                                double epsilon);

// Samples an index from ExponentialMechanismWeights. Throws kEmptyScores,
// kInvalidSensitivity, or kInvalidArgument for negative epsilon or
// non-finite scores.
std::size_t ExponentialMechanism(std::span<const double> scores,
                                 double sensitivity, double epsilon, Rng& rng);

// Sensitivity of the empirical mutual information between a child and its
// parent set over n records. `binary` selects the
// tighter bound that holds when both sides are binary.
double MutualInformationSensitivity(std::size_t n, bool binary);

}  // namespace synthpriv

#endif  // SYNTHPRIV_DP_H_
