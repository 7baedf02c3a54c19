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

#ifndef SYNTHPRIV_LINEAR_MODEL_H_
#define SYNTHPRIV_LINEAR_MODEL_H_

#include <cstddef>
#include <span>
#include <vector>

#include "synthpriv/random_forest.h"

namespace synthpriv {

// Least-squares regression of the sensitive attribute on centred known
// attributes, with the Gaussian residual model an attacker uses as its
// posterior over the sensitive value.
struct LinearAttackModel {
  std::vector<double> coefficients;
  std::vector<double> feature_offsets;
  double target_offset = 0.0;
  // sum of squared residuals / (rows - columns)
  double sigma_hat_sq = 0.0;
  std::size_t rows = 0;

  double Predict(std::span<const double> known) const;
};

// Solves the normal equations (with 1e-9 added to the diagonal) on centred
// data. Requires rows >= columns + 2 (kInsufficientRows); throws
// kRankDeficient if the jittered system still cannot be solved.
LinearAttackModel FitLinear(const FeatureMatrix& known,
                            std::span<const double> sensitive);

// Normal(Predict(known), sigma_hat_sq) density at `candidate`, with the
// variance floored at 1e-12.
double PosteriorDensity(const LinearAttackModel& model,
                        std::span<const double> known, double candidate);

}  // namespace synthpriv

#endif  // SYNTHPRIV_LINEAR_MODEL_H_
