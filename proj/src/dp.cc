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

#include "synthpriv/dp.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "synthpriv/error.h"

namespace synthpriv {

void PrivacyBudget::Validate() const {
  if (!(epsilon_total > 0.0) || !std::isfinite(epsilon_total)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }
  if (!(structure_fraction > 0.0 && structure_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "structure_fraction must lie in (0, 1)");
  }
}

double LaplaceNoise(double scale, Rng& rng) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::kInvalidScale, "Laplace scale must be positive");
  }
  double u = 0.0;
  do {
    u = UniformUnit(rng) - 0.5;
  } while (u == -0.5);
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

std::vector<double> ExponentialMechanismWeights(std::span<const double> scores,
                                                double sensitivity,
                                                double epsilon) {
  if (scores.empty()) {
    throw Error(ErrorCode::kEmptyScores, "no candidates");
  }
  if (!(sensitivity > 0.0) || !std::isfinite(sensitivity)) {
    throw Error(ErrorCode::kInvalidSensitivity,
                "sensitivity must be positive");
  }
  if (!(epsilon >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be >= 0");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite score");
    }
  }
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> weights(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    weights[i] = std::exp(epsilon * (scores[i] - top) / (2.0 * sensitivity));
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
  return weights;
}

std::size_t ExponentialMechanism(std::span<const double> scores,
                                 double sensitivity, double epsilon, Rng& rng) {
  const std::vector<double> weights =
      ExponentialMechanismWeights(scores, sensitivity, epsilon);
  std::vector<double> cdf(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cdf.begin());
  return DrawFromCdf(cdf, rng);
}

double MutualInformationSensitivity(std::size_t n, bool binary) {
  const double m = static_cast<double>(n);
  if (n < 2) return std::log(2.0);
  if (binary) {
    return std::log(m) / m + (m - 1.0) / m * std::log(m / (m - 1.0));
  }
  return 2.0 / m * std::log((m + 1.0) / 2.0) +
         (m - 1.0) / m * std::log((m + 1.0) / (m - 1.0));
}

}  // namespace synthpriv
