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

#include "synthpriv/linear_model.h"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "synthpriv/error.h"

namespace synthpriv {

double LinearAttackModel::Predict(std::span<const double> known) const {
  double value = target_offset;
  for (std::size_t c = 0; c < coefficients.size(); ++c) {
    value += (known[c] - feature_offsets[c]) * coefficients[c];
  }
  return value;
}

LinearAttackModel FitLinear(const FeatureMatrix& known,
                            std::span<const double> sensitive) {
  const std::size_t n = known.size();
  if (n != sensitive.size()) {
    throw Error(ErrorCode::kInvalidArgument, "row count mismatch");
  }
  const std::size_t p = n == 0 ? 0 : known.front().size();
  if (n < p + 2) {
    throw Error(ErrorCode::kInsufficientRows,
                "linear fit needs rows >= columns + 2");
  }
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (known[r].size() != p) {
      throw Error(ErrorCode::kInvalidArgument, "ragged feature matrix");
    }
    for (std::size_t c = 0; c < p; ++c) x(r, c) = known[r][c];
    y(r) = sensitive[r];
  }
  LinearAttackModel model;
  model.rows = n;
  const Eigen::RowVectorXd offsets = x.colwise().mean();
  x.rowwise() -= offsets;
  model.target_offset = y.mean();
  y.array() -= model.target_offset;

  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += 1e-9;
  const Eigen::VectorXd rhs = x.transpose() * y;
  Eigen::LDLT<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kRankDeficient, "normal equations not solvable");
  }
  const Eigen::VectorXd w = solver.solve(rhs);
  if (!w.allFinite()) {
    throw Error(ErrorCode::kRankDeficient, "non-finite coefficients");
  }
  const Eigen::VectorXd residual = y - x * w;
  model.sigma_hat_sq =
      residual.squaredNorm() / static_cast<double>(n - p);
  model.coefficients.assign(w.data(), w.data() + p);
  model.feature_offsets.assign(offsets.data(), offsets.data() + p);
  return model;
}

double PosteriorDensity(const LinearAttackModel& model,
                        std::span<const double> known, double candidate) {
  const double variance = std::max(model.sigma_hat_sq, 1e-12);
  const double diff = candidate - model.Predict(known);
  return std::exp(-0.5 * diff * diff / variance) /
         std::sqrt(2.0 * std::numbers::pi * variance);
}

}  // namespace synthpriv
