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

#ifndef SYNTHPRIV_FEATURES_H_
#define SYNTHPRIV_FEATURES_H_

#include <cstddef>
#include <string_view>
#include <vector>

#include "synthpriv/dataset.h"

namespace synthpriv {

enum class FeatureSet { kNaive, kHist, kCorr };

std::string_view FeatureSetName(FeatureSet set);
// Accepts "naive", "hist", "corr" (case-insensitive, optional "F_" prefix).
// Throws kInvalidArgument.
FeatureSet ParseFeatureSet(std::string_view name);

struct FeatureVector {
  std::vector<double> values;
  FeatureSet set_id = FeatureSet::kNaive;
};

// Per continuous attribute: mean, median, population variance. Per
// categorical attribute: distinct count, most frequent and least frequent
// observed category index (ties toward the lower index). Schema order.
// Throws kEmptyDataset.
FeatureVector NaiveFeatures(const Dataset& data);

// Concatenated normalised frequencies: one block per attribute over its
// categories or its schema bins. Unobserved categories contribute zeros.
// Throws kEmptyDataset.
FeatureVector HistFeatures(const Dataset& data);

// Pearson correlation of every unordered pair of columns after one-hot
// encoding the categorical attributes, upper triangle in row-major order
// without the diagonal. Zero-variance columns correlate 0 with everything.
// Throws kTooFewRecords for fewer than two records.
FeatureVector CorrFeatures(const Dataset& data);

FeatureVector ExtractFeatures(FeatureSet set, const Dataset& data);

// Closed-form vector length for a schema.
std::size_t FeatureLength(FeatureSet set, const SchemaMetadata& schema);

}  // namespace synthpriv

#endif  // SYNTHPRIV_FEATURES_H_
