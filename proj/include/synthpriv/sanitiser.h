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

#ifndef SYNTHPRIV_SANITISER_H_
#define SYNTHPRIV_SANITISER_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synthpriv/dataset.h"

namespace synthpriv {

// Row-level sanitisation in the style of the NHS England procedure.
struct SanitiserConfig {
  // Rows holding any category seen fewer than this many times are dropped.
  std::size_t rare_category_threshold = 0;
  // attribute -> (category -> replacement category); both must be schema
  // categories so the output keeps the input schema.
  std::map<std::string, std::map<std::string, std::string>> grouping_map;
  double quantile_cap = 0.95;
  std::size_t k = 1;
  // Empty means the schema's own quasi-identifiers.
  std::vector<std::string> quasi_identifiers;

  // Throws kInvalidArgument.
  void Validate() const;
};

// Applies, in order: category grouping; rare-category row removal (counts
// taken after grouping); capping of every continuous attribute at the
// nearest-rank `quantile_cap` quantile of the input column; suppression of
// quasi-identifier equivalence classes (continuous QIs taken at their schema
// bin) with fewer than k rows. Deterministic.
// Throws kUnknownAttributeInConfig.
Dataset Sanitise(const Dataset& data, const SanitiserConfig& config);

// Nearest-rank quantile: the ceil(q * n)-th smallest value (1-based).
double NearestRankQuantile(std::vector<double> values, double q);

// A record with some cells unknown to the adversary.
struct PartialRecord {
  std::vector<std::optional<double>> values;

  static PartialRecord From(const Record& record);
  static PartialRecord Hiding(const Record& record, std::size_t hidden);
};

// Rows equal to `probe` on every known cell (exact comparison).
std::vector<std::size_t> LiteralLink(const Dataset& data,
                                     const PartialRecord& probe);

// The probe as it would look after capping: any known continuous cell
// greater than the published column maximum is replaced by that maximum,
// which is the cap whenever the column was capped.
PartialRecord CapAwareProbe(const Dataset& published,
                            const PartialRecord& probe);

}  // namespace synthpriv

#endif  // SYNTHPRIV_SANITISER_H_
