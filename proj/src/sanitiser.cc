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

#include "synthpriv/sanitiser.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "synthpriv/error.h"

namespace synthpriv {

void SanitiserConfig::Validate() const {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (!(quantile_cap > 0.0 && quantile_cap <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "quantile_cap must lie in (0, 1]");
  }
}

double NearestRankQuantile(std::vector<double> values, double q) {
  if (values.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "quantile of an empty column");
  }
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * n));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

Dataset Sanitise(const Dataset& data, const SanitiserConfig& config) {
  config.Validate();
  const SchemaMetadata& schema = data.schema();
  const std::size_t k = schema.size();

  const std::vector<std::string>& qi_names = config.quasi_identifiers.empty()
                                                 ? schema.quasi_identifiers()
                                                 : config.quasi_identifiers;
  std::vector<std::size_t> qis;
  for (const auto& name : qi_names) {
    auto index = schema.IndexOf(name);
    if (!index) {
      throw Error(ErrorCode::kUnknownAttributeInConfig,
                  "quasi-identifier '" + name + "'");
    }
    qis.push_back(*index);
  }

  // (1) grouping: per attribute, category index -> replacement index
  std::vector<std::vector<std::size_t>> remap(k);
  for (const auto& [name, table] : config.grouping_map) {
    auto index = schema.IndexOf(name);
    if (!index) {
      throw Error(ErrorCode::kUnknownAttributeInConfig,
                  "grouping attribute '" + name + "'");
    }
    const AttributeSpec& spec = schema.attribute(*index);
    if (!spec.is_categorical()) {
      throw Error(ErrorCode::kUnknownAttributeInConfig,
                  "grouping attribute '" + name + "' is not categorical");
    }
    auto& map = remap[*index];
    map.resize(spec.category_count());
    for (std::size_t c = 0; c < map.size(); ++c) map[c] = c;
    for (const auto& [from, to] : table) {
      auto from_index = spec.CategoryIndex(from);
      auto to_index = spec.CategoryIndex(to);
      if (!from_index || !to_index) {
        throw Error(ErrorCode::kUnknownAttributeInConfig,
                    "grouping for '" + name + "' names unknown category");
      }
      map[*from_index] = *to_index;
    }
  }
  std::vector<Record> rows = data.records();
  for (auto& rec : rows) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!remap[j].empty()) rec[j] = static_cast<double>(remap[j][rec.category(j)]);
    }
  }

  // (2) rare categories, counted after grouping
  if (config.rare_category_threshold > 0) {
    std::vector<std::vector<std::size_t>> counts(k);
    for (std::size_t j = 0; j < k; ++j) {
      if (schema.attribute(j).is_categorical()) {
        counts[j].assign(schema.attribute(j).category_count(), 0);
      }
    }
    for (const auto& rec : rows) {
      for (std::size_t j = 0; j < k; ++j) {
        if (!counts[j].empty()) ++counts[j][rec.category(j)];
      }
    }
    std::erase_if(rows, [&](const Record& rec) {
      for (std::size_t j = 0; j < k; ++j) {
        if (!counts[j].empty() &&
            counts[j][rec.category(j)] < config.rare_category_threshold) {
          return true;
        }
      }
      return false;
    });
  }

  // (3) cap continuous attributes at the input column's quantile
  for (std::size_t j = 0; j < k; ++j) {
    if (!schema.attribute(j).is_continuous() || data.empty()) continue;
    const double cap = NearestRankQuantile(data.Column(j), config.quantile_cap);
    for (auto& rec : rows) rec[j] = std::min(rec[j], cap);
  }

  // (4) k-anonymity by suppression over binned quasi-identifiers
  if (config.k > 1 && !qis.empty()) {
    auto key_of = [&](const Record& rec) {
      std::vector<long> key;
      key.reserve(qis.size());
      for (std::size_t j : qis) {
        const AttributeSpec& spec = schema.attribute(j);
        key.push_back(spec.is_categorical()
                          ? static_cast<long>(rec.category(j))
                          : static_cast<long>(BinIndex(rec[j], spec)));
      }
      return key;
    };
    std::map<std::vector<long>, std::size_t> class_size;
    for (const auto& rec : rows) ++class_size[key_of(rec)];
    std::erase_if(rows, [&](const Record& rec) {
      return class_size[key_of(rec)] < config.k;
    });
  }
  return Dataset(data.shared_schema(), std::move(rows));
}

PartialRecord PartialRecord::From(const Record& record) {
  PartialRecord partial;
  partial.values.assign(record.values.begin(), record.values.end());
  return partial;
}

PartialRecord PartialRecord::Hiding(const Record& record, std::size_t hidden) {
  PartialRecord partial = From(record);
  partial.values.at(hidden) = std::nullopt;
  return partial;
}

std::vector<std::size_t> LiteralLink(const Dataset& data,
                                     const PartialRecord& probe) {
  if (probe.values.size() != data.schema().size()) {
    throw Error(ErrorCode::kInvalidArgument, "probe does not match schema");
  }
  std::vector<std::size_t> matches;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const Record& rec = data[r];
    bool equal = true;
    for (std::size_t j = 0; j < probe.values.size() && equal; ++j) {
      if (probe.values[j] && rec[j] != *probe.values[j]) equal = false;
    }
    if (equal) matches.push_back(r);
  }
  return matches;
}

PartialRecord CapAwareProbe(const Dataset& published,
                            const PartialRecord& probe) {
  PartialRecord capped = probe;
  if (published.empty()) return capped;
  const SchemaMetadata& schema = published.schema();
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (!schema.attribute(j).is_continuous() || !capped.values[j]) continue;
    double top = published[0][j];
    for (const auto& rec : published.records()) top = std::max(top, rec[j]);
    if (*capped.values[j] > top) capped.values[j] = top;
  }
  return capped;
}

}  // namespace synthpriv
