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

#include "synthpriv/schema.h"

#include <cmath>
#include <set>
#include <utility>

#include "synthpriv/error.h"

namespace synthpriv {

AttributeSpec AttributeSpec::Categorical(std::string name,
                                         std::vector<std::string> categories) {
  AttributeSpec spec;
  spec.name = std::move(name);
  spec.kind = AttributeKind::kCategorical;
  spec.categories = std::move(categories);
  return spec;
}

AttributeSpec AttributeSpec::Continuous(std::string name, double min,
                                        double max, int bins) {
  AttributeSpec spec;
  spec.name = std::move(name);
  spec.kind = AttributeKind::kContinuous;
  spec.min = min;
  spec.max = max;
  spec.bins = bins;
  return spec;
}

std::optional<std::size_t> AttributeSpec::CategoryIndex(
    std::string_view category) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == category) return i;
  }
  return std::nullopt;
}

void AttributeSpec::Validate() const {
  if (name.empty()) {
    throw Error(ErrorCode::kInvalidSchema, "attribute with empty name");
  }
  if (is_categorical()) {
    if (categories.empty()) {
      throw Error(ErrorCode::kInvalidSchema,
                  "categorical attribute '" + name + "' has no categories");
    }
    std::set<std::string_view> seen;
    for (const auto& c : categories) {
      if (!seen.insert(c).second) {
        throw Error(ErrorCode::kInvalidSchema, "attribute '" + name +
                                                   "' repeats category '" + c +
                                                   "'");
      }
    }
  } else {
    if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
      throw Error(ErrorCode::kInvalidSchema,
                  "continuous attribute '" + name + "' needs min < max");
    }
    if (bins < 1) {
      throw Error(ErrorCode::kInvalidSchema,
                  "continuous attribute '" + name + "' needs bins >= 1");
    }
  }
}

SchemaMetadata::SchemaMetadata(std::vector<AttributeSpec> attributes,
                               std::vector<std::string> quasi_identifiers)
    : attributes_(std::move(attributes)),
      quasi_identifiers_(std::move(quasi_identifiers)) {
  std::set<std::string_view> names;
  for (const auto& a : attributes_) {
    a.Validate();
    if (!names.insert(a.name).second) {
      throw Error(ErrorCode::kInvalidSchema,
                  "duplicate attribute name '" + a.name + "'");
    }
  }
  for (const auto& q : quasi_identifiers_) {
    if (!names.contains(q)) {
      throw Error(ErrorCode::kInvalidSchema,
                  "quasi-identifier '" + q + "' is not an attribute");
    }
  }
}

std::optional<std::size_t> SchemaMetadata::IndexOf(
    std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t SchemaMetadata::RequireIndex(std::string_view name) const {
  auto index = IndexOf(name);
  if (!index) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown attribute '" + std::string(name) + "'");
  }
  return *index;
}

}  // namespace synthpriv
