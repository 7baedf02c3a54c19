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

#ifndef SYNTHPRIV_SCHEMA_H_
#define SYNTHPRIV_SCHEMA_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace synthpriv {

enum class AttributeKind { kCategorical, kContinuous };

// One column of a tabular schema. Categorical columns carry their ordered
// category list; continuous columns carry a closed range and the bin count
// used whenever a histogram view of the column is needed.
struct AttributeSpec {
  std::string name;
  AttributeKind kind = AttributeKind::kCategorical;
  std::vector<std::string> categories;
  double min = 0.0;
  double max = 0.0;
  int bins = 1;

  static AttributeSpec Categorical(std::string name,
                                   std::vector<std::string> categories);
  static AttributeSpec Continuous(std::string name, double min, double max,
                                  int bins);

  bool is_categorical() const { return kind == AttributeKind::kCategorical; }
  bool is_continuous() const { return kind == AttributeKind::kContinuous; }
  std::size_t category_count() const { return categories.size(); }
  std::optional<std::size_t> CategoryIndex(std::string_view category) const;

  // Throws kInvalidSchema when the invariants do not hold.
  void Validate() const;

  bool operator==(const AttributeSpec&) const = default;
};

// Ordered attribute list plus the quasi-identifiers used by the sanitiser.
// Immutable after construction.
class SchemaMetadata {
 public:
  SchemaMetadata() = default;
  explicit SchemaMetadata(std::vector<AttributeSpec> attributes,
                          std::vector<std::string> quasi_identifiers = {});

  const std::vector<AttributeSpec>& attributes() const { return attributes_; }
  const AttributeSpec& attribute(std::size_t i) const { return attributes_[i]; }
  std::size_t size() const { return attributes_.size(); }
  const std::vector<std::string>& quasi_identifiers() const {
    return quasi_identifiers_;
  }

  std::optional<std::size_t> IndexOf(std::string_view name) const;
  // Like IndexOf but throws kInvalidArgument for unknown names.
  std::size_t RequireIndex(std::string_view name) const;

  bool operator==(const SchemaMetadata&) const = default;

 private:
  std::vector<AttributeSpec> attributes_;
  std::vector<std::string> quasi_identifiers_;
};

}  // namespace synthpriv

#endif  // SYNTHPRIV_SCHEMA_H_
