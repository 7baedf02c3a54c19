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

#ifndef SYNTHPRIV_DATASET_H_
#define SYNTHPRIV_DATASET_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <vector>

#include "synthpriv/schema.h"

namespace synthpriv {

// A row of k cells aligned with the schema. Categorical cells hold the
// category index (an exact small integer); continuous cells hold the value.
struct Record {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  std::size_t category(std::size_t i) const {
    return static_cast<std::size_t>(values[i]);
  }

  bool operator==(const Record&) const = default;
};

// An ordered collection of records conforming to one schema. Immutable once
// built; the schema is shared between datasets derived from one another.
class Dataset {
 public:
  Dataset() : schema_(std::make_shared<const SchemaMetadata>()) {}
  Dataset(SchemaMetadata schema, std::vector<Record> records = {});
  Dataset(std::shared_ptr<const SchemaMetadata> schema,
          std::vector<Record> records = {});

  const SchemaMetadata& schema() const { return *schema_; }
  const std::shared_ptr<const SchemaMetadata>& shared_schema() const {
    return schema_;
  }
  const std::vector<Record>& records() const { return records_; }
  const Record& record(std::size_t i) const { return records_[i]; }
  const Record& operator[](std::size_t i) const { return records_[i]; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  std::vector<double> Column(std::size_t attribute) const;

  // New dataset on the same schema holding the selected rows, in order.
  Dataset Subset(const std::vector<std::size_t>& rows) const;

  bool operator==(const Dataset& other) const {
    return schema() == other.schema() && records_ == other.records_;
  }

 private:
  void CheckRecords() const;

  std::shared_ptr<const SchemaMetadata> schema_;
  std::vector<Record> records_;
};

enum class RangePolicy { kReject, kClamp };

Dataset ReadCsv(std::istream& in, const SchemaMetadata& schema,
                RangePolicy policy = RangePolicy::kReject);
Dataset LoadCsv(const std::filesystem::path& path, const SchemaMetadata& schema,
                RangePolicy policy = RangePolicy::kReject);

// Continuous cells are printed with round-trip precision.
void WriteCsv(std::ostream& out, const Dataset& data);
void SaveCsv(const std::filesystem::path& path, const Dataset& data);

// Learns categories and ranges from the data itself. This is the leaky path:
// metadata derived from a training set depends on every record in it.
// Categories keep the order of `data.schema()`; only observed ones survive.
SchemaMetadata DeriveMetadata(const Dataset& data, double pad_fraction = 0.0);

// Uniform-width bin over [min, max]; values outside clamp to the edge bins
// and max itself falls in the last bin.
int BinIndex(double value, const AttributeSpec& spec);
int BinIndex(double value, double min, double max, int bins);

}  // namespace synthpriv

#endif  // SYNTHPRIV_DATASET_H_
