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

#include "synthpriv/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include "synthpriv/error.h"

namespace synthpriv {
namespace {

std::string RowLabel(std::size_t row) { return "row " + std::to_string(row); }

// Splits one CSV line. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> SplitCsvLine(const std::string& line,
                                      std::size_t row) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) {
    throw Error(ErrorCode::kParseError, RowLabel(row) + ": unterminated quote");
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string QuoteIfNeeded(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string FormatDouble(double value) {
  char buffer[32];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

}  // namespace

Dataset::Dataset(SchemaMetadata schema, std::vector<Record> records)
    : Dataset(std::make_shared<const SchemaMetadata>(std::move(schema)),
              std::move(records)) {}

Dataset::Dataset(std::shared_ptr<const SchemaMetadata> schema,
                 std::vector<Record> records)
    : schema_(std::move(schema)), records_(std::move(records)) {
  CheckRecords();
}

void Dataset::CheckRecords() const {
  const std::size_t k = schema_->size();
  for (std::size_t r = 0; r < records_.size(); ++r) {
    const Record& rec = records_[r];
    if (rec.size() != k) {
      throw Error(ErrorCode::kInvalidArgument,
                  RowLabel(r) + " has " + std::to_string(rec.size()) +
                      " cells, schema has " + std::to_string(k));
    }
    for (std::size_t j = 0; j < k; ++j) {
      const AttributeSpec& spec = schema_->attribute(j);
      const double v = rec[j];
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument,
                    RowLabel(r) + " attribute '" + spec.name + "' not finite");
      }
      if (spec.is_categorical()) {
        if (v < 0 || v != std::floor(v) ||
            v >= static_cast<double>(spec.category_count())) {
          throw Error(ErrorCode::kUnknownCategory,
                      RowLabel(r) + " attribute '" + spec.name +
                          "' has invalid category index");
        }
      }
    }
  }
}

std::vector<double> Dataset::Column(std::size_t attribute) const {
  std::vector<double> column;
  column.reserve(records_.size());
  for (const auto& rec : records_) column.push_back(rec[attribute]);
  return column;
}

Dataset Dataset::Subset(const std::vector<std::size_t>& rows) const {
  std::vector<Record> picked;
  picked.reserve(rows.size());
  for (std::size_t r : rows) picked.push_back(records_.at(r));
  Dataset out;
  out.schema_ = schema_;
  out.records_ = std::move(picked);
  return out;
}

Dataset ReadCsv(std::istream& in, const SchemaMetadata& schema,
                RangePolicy policy) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kParseError, "missing header row");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = SplitCsvLine(line, 0);

  // column_of[j] = CSV column holding schema attribute j
  std::vector<std::size_t> column_of(schema.size(), header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    auto index = schema.IndexOf(header[c]);
    if (!index) {
      throw Error(ErrorCode::kParseError,
                  "header column '" + header[c] + "' not in schema");
    }
    column_of[*index] = c;
  }
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (column_of[j] == header.size()) {
      throw Error(ErrorCode::kMissingColumn, schema.attribute(j).name);
    }
  }

  std::vector<Record> records;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto fields = SplitCsvLine(line, row);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kParseError,
                  RowLabel(row) + ": expected " +
                      std::to_string(header.size()) + " fields");
    }
    Record rec;
    rec.values.resize(schema.size());
    for (std::size_t j = 0; j < schema.size(); ++j) {
      const AttributeSpec& spec = schema.attribute(j);
      const std::string& field = fields[column_of[j]];
      if (field.empty()) {
        throw Error(ErrorCode::kParseError,
                    RowLabel(row) + ": empty cell for '" + spec.name + "'");
      }
      if (spec.is_categorical()) {
        auto index = spec.CategoryIndex(field);
        if (!index) {
          throw Error(ErrorCode::kUnknownCategory,
                      RowLabel(row) + ": '" + field + "' for '" + spec.name +
                          "'");
        }
        rec[j] = static_cast<double>(*index);
      } else {
        double value = 0.0;
        const char* begin = field.data();
        const char* end = begin + field.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
          throw Error(ErrorCode::kParseError,
                      RowLabel(row) + ": '" + field + "' is not a number");
        }
        if (value < spec.min || value > spec.max) {
          if (policy == RangePolicy::kReject) {
            throw Error(ErrorCode::kOutOfRange,
                        "attribute '" + spec.name + "' " + RowLabel(row));
          }
          value = std::clamp(value, spec.min, spec.max);
        }
        rec[j] = value;
      }
    }
    records.push_back(std::move(rec));
  }
  return Dataset(schema, std::move(records));
}

Dataset LoadCsv(const std::filesystem::path& path, const SchemaMetadata& schema,
                RangePolicy policy) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  return ReadCsv(in, schema, policy);
}

void WriteCsv(std::ostream& out, const Dataset& data) {
  const SchemaMetadata& schema = data.schema();
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (j) out << ',';
    out << QuoteIfNeeded(schema.attribute(j).name);
  }
  out << '\n';
  for (const auto& rec : data.records()) {
    for (std::size_t j = 0; j < schema.size(); ++j) {
      if (j) out << ',';
      const AttributeSpec& spec = schema.attribute(j);
      if (spec.is_categorical()) {
        out << QuoteIfNeeded(spec.categories[rec.category(j)]);
      } else {
        out << FormatDouble(rec[j]);
      }
    }
    out << '\n';
  }
}

void SaveCsv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  WriteCsv(out, data);
}

SchemaMetadata DeriveMetadata(const Dataset& data, double pad_fraction) {
  if (data.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "cannot derive metadata");
  }
  if (!(pad_fraction >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "pad_fraction must be >= 0");
  }
  const SchemaMetadata& schema = data.schema();
  std::vector<AttributeSpec> attributes;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const AttributeSpec& spec = schema.attribute(j);
    if (spec.is_categorical()) {
      std::vector<bool> seen(spec.category_count(), false);
      for (const auto& rec : data.records()) seen[rec.category(j)] = true;
      std::vector<std::string> observed;
      for (std::size_t c = 0; c < seen.size(); ++c) {
        if (seen[c]) observed.push_back(spec.categories[c]);
      }
      attributes.push_back(AttributeSpec::Categorical(spec.name, observed));
    } else {
      double lo = data[0][j];
      double hi = lo;
      for (const auto& rec : data.records()) {
        lo = std::min(lo, rec[j]);
        hi = std::max(hi, rec[j]);
      }
      const double span = hi - lo;
      lo -= pad_fraction * span;
      hi += pad_fraction * span;
      if (!(lo < hi)) {
        // constant column: keep a degenerate-width range around the value
        hi = lo + 1e-9 * std::max(1.0, std::abs(lo));
      }
      attributes.push_back(
          AttributeSpec::Continuous(spec.name, lo, hi, spec.bins));
    }
  }
  return SchemaMetadata(std::move(attributes), schema.quasi_identifiers());
}

int BinIndex(double value, double min, double max, int bins) {
  if (!(value > min)) return 0;
  if (value >= max) return bins - 1;
  const double width = (max - min) / bins;
  const int bin = static_cast<int>(std::floor((value - min) / width));
  return std::clamp(bin, 0, bins - 1);
}

int BinIndex(double value, const AttributeSpec& spec) {
  return BinIndex(value, spec.min, spec.max, spec.bins);
}

}  // namespace synthpriv
