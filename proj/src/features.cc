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

#include "synthpriv/features.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "synthpriv/error.h"

namespace synthpriv {
namespace {

void RequireRecords(const Dataset& data) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "no records");
}

double Median(std::vector<double> values) {
  const std::size_t n = values.size();
  auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

std::size_t ExpandedWidth(const SchemaMetadata& schema) {
  std::size_t width = 0;
  for (const auto& a : schema.attributes()) {
    width += a.is_categorical() ? a.category_count() : 1;
  }
  return width;
}

}  // namespace

std::string_view FeatureSetName(FeatureSet set) {
  switch (set) {
    case FeatureSet::kNaive: return "naive";
    case FeatureSet::kHist: return "hist";
    case FeatureSet::kCorr: return "corr";
  }
  return "unknown";
}

FeatureSet ParseFeatureSet(std::string_view name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(c)));
  if (lower.starts_with("f_")) lower.erase(0, 2);
  if (lower == "naive") return FeatureSet::kNaive;
  if (lower == "hist") return FeatureSet::kHist;
  if (lower == "corr") return FeatureSet::kCorr;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown feature set '" + std::string(name) + "'");
}

FeatureVector NaiveFeatures(const Dataset& data) {
  RequireRecords(data);
  const SchemaMetadata& schema = data.schema();
  FeatureVector out;
  out.set_id = FeatureSet::kNaive;
  const double n = static_cast<double>(data.size());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const AttributeSpec& spec = schema.attribute(j);
    if (spec.is_continuous()) {
      std::vector<double> column = data.Column(j);
      double mean = 0.0;
      for (double v : column) mean += v;
      mean /= n;
      double variance = 0.0;
      for (double v : column) variance += (v - mean) * (v - mean);
      variance /= n;
      out.values.push_back(mean);
      out.values.push_back(Median(std::move(column)));
      out.values.push_back(variance);
    } else {
      std::vector<std::size_t> counts(spec.category_count(), 0);
      for (const auto& rec : data.records()) ++counts[rec.category(j)];
      std::size_t distinct = 0;
      std::size_t most = 0;
      std::size_t least = counts.size();
      for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) continue;
        ++distinct;
        if (counts[c] > counts[most]) most = c;
        if (least == counts.size() || counts[c] < counts[least]) least = c;
      }
      out.values.push_back(static_cast<double>(distinct));
      out.values.push_back(static_cast<double>(most));
      out.values.push_back(static_cast<double>(least));
    }
  }
  return out;
}

FeatureVector HistFeatures(const Dataset& data) {
  RequireRecords(data);
  const SchemaMetadata& schema = data.schema();
  FeatureVector out;
  out.set_id = FeatureSet::kHist;
  const double n = static_cast<double>(data.size());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const AttributeSpec& spec = schema.attribute(j);
    const std::size_t width = spec.is_categorical()
                                  ? spec.category_count()
                                  : static_cast<std::size_t>(spec.bins);
    std::vector<double> block(width, 0.0);
    for (const auto& rec : data.records()) {
      const std::size_t cell =
          spec.is_categorical() ? rec.category(j)
                                : static_cast<std::size_t>(BinIndex(rec[j], spec));
      block[cell] += 1.0;
    }
    for (double& b : block) b /= n;
    out.values.insert(out.values.end(), block.begin(), block.end());
  }
  return out;
}

FeatureVector CorrFeatures(const Dataset& data) {
  if (data.size() < 2) {
    throw Error(ErrorCode::kTooFewRecords, "correlations need >= 2 records");
  }
  const SchemaMetadata& schema = data.schema();
  const std::size_t n = data.size();
  const std::size_t width = ExpandedWidth(schema);

  // column-major expanded matrix
  std::vector<std::vector<double>> columns(width, std::vector<double>(n, 0.0));
  std::size_t offset = 0;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const AttributeSpec& spec = schema.attribute(j);
    if (spec.is_categorical()) {
      for (std::size_t r = 0; r < n; ++r) {
        columns[offset + data[r].category(j)][r] = 1.0;
      }
      offset += spec.category_count();
    } else {
      for (std::size_t r = 0; r < n; ++r) columns[offset][r] = data[r][j];
      offset += 1;
    }
  }
  std::vector<double> sd(width, 0.0);
  std::vector<bool> constant(width, false);
  for (std::size_t c = 0; c < width; ++c) {
    auto [lo, hi] = std::minmax_element(columns[c].begin(), columns[c].end());
    constant[c] = *lo == *hi;
  }
  for (auto& column : columns) {
    double mean = 0.0;
    for (double v : column) mean += v;
    mean /= static_cast<double>(n);
    for (double& v : column) v -= mean;
  }
  for (std::size_t c = 0; c < width; ++c) {
    double ss = 0.0;
    for (double v : columns[c]) ss += v * v;
    sd[c] = std::sqrt(ss);
  }
  FeatureVector out;
  out.set_id = FeatureSet::kCorr;
  out.values.reserve(width * (width - 1) / 2);
  for (std::size_t a = 0; a < width; ++a) {
    for (std::size_t b = a + 1; b < width; ++b) {
      if (constant[a] || constant[b]) {
        out.values.push_back(0.0);
        continue;
      }
      double dot = 0.0;
      for (std::size_t r = 0; r < n; ++r) dot += columns[a][r] * columns[b][r];
      out.values.push_back(std::clamp(dot / (sd[a] * sd[b]), -1.0, 1.0));
    }
  }
  return out;
}

FeatureVector ExtractFeatures(FeatureSet set, const Dataset& data) {
  switch (set) {
    case FeatureSet::kNaive: return NaiveFeatures(data);
    case FeatureSet::kHist: return HistFeatures(data);
    case FeatureSet::kCorr: return CorrFeatures(data);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown feature set");
}

std::size_t FeatureLength(FeatureSet set, const SchemaMetadata& schema) {
  switch (set) {
    case FeatureSet::kNaive: return 3 * schema.size();
    case FeatureSet::kHist: {
      std::size_t length = 0;
      for (const auto& a : schema.attributes()) {
        length += a.is_categorical() ? a.category_count()
                                     : static_cast<std::size_t>(a.bins);
      }
      return length;
    }
    case FeatureSet::kCorr: {
      const std::size_t width = ExpandedWidth(schema);
      return width * (width - 1) / 2;
    }
  }
  return 0;
}

}  // namespace synthpriv
