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

#include "synthpriv/toy_population.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "synthpriv/error.h"

namespace synthpriv {
namespace {

std::vector<double> Cumulative(const std::vector<double>& weights) {
  std::vector<double> cdf(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cdf.begin());
  return cdf;
}

void CheckWeights(const std::vector<double>& weights, std::size_t expected,
                  const std::string& what) {
  if (weights.size() != expected) {
    throw Error(ErrorCode::kInvalidConfig,
                what + ": expected " + std::to_string(expected) + " weights");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidConfig, what + ": negative weight");
    }
    total += w;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, what + ": weights sum to zero");
  }
}

struct CompiledCoupling {
  std::size_t parent;
  const Coupling* coupling;
};

}  // namespace

SchemaMetadata ToyPopulationConfig::Schema() const {
  std::vector<AttributeSpec> specs;
  specs.reserve(attributes.size());
  for (const auto& a : attributes) specs.push_back(a.spec);
  return SchemaMetadata(std::move(specs), quasi_identifiers);
}

void ToyPopulationConfig::Validate() const {
  SchemaMetadata schema;
  try {
    schema = Schema();
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  for (const auto& a : attributes) {
    if (a.spec.is_categorical()) {
      CheckWeights(a.weights, a.spec.category_count(), a.spec.name);
    } else {
      if (a.mixture.empty()) {
        throw Error(ErrorCode::kInvalidConfig,
                    a.spec.name + ": continuous attribute needs a mixture");
      }
      std::vector<double> w;
      for (const auto& c : a.mixture) {
        if (!(c.sd >= 0.0) || !std::isfinite(c.mean)) {
          throw Error(ErrorCode::kInvalidConfig,
                      a.spec.name + ": bad mixture component");
        }
        w.push_back(c.weight);
      }
      CheckWeights(w, w.size(), a.spec.name + " mixture");
    }
  }
  for (const auto& c : couplings) {
    auto parent = schema.IndexOf(c.parent);
    auto child = schema.IndexOf(c.child);
    if (!parent || !child) {
      throw Error(ErrorCode::kInvalidConfig,
                  "coupling refers to unknown attribute");
    }
    if (*parent >= *child) {
      throw Error(ErrorCode::kInvalidConfig,
                  "coupling parent '" + c.parent + "' must precede child '" +
                      c.child + "'");
    }
    const AttributeSpec& ps = schema.attribute(*parent);
    const AttributeSpec& cs = schema.attribute(*child);
    if (ps.is_categorical() && cs.is_categorical()) {
      if (c.child_weights.size() != ps.category_count()) {
        throw Error(ErrorCode::kInvalidConfig,
                    "coupling " + c.parent + "->" + c.child +
                        ": one weight row per parent category");
      }
      for (const auto& row : c.child_weights) {
        CheckWeights(row, cs.category_count(), "coupling " + c.child);
      }
    } else if (ps.is_categorical()) {
      if (c.shifts.size() != ps.category_count()) {
        throw Error(ErrorCode::kInvalidConfig,
                    "coupling " + c.parent + "->" + c.child +
                        ": one shift per parent category");
      }
    } else if (cs.is_categorical()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "coupling from continuous to categorical is unsupported");
    }
  }
  for (const auto& p : planted) {
    for (const auto& [name, value] : p.values) {
      auto index = schema.IndexOf(name);
      if (!index) {
        throw Error(ErrorCode::kInvalidConfig,
                    "planted record names unknown attribute '" + name + "'");
      }
      const AttributeSpec& spec = schema.attribute(*index);
      if (spec.is_categorical()) {
        const auto* s = std::get_if<std::string>(&value);
        if (!s || !spec.CategoryIndex(*s)) {
          throw Error(ErrorCode::kInvalidConfig,
                      "planted value for '" + name + "' is not a category");
        }
      } else {
        const auto* d = std::get_if<double>(&value);
        if (!d || *d < spec.min || *d > spec.max) {
          throw Error(ErrorCode::kInvalidConfig,
                      "planted value for '" + name + "' outside range");
        }
      }
    }
  }
}

Dataset SampleToyPopulation(const ToyPopulationConfig& config, std::size_t n,
                            Rng& rng) {
  config.Validate();
  if (n < 1) throw Error(ErrorCode::kInvalidConfig, "population size < 1");
  const SchemaMetadata schema = config.Schema();
  const std::size_t k = schema.size();

  std::vector<std::vector<double>> base_cdf(k);
  std::vector<std::vector<double>> mixture_cdf(k);
  for (std::size_t j = 0; j < k; ++j) {
    const ToyAttribute& a = config.attributes[j];
    if (a.spec.is_categorical()) {
      base_cdf[j] = Cumulative(a.weights);
    } else {
      std::vector<double> w;
      for (const auto& c : a.mixture) w.push_back(c.weight);
      mixture_cdf[j] = Cumulative(w);
    }
  }
  std::vector<std::vector<CompiledCoupling>> couplings_of(k);
  std::vector<std::vector<std::vector<double>>> coupled_cdf(k);
  for (const auto& c : config.couplings) {
    const std::size_t child = schema.RequireIndex(c.child);
    couplings_of[child].push_back({schema.RequireIndex(c.parent), &c});
  }

  auto draw_record = [&](Rng& gen) {
    Record rec;
    rec.values.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
      const ToyAttribute& a = config.attributes[j];
      if (a.spec.is_categorical()) {
        const std::vector<double>* cdf = &base_cdf[j];
        std::vector<double> replaced;
        for (const auto& cc : couplings_of[j]) {
          // the last categorical coupling wins
          replaced = Cumulative(cc.coupling->child_weights[rec.category(cc.parent)]);
          cdf = &replaced;
        }
        rec[j] = static_cast<double>(DrawFromCdf(*cdf, gen));
      } else {
        const MixtureComponent& comp =
            a.mixture[DrawFromCdf(mixture_cdf[j], gen)];
        std::normal_distribution<double> normal(comp.mean, comp.sd);
        double v = comp.sd > 0.0 ? normal(gen) : comp.mean;
        for (const auto& cc : couplings_of[j]) {
          const AttributeSpec& ps = schema.attribute(cc.parent);
          if (ps.is_categorical()) {
            v += cc.coupling->shifts[rec.category(cc.parent)];
          } else {
            v += cc.coupling->slope * rec[cc.parent];
          }
        }
        rec[j] = std::clamp(v, a.spec.min, a.spec.max);
      }
    }
    return rec;
  };

  std::vector<Record> records;
  records.reserve(n + config.planted.size() + config.outliers.count);
  for (std::size_t i = 0; i < n; ++i) records.push_back(draw_record(rng));

  for (const auto& p : config.planted) {
    Record rec = draw_record(rng);
    for (const auto& [name, value] : p.values) {
      const std::size_t j = schema.RequireIndex(name);
      const AttributeSpec& spec = schema.attribute(j);
      if (spec.is_categorical()) {
        rec[j] = static_cast<double>(
            *spec.CategoryIndex(std::get<std::string>(value)));
      } else {
        rec[j] = std::get<double>(value);
      }
    }
    records.push_back(std::move(rec));
  }

  std::vector<std::size_t> continuous;
  std::vector<std::pair<std::size_t, std::size_t>> zero_weight;
  for (std::size_t j = 0; j < k; ++j) {
    const ToyAttribute& a = config.attributes[j];
    if (a.spec.is_continuous()) {
      continuous.push_back(j);
    } else {
      for (std::size_t c = 0; c < a.weights.size(); ++c) {
        if (a.weights[c] == 0.0) zero_weight.emplace_back(j, c);
      }
    }
  }
  for (std::size_t o = 0; o < config.outliers.count; ++o) {
    Record rec = draw_record(rng);
    const std::size_t extremes =
        std::min(config.outliers.extreme_attributes, continuous.size());
    for (std::size_t e = 0; e < extremes; ++e) {
      const std::size_t j = continuous[(o + e) % continuous.size()];
      const AttributeSpec& spec = schema.attribute(j);
      rec[j] = spec.min + (0.97 + 0.03 * UniformUnit(rng)) * (spec.max - spec.min);
    }
    if (config.outliers.rare_category && !zero_weight.empty()) {
      const auto [j, c] = zero_weight[o % zero_weight.size()];
      rec[j] = static_cast<double>(c);
    }
    records.push_back(std::move(rec));
  }
  return Dataset(schema, std::move(records));
}

}  // namespace synthpriv
