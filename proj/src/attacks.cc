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

#include "synthpriv/attacks.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "synthpriv/error.h"
#include "synthpriv/parallel.h"

namespace synthpriv {
namespace {

std::vector<std::size_t> RowsNotEqualTo(const Dataset& data,
                                        const Record& target) {
  std::vector<std::size_t> rows;
  rows.reserve(data.size());
  for (std::size_t r = 0; r < data.size(); ++r) {
    if (!(data[r] == target)) rows.push_back(r);
  }
  return rows;
}

}  // namespace

ShadowExamples GenerateShadowExamples(const Record& target,
                                      const PriorKnowledge& prior,
                                      FeatureSet feature_set,
                                      const ShadowConfig& config, Rng& rng) {
  if (config.n_shadows < 1 || config.synth_per_shadow < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "need at least one shadow and one dataset per shadow");
  }
  if (prior.n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  const std::vector<std::size_t> pool = RowsNotEqualTo(prior.reference, target);
  if (pool.size() < prior.n) {
    throw Error(ErrorCode::kReferenceTooSmall,
                "reference data has " + std::to_string(pool.size()) +
                    " usable records, need " + std::to_string(prior.n));
  }
  const Dataset& reference = prior.reference;
  const std::uint64_t base = rng();
  const std::size_t per_shadow = 2 * config.synth_per_shadow;
  ShadowExamples examples;
  examples.features.resize(config.n_shadows * per_shadow);
  examples.labels.resize(config.n_shadows * per_shadow);

  ParallelFor(config.n_shadows, config.jobs, [&](std::size_t shadow) {
    Rng draw_rng(DeriveSeed(base, 2 * shadow));
    const std::uint64_t mechanism_seed = DeriveSeed(base, 2 * shadow + 1);
    const auto picked = SampleWithoutReplacement(pool.size(), prior.n, draw_rng);
    std::vector<Record> without;
    without.reserve(prior.n + 1);
    for (std::size_t i : picked) without.push_back(reference[pool[i]]);
    std::vector<Record> with = without;
    if (config.grow_with_target) {
      with.push_back(target);
    } else {
      with.back() = target;
    }
    const Dataset raw_arms[2] = {
        Dataset(reference.shared_schema(), std::move(without)),
        Dataset(reference.shared_schema(), std::move(with))};
    for (int label = 0; label < 2; ++label) {
      Rng mechanism_rng(mechanism_seed);
      const Dataset& raw = raw_arms[label];
      std::optional<TrainedGenerator> model;
      const auto* spec = std::get_if<GeneratorSpec>(&prior.mechanism);
      if (spec && spec->kind != GeneratorKind::kExternal) {
        model = Fit(*spec, raw, prior.metadata, mechanism_rng);
      }
      for (std::size_t s = 0; s < config.synth_per_shadow; ++s) {
        const Dataset published =
            model ? model->Sample(prior.m, mechanism_rng)
                  : Publish(prior.mechanism, raw, prior.metadata, prior.m,
                            mechanism_rng);
        const std::size_t slot =
            shadow * per_shadow + static_cast<std::size_t>(label) *
                                      config.synth_per_shadow + s;
        examples.features[slot] = ExtractFeatures(feature_set, published).values;
        examples.labels[slot] = label;
      }
    }
  });
  return examples;
}

MiaAttacker MiaAttacker::LiteralOnly(Record target) {
  MiaAttacker attacker;
  attacker.target_ = std::move(target);
  return attacker;
}

int MiaAttacker::Classify(const Dataset& published) const {
  if (!forest_) {
    throw Error(ErrorCode::kInvalidArgument,
                "attacker was not trained with a classifier");
  }
  return forest_->Predict(ExtractFeatures(feature_set_, published).values);
}

MiaAttacker TrainMia(const Record& target, const PriorKnowledge& prior,
                     FeatureSet feature_set, const ShadowConfig& config,
                     Rng& rng) {
  if (config.n_shadows < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least two shadows");
  }
  const ShadowExamples examples =
      GenerateShadowExamples(target, prior, feature_set, config, rng);
  MiaAttacker attacker;
  attacker.target_ = target;
  attacker.feature_set_ = feature_set;
  attacker.shadow_config_ = config;
  attacker.forest_ =
      RandomForest::Fit(examples.features, examples.labels, config.forest, rng);
  return attacker;
}

int MiaGuess(const MiaAttacker& attacker, const Dataset& published,
             PublishedKind kind) {
  const PartialRecord probe = PartialRecord::From(attacker.target());
  switch (kind) {
    case PublishedKind::kRaw:
      return LiteralLink(published, probe).empty() ? 0 : 1;
    case PublishedKind::kSanitised:
      if (LiteralLink(published, CapAwareProbe(published, probe)).size() == 1) {
        return 1;
      }
      return attacker.Classify(published);
    case PublishedKind::kSynthetic:
      return attacker.Classify(published);
  }
  return 0;
}

std::vector<double> EncodeKnown(const SchemaMetadata& schema,
                                const std::vector<std::optional<double>>& cells,
                                std::size_t sensitive, bool one_hot) {
  std::vector<double> out;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (j == sensitive) continue;
    const AttributeSpec& spec = schema.attribute(j);
    const double v = cells[j].value_or(0.0);
    if (one_hot && spec.is_categorical()) {
      for (std::size_t c = 0; c < spec.category_count(); ++c) {
        out.push_back(static_cast<std::size_t>(v) == c ? 1.0 : 0.0);
      }
    } else {
      out.push_back(v);
    }
  }
  return out;
}

FeatureMatrix EncodeKnown(const Dataset& data, std::size_t sensitive,
                          bool one_hot) {
  FeatureMatrix out;
  out.reserve(data.size());
  for (const auto& rec : data.records()) {
    out.push_back(EncodeKnown(data.schema(), PartialRecord::From(rec).values,
                              sensitive, one_hot));
  }
  return out;
}

double AttributeGuess::SuccessProbability(double truth) const {
  if (linked || !continuous) return value == truth ? 1.0 : 0.0;
  const double at_truth = PosteriorDensity(*regression, known, truth);
  const double at_mode = PosteriorDensity(*regression, known, value);
  if (!(at_mode > 0.0)) return 0.0;
  return std::clamp(at_truth / at_mode, 0.0, 1.0);
}

AttributeGuess AttributeInferenceGuess(const PartialRecord& partial_target,
                                       const Dataset& published,
                                       PublishedKind kind,
                                       std::size_t sensitive, Rng& rng,
                                       const ForestParams& forest) {
  const SchemaMetadata& schema = published.schema();
  if (sensitive >= schema.size()) {
    throw Error(ErrorCode::kInvalidArgument, "sensitive attribute out of range");
  }
  PartialRecord probe = partial_target;
  probe.values.at(sensitive) = std::nullopt;

  AttributeGuess guess;
  guess.continuous = schema.attribute(sensitive).is_continuous();
  if (kind != PublishedKind::kSynthetic) {
    const PartialRecord link_probe =
        kind == PublishedKind::kSanitised ? CapAwareProbe(published, probe)
                                          : probe;
    const auto matches = LiteralLink(published, link_probe);
    if (matches.size() == 1) {
      guess.linked = true;
      guess.value = published[matches.front()][sensitive];
      return guess;
    }
  }

  const std::vector<double> labels_or_values = published.Column(sensitive);
  if (guess.continuous) {
    const FeatureMatrix known = EncodeKnown(published, sensitive, true);
    guess.known = EncodeKnown(schema, probe.values, sensitive, true);
    if (known.size() < guess.known.size() + 2) {
      throw Error(ErrorCode::kInsufficientRows,
                  "published data too small for the regression attack");
    }
    guess.regression = FitLinear(known, labels_or_values);
    guess.value = guess.regression->Predict(guess.known);
    return guess;
  }
  if (published.size() < 2) {
    throw Error(ErrorCode::kInsufficientRows,
                "published data too small for the classification attack");
  }
  const FeatureMatrix known = EncodeKnown(published, sensitive, false);
  std::vector<int> labels;
  labels.reserve(labels_or_values.size());
  for (double v : labels_or_values) labels.push_back(static_cast<int>(v));
  const RandomForest model = RandomForest::Fit(known, labels, forest, rng);
  guess.known = EncodeKnown(schema, probe.values, sensitive, false);
  guess.value = static_cast<double>(model.Predict(guess.known));
  return guess;
}

}  // namespace synthpriv
