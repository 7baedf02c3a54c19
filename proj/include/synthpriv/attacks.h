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

#ifndef SYNTHPRIV_ATTACKS_H_
#define SYNTHPRIV_ATTACKS_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "synthpriv/dataset.h"
#include "synthpriv/features.h"
#include "synthpriv/linear_model.h"
#include "synthpriv/mechanism.h"
#include "synthpriv/random.h"
#include "synthpriv/random_forest.h"
#include "synthpriv/sanitiser.h"

namespace synthpriv {

// What the adversary knows up front: a reference sample from the same
// population, the data holder's mechanism with its public metadata, and the
// raw and published sizes.
struct PriorKnowledge {
  Dataset reference;
  Mechanism mechanism = RawPassthrough{};
  SchemaMetadata metadata;
  std::size_t n = 0;
  std::size_t m = 0;
};

struct ShadowConfig {
  std::size_t n_shadows = 10;
  std::size_t synth_per_shadow = 5;
  // Shadow raw sets hold n records (n-1 drawn plus filler or target). With
  // `grow_with_target` the target is appended to all n drawn records
  // instead, giving n versus n+1 records.
  bool grow_with_target = false;
  ForestParams forest;
  int jobs = 1;
};

struct ShadowExamples {
  FeatureMatrix features;
  std::vector<int> labels;
};

// Labelled feature vectors from shadow models. For each shadow, n-1 records
// are drawn without replacement from the reference data (never a record
// equal to the target) plus one filler; the mechanism runs once with the
// filler (label 0) and once with the target in its place (label 1), each
// yielding synth_per_shadow published datasets. Both arms of a shadow share
// their randomness. Throws kReferenceTooSmall.
ShadowExamples GenerateShadowExamples(const Record& target,
                                      const PriorKnowledge& prior,
                                      FeatureSet feature_set,
                                      const ShadowConfig& config, Rng& rng);

// Membership-inference adversary for one target record.
class MiaAttacker {
 public:
  // An attacker that can only do literal linkage (enough for raw data).
  static MiaAttacker LiteralOnly(Record target);

  const Record& target() const { return target_; }
  FeatureSet feature_set() const { return feature_set_; }
  bool has_classifier() const { return forest_.has_value(); }
  const ShadowConfig& shadow_config() const { return shadow_config_; }

  // Forest prediction on the published dataset's features. Throws
  // kInvalidArgument for a literal-only attacker.
  int Classify(const Dataset& published) const;

 private:
  friend MiaAttacker TrainMia(const Record&, const PriorKnowledge&, FeatureSet,
                              const ShadowConfig&, Rng&);

  Record target_;
  FeatureSet feature_set_ = FeatureSet::kNaive;
  ShadowConfig shadow_config_;
  std::optional<RandomForest> forest_;
};

MiaAttacker TrainMia(const Record& target, const PriorKnowledge& prior,
                     FeatureSet feature_set, const ShadowConfig& config,
                     Rng& rng);

// Guess of the target's membership given the published data:
//  raw       -> 1 iff some row equals the target;
//  sanitised -> 1 if exactly one row matches the cap-aware target, else the
//               classifier;
//  synthetic -> the classifier.
int MiaGuess(const MiaAttacker& attacker, const Dataset& published,
             PublishedKind kind);

// Attacker-side encoding of the known attributes (all but `sensitive`).
// With `one_hot`, categorical attributes expand to indicator columns;
// otherwise they stay as category indices.
std::vector<double> EncodeKnown(const SchemaMetadata& schema,
                                const std::vector<std::optional<double>>& cells,
                                std::size_t sensitive, bool one_hot);
FeatureMatrix EncodeKnown(const Dataset& data, std::size_t sensitive,
                          bool one_hot);

struct AttributeGuess {
  double value = 0.0;
  bool linked = false;
  bool continuous = false;
  std::optional<LinearAttackModel> regression;
  std::vector<double> known;

  // Probability the guess counts as correct for the true value `truth`.
  // Linked or categorical guesses are right or wrong; a regression guess
  // scores its posterior density at the truth relative to the density at
  // the predicted value, which lies in [0, 1].
  double SuccessProbability(double truth) const;
};

// Attribute-inference adversary. On raw or sanitised data it first tries
// literal linkage on the known attributes (cap-aware for sanitised data)
// and returns the linked value if exactly one row matches. Otherwise it
// trains on the published data: linear regression for a continuous
// sensitive attribute, a random forest for a categorical one.
// Throws kInsufficientRows.
AttributeGuess AttributeInferenceGuess(const PartialRecord& partial_target,
                                       const Dataset& published,
                                       PublishedKind kind,
                                       std::size_t sensitive, Rng& rng,
                                       const ForestParams& forest = {});

}  // namespace synthpriv

#endif  // SYNTHPRIV_ATTACKS_H_
