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


// Monte-Carlo privacy and utility games.
//
// Every game runs `iters` challenger iterations. In stratified sampling,
// iterations 2j and 2j+1 form a pair that shares the raw draw and all
// mechanism randomness; only the target/filler swap differs. Iteration 2j
// has s_t = 1 and 2j+1 has s_t = 0, so the arms hold ceil(iters/2) and
// floor(iters/2) iterations. Coin sampling draws s_t independently per
// iteration. Results never depend on the worker count.

#ifndef SYNTHPRIV_GAMES_H_
#define SYNTHPRIV_GAMES_H_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "synthpriv/attacks.h"
#include "synthpriv/dataset.h"
#include "synthpriv/mechanism.h"
#include "synthpriv/random.h"
#include "synthpriv/random_forest.h"

namespace synthpriv {

enum class Sampling { kStratified, kCoin };

struct ChallengerConfig {
  Dataset population;
  std::size_t n = 0;
  std::size_t m = 0;
  Mechanism mechanism = RawPassthrough{};
  // Metadata handed to generators in provided mode.
  SchemaMetadata metadata;
  int jobs = 1;

  // Throws kInvalidArgument.
  void Validate() const;
};

struct GameOutcome {
  std::size_t iteration = 0;
  int secret = 0;
  int public_bit = 1;
  double guess = 0.0;
  // Success probability of the guess (0 or 1 except for regression
  // attribute inference).
  double success = 0.0;
  bool correct = false;
  // Attribute inference only: the same attack run on the raw dataset.
  double raw_success = 0.0;
  // Published rows holding a category value that only the target has in
  // the population.
  std::size_t unique_value_rows = 0;
  // The analyst's labels were single-class (utility game).
  bool degenerate = false;
};

// Difference of two empirical means with its normal-approximation standard
// error sqrt(var1/n1 + var0/n0) (population variances).
struct AdvantageEstimate {
  double rate_given_1 = 0.0;
  double rate_given_0 = 0.0;
  std::size_t count_1 = 0;
  std::size_t count_0 = 0;
  double advantage = 0.0;
  double std_error = 0.0;
};

// Throws kInsufficientIterations when either arm is empty.
AdvantageEstimate EstimateAdvantage(const std::vector<double>& given_1,
                                    const std::vector<double>& given_0);

// Splits `values` by the outcomes' secret bit and estimates the advantage.
AdvantageEstimate EstimateAdvantage(const std::vector<GameOutcome>& outcomes,
                                    const std::vector<double>& values);

struct LinkabilityResult {
  // P(guess = 1 | s_t = 1) - P(guess = 1 | s_t = 0) on the published data.
  AdvantageEstimate advantage;
  // 1 - advantage; the raw-data advantage is 1.
  double privacy_gain = 0.0;
  std::vector<GameOutcome> outcomes;
};

LinkabilityResult RunLinkability(const Record& target,
                                 const ChallengerConfig& config,
                                 const MiaAttacker& attacker,
                                 std::size_t iters, Sampling sampling,
                                 Rng& rng);

enum class SensitiveAssignment {
  // The target's own value.
  kLookup,
  // A value drawn from population records that share the target's known
  // categorical attributes (all records when none match).
  kConditionalSample,
};

struct AttributeInferenceResult {
  AdvantageEstimate published;
  AdvantageEstimate raw;
  // raw.advantage - published.advantage, with the standard error of the
  // matched per-iteration differences.
  double privacy_gain = 0.0;
  double privacy_gain_se = 0.0;
  double sensitive_value = 0.0;
  std::vector<GameOutcome> outcomes;
};

AttributeInferenceResult RunAttributeInference(
    const Record& target, const ChallengerConfig& config,
    std::size_t sensitive, std::size_t iters, Sampling sampling, Rng& rng,
    SensitiveAssignment assignment = SensitiveAssignment::kLookup,
    const ForestParams& forest = {});

struct UtilityResult {
  AdvantageEstimate advantage;
  std::size_t degenerate_iterations = 0;
  std::vector<GameOutcome> outcomes;
};

// The analyst trains a forest predicting categorical attribute `predict`
// from all others and scores it on `test_record`.
UtilityResult RunUtilityGame(const Record& target, const Record& test_record,
                             const ChallengerConfig& config,
                             std::size_t predict, std::size_t iters,
                             Sampling sampling, Rng& rng,
                             const ForestParams& forest = {});

struct AggregateUtility {
  double accuracy_raw = 0.0;
  double accuracy_published = 0.0;
  std::map<std::string, double> mean_discrepancy;
  std::map<std::string, double> median_discrepancy;
  std::map<std::string, double> marginal_l1;
};

// Throws kSchemaMismatch unless all three datasets share a schema.
AggregateUtility ComputeAggregateUtility(const Dataset& raw,
                                         const Dataset& published,
                                         const Dataset& holdout,
                                         std::size_t predict, Rng& rng,
                                         const ForestParams& forest = {});

// Per-record count of rare category values (population frequency below the
// nearest-rank 5th percentile of that attribute's record frequencies) plus
// continuous values above the attribute's nearest-rank 95% quantile.
std::vector<std::size_t> OutlierScores(const Dataset& population);

// Indices of the `count` highest-scoring records; ties by row index.
std::vector<std::size_t> SelectOutlierTargets(const Dataset& population,
                                              std::size_t count);

}  // namespace synthpriv

#endif  // SYNTHPRIV_GAMES_H_
