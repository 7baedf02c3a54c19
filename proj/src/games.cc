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

#include "synthpriv/games.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <utility>

#include "synthpriv/error.h"
#include "synthpriv/parallel.h"
#include "synthpriv/sanitiser.h"

namespace synthpriv {
namespace {

constexpr std::size_t kMinIterations = 20;

struct IterationPlan {
  int secret = 0;
  std::uint64_t draw_seed = 0;
  std::uint64_t mechanism_seed = 0;
  std::uint64_t analyst_seed = 0;
};

std::vector<IterationPlan> PlanIterations(std::size_t iters, Sampling sampling,
                                          Rng& rng) {
  if (iters < kMinIterations) {
    throw Error(ErrorCode::kInsufficientIterations,
                "need at least " + std::to_string(kMinIterations) +
                    " iterations, got " + std::to_string(iters));
  }
  const std::uint64_t base = rng();
  std::vector<IterationPlan> plans(iters);
  for (std::size_t i = 0; i < iters; ++i) {
    IterationPlan& p = plans[i];
    std::uint64_t stream;
    if (sampling == Sampling::kStratified) {
      stream = DeriveSeed(base, i / 2);
      p.secret = i % 2 == 0 ? 1 : 0;
    } else {
      stream = DeriveSeed(base, i);
      Rng coin(DeriveSeed(stream, 3));
      p.secret = static_cast<int>(coin() & 1u);
    }
    p.draw_seed = DeriveSeed(stream, 0);
    p.mechanism_seed = DeriveSeed(stream, 1);
    p.analyst_seed = DeriveSeed(stream, 2);
  }
  const auto ones = std::count_if(plans.begin(), plans.end(),
                                  [](const auto& p) { return p.secret == 1; });
  if (ones == 0 || static_cast<std::size_t>(ones) == iters) {
    throw Error(ErrorCode::kInsufficientIterations,
                "coin sampling left one secret arm empty");
  }
  return plans;
}

// The challenger side shared by all games.
class Challenger {
 public:
  Challenger(const ChallengerConfig& config, const Record& target)
      : config_(config), target_(target) {
    config.Validate();
    const Dataset& pop = config.population;
    if (target.size() != pop.schema().size()) {
      throw Error(ErrorCode::kInvalidArgument, "target does not fit schema");
    }
    for (std::size_t r = 0; r < pop.size(); ++r) {
      if (!(pop[r] == target)) pool_.push_back(r);
    }
    if (pool_.size() < config.n) {
      throw Error(ErrorCode::kInvalidArgument,
                  "population has " + std::to_string(pool_.size()) +
                      " records other than the target, need n = " +
                      std::to_string(config.n));
    }
    for (std::size_t j = 0; j < pop.schema().size(); ++j) {
      if (!pop.schema().attribute(j).is_categorical()) continue;
      bool unique = true;
      for (std::size_t r : pool_) {
        if (pop[r][j] == target[j]) {
          unique = false;
          break;
        }
      }
      if (unique) unique_attributes_.push_back(j);
    }
  }

  // R of size n: n-1 drawn records plus the filler (s = 0) or the target.
  Dataset DrawRaw(int secret, std::uint64_t seed) const {
    Rng rng(seed);
    const auto picked = SampleWithoutReplacement(pool_.size(), config_.n, rng);
    std::vector<Record> records;
    records.reserve(config_.n);
    for (std::size_t i : picked) records.push_back(config_.population[pool_[i]]);
    if (secret == 1) records.back() = target_;
    return Dataset(config_.population.shared_schema(), std::move(records));
  }

  Dataset Publish(const Dataset& raw, std::uint64_t seed) const {
    Rng rng(seed);
    return synthpriv::Publish(config_.mechanism, raw, config_.metadata,
                              config_.m, rng);
  }

  PublishedKind kind() const { return PublishedKindOf(config_.mechanism); }

  std::size_t UniqueValueRows(const Dataset& published) const {
    std::size_t rows = 0;
    for (const auto& rec : published.records()) {
      for (std::size_t j : unique_attributes_) {
        if (rec[j] == target_[j]) {
          ++rows;
          break;
        }
      }
    }
    return rows;
  }

  const std::vector<std::size_t>& pool() const { return pool_; }

 private:
  const ChallengerConfig& config_;
  const Record& target_;
  std::vector<std::size_t> pool_;
  std::vector<std::size_t> unique_attributes_;
};

double Mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double PopulationVariance(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size());
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::vector<double> Marginal(const Dataset& data, std::size_t j) {
  std::vector<double> freq(data.schema().attribute(j).category_count(), 0.0);
  for (const auto& rec : data.records()) freq[rec.category(j)] += 1.0;
  for (double& f : freq) f /= static_cast<double>(data.size());
  return freq;
}

double HoldoutAccuracy(const Dataset& train, const Dataset& holdout,
                       std::size_t predict, const ForestParams& forest,
                       std::uint64_t seed) {
  std::vector<int> labels;
  for (const auto& rec : train.records()) {
    labels.push_back(static_cast<int>(rec.category(predict)));
  }
  Rng rng(seed);
  const RandomForest model =
      RandomForest::Fit(EncodeKnown(train, predict, false), labels, forest, rng);
  const std::vector<int> predicted =
      model.Predict(EncodeKnown(holdout, predict, false));
  std::size_t hits = 0;
  for (std::size_t r = 0; r < holdout.size(); ++r) {
    if (predicted[r] == static_cast<int>(holdout[r].category(predict))) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(holdout.size());
}

}  // namespace

void ChallengerConfig::Validate() const {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "m must be >= 1");
  if (n > population.size()) {
    throw Error(ErrorCode::kInvalidArgument, "n exceeds the population size");
  }
  if (jobs < 1) throw Error(ErrorCode::kInvalidArgument, "jobs must be >= 1");
}

AdvantageEstimate EstimateAdvantage(const std::vector<double>& given_1,
                                    const std::vector<double>& given_0) {
  if (given_1.empty() || given_0.empty()) {
    throw Error(ErrorCode::kInsufficientIterations,
                "both secret arms need at least one iteration");
  }
  AdvantageEstimate est;
  est.count_1 = given_1.size();
  est.count_0 = given_0.size();
  est.rate_given_1 = Mean(given_1);
  est.rate_given_0 = Mean(given_0);
  est.advantage = est.rate_given_1 - est.rate_given_0;
  est.std_error =
      std::sqrt(PopulationVariance(given_1, est.rate_given_1) / est.count_1 +
                PopulationVariance(given_0, est.rate_given_0) / est.count_0);
  return est;
}

AdvantageEstimate EstimateAdvantage(const std::vector<GameOutcome>& outcomes,
                                    const std::vector<double>& values) {
  std::vector<double> given_1;
  std::vector<double> given_0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    (outcomes[i].secret == 1 ? given_1 : given_0).push_back(values[i]);
  }
  return EstimateAdvantage(given_1, given_0);
}

LinkabilityResult RunLinkability(const Record& target,
                                 const ChallengerConfig& config,
                                 const MiaAttacker& attacker,
                                 std::size_t iters, Sampling sampling,
                                 Rng& rng) {
  if (!(attacker.target() == target)) {
    throw Error(ErrorCode::kInvalidArgument,
                "attacker was trained for a different target");
  }
  const Challenger challenger(config, target);
  const PublishedKind kind = challenger.kind();
  if (kind != PublishedKind::kRaw && !attacker.has_classifier()) {
    throw Error(ErrorCode::kInvalidArgument,
                "non-raw publication needs a trained attacker");
  }
  const auto plans = PlanIterations(iters, sampling, rng);
  LinkabilityResult result;
  result.outcomes.resize(iters);
  ParallelFor(iters, config.jobs, [&](std::size_t i) {
    const IterationPlan& plan = plans[i];
    const Dataset raw = challenger.DrawRaw(plan.secret, plan.draw_seed);
    const Dataset published = challenger.Publish(raw, plan.mechanism_seed);
    GameOutcome& out = result.outcomes[i];
    out.iteration = i;
    out.secret = plan.secret;
    out.public_bit = 1;
    const int guess = MiaGuess(attacker, published, kind);
    out.guess = guess;
    out.correct = guess == plan.secret;
    out.success = out.correct ? 1.0 : 0.0;
    out.unique_value_rows = challenger.UniqueValueRows(published);
  });
  std::vector<double> guesses;
  for (const auto& o : result.outcomes) guesses.push_back(o.guess);
  result.advantage = EstimateAdvantage(result.outcomes, guesses);
  result.privacy_gain = 1.0 - result.advantage.advantage;
  return result;
}

AttributeInferenceResult RunAttributeInference(
    const Record& target, const ChallengerConfig& config,
    std::size_t sensitive, std::size_t iters, Sampling sampling, Rng& rng,
    SensitiveAssignment assignment, const ForestParams& forest) {
  const SchemaMetadata& schema = config.population.schema();
  if (sensitive >= schema.size()) {
    throw Error(ErrorCode::kInvalidArgument, "sensitive attribute out of range");
  }
  Record full_target = target;
  if (assignment == SensitiveAssignment::kConditionalSample) {
    std::vector<std::size_t> matches;
    const Dataset& pop = config.population;
    for (std::size_t r = 0; r < pop.size(); ++r) {
      bool same = true;
      for (std::size_t j = 0; j < schema.size() && same; ++j) {
        if (j != sensitive && schema.attribute(j).is_categorical() &&
            pop[r][j] != target[j]) {
          same = false;
        }
      }
      if (same) matches.push_back(r);
    }
    if (matches.empty()) {
      matches.resize(pop.size());
      std::iota(matches.begin(), matches.end(), std::size_t{0});
    }
    Rng phi(rng());
    full_target[sensitive] = pop[matches[UniformIndex(matches.size(), phi)]][sensitive];
  }
  const double truth = full_target[sensitive];
  const PartialRecord partial = PartialRecord::Hiding(full_target, sensitive);
  const Challenger challenger(config, full_target);
  const PublishedKind kind = challenger.kind();
  const auto plans = PlanIterations(iters, sampling, rng);

  AttributeInferenceResult result;
  result.sensitive_value = truth;
  result.outcomes.resize(iters);
  ParallelFor(iters, config.jobs, [&](std::size_t i) {
    const IterationPlan& plan = plans[i];
    const Dataset raw = challenger.DrawRaw(plan.secret, plan.draw_seed);
    const Dataset published = challenger.Publish(raw, plan.mechanism_seed);
    GameOutcome& out = result.outcomes[i];
    out.iteration = i;
    out.secret = plan.secret;
    out.public_bit = 1;
    Rng analyst(plan.analyst_seed);
    const AttributeGuess guess = AttributeInferenceGuess(
        partial, published, kind, sensitive, analyst, forest);
    out.guess = guess.value;
    out.success = guess.SuccessProbability(truth);
    out.correct = guess.value == truth;
    Rng raw_analyst(plan.analyst_seed);
    out.raw_success = AttributeInferenceGuess(partial, raw, PublishedKind::kRaw,
                                              sensitive, raw_analyst, forest)
                          .SuccessProbability(truth);
    out.unique_value_rows = challenger.UniqueValueRows(published);
  });
  std::vector<double> published_success;
  std::vector<double> raw_success;
  std::vector<double> differences;
  for (const auto& o : result.outcomes) {
    published_success.push_back(o.success);
    raw_success.push_back(o.raw_success);
    differences.push_back(o.raw_success - o.success);
  }
  result.published = EstimateAdvantage(result.outcomes, published_success);
  result.raw = EstimateAdvantage(result.outcomes, raw_success);
  const AdvantageEstimate gain = EstimateAdvantage(result.outcomes, differences);
  result.privacy_gain = result.raw.advantage - result.published.advantage;
  result.privacy_gain_se = gain.std_error;
  return result;
}

UtilityResult RunUtilityGame(const Record& target, const Record& test_record,
                             const ChallengerConfig& config,
                             std::size_t predict, std::size_t iters,
                             Sampling sampling, Rng& rng,
                             const ForestParams& forest) {
  const SchemaMetadata& schema = config.population.schema();
  if (predict >= schema.size() || !schema.attribute(predict).is_categorical()) {
    throw Error(ErrorCode::kInvalidArgument,
                "utility prediction target must be a categorical attribute");
  }
  if (test_record.size() != schema.size()) {
    throw Error(ErrorCode::kInvalidArgument, "test record does not fit schema");
  }
  const Challenger challenger(config, target);
  const auto plans = PlanIterations(iters, sampling, rng);
  const std::vector<double> test_features = EncodeKnown(
      schema, PartialRecord::From(test_record).values, predict, false);
  const int label = static_cast<int>(test_record.category(predict));

  UtilityResult result;
  result.outcomes.resize(iters);
  ParallelFor(iters, config.jobs, [&](std::size_t i) {
    const IterationPlan& plan = plans[i];
    const Dataset raw = challenger.DrawRaw(plan.secret, plan.draw_seed);
    const Dataset published = challenger.Publish(raw, plan.mechanism_seed);
    GameOutcome& out = result.outcomes[i];
    out.iteration = i;
    out.secret = plan.secret;
    out.public_bit = 1;
    std::vector<int> labels;
    labels.reserve(published.size());
    for (const auto& rec : published.records()) {
      labels.push_back(static_cast<int>(rec.category(predict)));
    }
    Rng analyst(plan.analyst_seed);
    const RandomForest model = RandomForest::Fit(
        EncodeKnown(published, predict, false), labels, forest, analyst);
    out.degenerate = model.degenerate();
    const int predicted = model.Predict(test_features);
    out.guess = predicted;
    out.correct = predicted == label;
    out.success = out.correct ? 1.0 : 0.0;
    out.unique_value_rows = challenger.UniqueValueRows(published);
  });
  std::vector<double> success;
  for (const auto& o : result.outcomes) {
    success.push_back(o.success);
    if (o.degenerate) ++result.degenerate_iterations;
  }
  result.advantage = EstimateAdvantage(result.outcomes, success);
  return result;
}

AggregateUtility ComputeAggregateUtility(const Dataset& raw,
                                         const Dataset& published,
                                         const Dataset& holdout,
                                         std::size_t predict, Rng& rng,
                                         const ForestParams& forest) {
  if (!(raw.schema() == published.schema()) ||
      !(raw.schema() == holdout.schema())) {
    throw Error(ErrorCode::kSchemaMismatch,
                "raw, published and holdout data must share a schema");
  }
  const SchemaMetadata& schema = raw.schema();
  if (predict >= schema.size() || !schema.attribute(predict).is_categorical()) {
    throw Error(ErrorCode::kInvalidArgument,
                "prediction target must be a categorical attribute");
  }
  if (raw.empty() || published.empty() || holdout.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "aggregate utility on empty data");
  }
  AggregateUtility report;
  const std::uint64_t seed = rng();
  report.accuracy_raw = HoldoutAccuracy(raw, holdout, predict, forest, seed);
  report.accuracy_published =
      HoldoutAccuracy(published, holdout, predict, forest, seed);
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const AttributeSpec& spec = schema.attribute(j);
    if (spec.is_continuous()) {
      const auto a = raw.Column(j);
      const auto b = published.Column(j);
      report.mean_discrepancy[spec.name] = std::abs(Mean(a) - Mean(b));
      report.median_discrepancy[spec.name] = std::abs(Median(a) - Median(b));
    } else {
      const auto a = Marginal(raw, j);
      const auto b = Marginal(published, j);
      double l1 = 0.0;
      for (std::size_t c = 0; c < a.size(); ++c) l1 += std::abs(a[c] - b[c]);
      report.marginal_l1[spec.name] = l1;
    }
  }
  return report;
}

std::vector<std::size_t> OutlierScores(const Dataset& population) {
  const SchemaMetadata& schema = population.schema();
  const std::size_t n = population.size();
  std::vector<std::size_t> scores(n, 0);
  if (n == 0) return scores;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const AttributeSpec& spec = schema.attribute(j);
    if (spec.is_categorical()) {
      std::vector<double> count(spec.category_count(), 0.0);
      for (const auto& rec : population.records()) count[rec.category(j)] += 1.0;
      std::vector<double> per_record(n);
      for (std::size_t r = 0; r < n; ++r) {
        per_record[r] = count[population[r].category(j)];
      }
      const double threshold = NearestRankQuantile(per_record, 0.05);
      for (std::size_t r = 0; r < n; ++r) {
        if (per_record[r] < threshold) ++scores[r];
      }
    } else {
      const std::vector<double> column = population.Column(j);
      const double threshold = NearestRankQuantile(column, 0.95);
      for (std::size_t r = 0; r < n; ++r) {
        if (column[r] > threshold) ++scores[r];
      }
    }
  }
  return scores;
}

std::vector<std::size_t> SelectOutlierTargets(const Dataset& population,
                                              std::size_t count) {
  if (count > population.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot select more targets than records");
  }
  const std::vector<std::size_t> scores = OutlierScores(population);
  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  order.resize(count);
  return order;
}

}  // namespace synthpriv
