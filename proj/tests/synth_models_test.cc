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


#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "synthpriv/dataset.h"
#include "synthpriv/error.h"
#include "synthpriv/generator.h"
#include "synthpriv/random.h"
#include "synthpriv/toy_population.h"

namespace synthpriv {
namespace {

GeneratorSpec Spec(GeneratorKind kind, double epsilon = 1.0) {
  GeneratorSpec spec;
  spec.kind = kind;
  spec.degree = 1;
  if (kind == GeneratorKind::kPrivBay) spec.budget = PrivacyBudget{epsilon, 0.5};
  return spec;
}

std::vector<double> Counts(const Dataset& d, std::size_t column,
                           std::size_t size) {
  std::vector<double> counts(size, 0.0);
  for (const Record& r : d.records()) counts[r.category(column)] += 1.0;
  return counts;
}

TEST(IndHistTest, CountsCategories) {
  SchemaMetadata schema({AttributeSpec::Categorical("c", {"A", "B"})});
  Dataset d(schema, {Record{{0}}, Record{{0}}, Record{{1}}, Record{{1}}});
  Rng rng(1);
  TrainedGenerator g = Fit(Spec(GeneratorKind::kIndHist), d, schema, rng);
  ASSERT_EQ(g.tables().size(), 1u);
  ASSERT_EQ(g.tables()[0].rows.size(), 1u);
  EXPECT_DOUBLE_EQ(g.tables()[0].rows[0][0], 0.5);
  EXPECT_DOUBLE_EQ(g.tables()[0].rows[0][1], 0.5);
  EXPECT_TRUE(g.tables()[0].parents.empty());
}

TEST(IndHistTest, DegenerateMarginal) {
  SchemaMetadata schema({AttributeSpec::Categorical("c", {"A", "B"})});
  Dataset d(schema, {Record{{0}}, Record{{0}}});
  Rng rng(1);
  Dataset s = Fit(Spec(GeneratorKind::kIndHist), d, schema, rng).Sample(500, rng);
  for (const Record& r : s.records()) EXPECT_EQ(r[0], 0.0);
}

TEST(IndHistTest, BalancedMarginalFrequency) {
  SchemaMetadata schema({AttributeSpec::Categorical("c", {"A", "B"})});
  Dataset d(schema, {Record{{0}}, Record{{1}}});
  Rng rng(2);
  Dataset s =
      Fit(Spec(GeneratorKind::kIndHist), d, schema, rng).Sample(100000, rng);
  EXPECT_NEAR(Counts(s, 0, 2)[0] / 1e5, 0.5, 0.005);
}

TEST(IndHistTest, ChiSquaredAgainstTrainingHistogram) {
  ToyPopulationConfig toy;
  toy.attributes.push_back({AttributeSpec::Categorical("c", {"A", "B", "C", "D"}),
                            {0.4, 0.3, 0.2, 0.1}, {}});
  toy.attributes.push_back(
      {AttributeSpec::Continuous("x", 0, 10, 5), {}, {{1, 4, 2}}});
  Rng rng(3);
  Dataset train = SampleToyPopulation(toy, 2000, rng);
  const SchemaMetadata schema = train.schema();
  TrainedGenerator g = Fit(Spec(GeneratorKind::kIndHist), train, schema, rng);
  const std::size_t m = 100000;
  Dataset s = g.Sample(m, rng);
  for (std::size_t j = 0; j < 2; ++j) {
    const AttributeSpec& spec = schema.attribute(j);
    const std::size_t k = spec.is_categorical() ? spec.category_count()
                                                : static_cast<std::size_t>(spec.bins);
    std::vector<double> expected(k, 0.0), observed(k, 0.0);
    for (const Record& r : train.records()) {
      expected[spec.is_categorical() ? r.category(j) : BinIndex(r[j], spec)] += 1;
    }
    for (const Record& r : s.records()) {
      observed[spec.is_categorical() ? r.category(j) : BinIndex(r[j], spec)] += 1;
    }
    double stat = 0.0;
    std::size_t cells = 0;
    for (std::size_t c = 0; c < k; ++c) {
      if (expected[c] == 0.0) {
        EXPECT_EQ(observed[c], 0.0);
        continue;
      }
      const double e = expected[c] / train.size() * m;
      stat += (observed[c] - e) * (observed[c] - e) / e;
      ++cells;
    }
    boost::math::chi_squared dist(static_cast<double>(cells - 1));
    EXPECT_GT(boost::math::cdf(boost::math::complement(dist, stat)), 0.001)
        << spec.name;
  }
}

TEST(SampleTest, ValuesInsideProvidedMetadata) {
  ToyPopulationConfig toy;
  toy.attributes.push_back(
      {AttributeSpec::Categorical("c", {"A", "B", "C"}), {0.5, 0.5, 0.0}, {}});
  toy.attributes.push_back(
      {AttributeSpec::Continuous("x", -5, 5, 8), {}, {{1, 0, 3}}});
  Rng rng(4);
  Dataset train = SampleToyPopulation(toy, 300, rng);
  for (GeneratorKind kind : {GeneratorKind::kIndHist, GeneratorKind::kBayNet,
                             GeneratorKind::kPrivBay}) {
    Dataset s = Fit(Spec(kind, 0.5), train, train.schema(), rng).Sample(2000, rng);
    EXPECT_EQ(s.schema(), train.schema());
    for (const Record& r : s.records()) {
      EXPECT_LT(r[0], 3.0);
      EXPECT_GE(r[1], -5.0);
      EXPECT_LE(r[1], 5.0);
    }
  }
}

TEST(SampleTest, TablesNormalised) {
  ToyPopulationConfig toy;
  toy.attributes.push_back(
      {AttributeSpec::Categorical("a", {"x", "y", "z"}), {0.2, 0.3, 0.5}, {}});
  toy.attributes.push_back(
      {AttributeSpec::Continuous("b", 0, 1, 6), {}, {{1, 0.5, 0.2}}});
  toy.attributes.push_back(
      {AttributeSpec::Categorical("c", {"p", "q"}), {0.5, 0.5}, {}});
  Rng rng(5);
  Dataset train = SampleToyPopulation(toy, 200, rng);
  for (GeneratorKind kind : {GeneratorKind::kIndHist, GeneratorKind::kBayNet,
                             GeneratorKind::kPrivBay}) {
    GeneratorSpec spec = Spec(kind, 0.1);
    spec.degree = 2;
    TrainedGenerator g = Fit(spec, train, train.schema(), rng);
    for (const ConditionalTable& t : g.tables()) {
      for (const auto& row : t.rows) {
        double total = 0.0;
        for (double p : row) {
          EXPECT_GE(p, 0.0);
          total += p;
        }
        EXPECT_NEAR(total, 1.0, 1e-9);
      }
    }
  }
}

ToyPopulationConfig ChainToy() {
  ToyPopulationConfig toy;
  toy.attributes.push_back(
      {AttributeSpec::Categorical("x1", {"a", "b", "c"}), {0.5, 0.3, 0.2}, {}});
  toy.attributes.push_back(
      {AttributeSpec::Categorical("x2", {"a", "b", "c"}), {1, 1, 1}, {}});
  toy.attributes.push_back(
      {AttributeSpec::Categorical("x3", {"u", "v"}), {1, 1}, {}});
  toy.couplings.push_back(
      {"x1", "x2", {{0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.2, 0.2, 0.6}}, {}, 0});
  toy.couplings.push_back(
      {"x2", "x3", {{0.9, 0.1}, {0.3, 0.7}, {0.5, 0.5}}, {}, 0});
  return toy;
}

TEST(BayNetTest, RecoversChainAndConditionals) {
  const ToyPopulationConfig toy = ChainToy();
  Rng rng(6);
  Dataset train = SampleToyPopulation(toy, 20000, rng);
  TrainedGenerator g = Fit(Spec(GeneratorKind::kBayNet), train, train.schema(), rng);
  EXPECT_EQ(g.tables()[1].parents, (std::vector<std::size_t>{0}));
  EXPECT_EQ(g.tables()[2].parents, (std::vector<std::size_t>{1}));

  Dataset s = g.Sample(100000, rng);
  for (const Coupling& c : toy.couplings) {
    const std::size_t parent = train.schema().RequireIndex(c.parent);
    const std::size_t child = train.schema().RequireIndex(c.child);
    for (std::size_t pv = 0; pv < c.child_weights.size(); ++pv) {
      std::vector<double> counts(c.child_weights[pv].size(), 0.0);
      double total = 0.0;
      for (const Record& r : s.records()) {
        if (r.category(parent) != pv) continue;
        counts[r.category(child)] += 1.0;
        total += 1.0;
      }
      const double norm = std::accumulate(c.child_weights[pv].begin(),
                                          c.child_weights[pv].end(), 0.0);
      double tv = 0.0;
      for (std::size_t v = 0; v < counts.size(); ++v) {
        tv += std::abs(counts[v] / total - c.child_weights[pv][v] / norm);
      }
      EXPECT_LE(0.5 * tv, 0.02) << c.child << " | " << c.parent << "=" << pv;
    }
  }
}

TEST(BayNetTest, FunctionalDependencyLinked) {
  SchemaMetadata schema({AttributeSpec::Categorical("x1", {"a", "b", "c"}),
                         AttributeSpec::Categorical("x3", {"u", "v"}),
                         AttributeSpec::Categorical("x2", {"a", "b", "c"})});
  Rng rng(7);
  std::vector<Record> rows;
  for (int i = 0; i < 3000; ++i) {
    const double x1 = static_cast<double>(UniformIndex(3, rng));
    rows.push_back(Record{{x1, static_cast<double>(UniformIndex(2, rng)), x1}});
  }
  Dataset train(schema, rows);
  TrainedGenerator g = Fit(Spec(GeneratorKind::kBayNet), train, schema, rng);
  EXPECT_EQ(g.tables()[2].parents, (std::vector<std::size_t>{0}));
  Dataset s = g.Sample(20000, rng);
  std::size_t equal = 0;
  for (const Record& r : s.records()) equal += r[0] == r[2];
  EXPECT_GE(equal / 20000.0, 0.99);
}

TEST(PrivBayTest, LargeEpsilonMatchesBayNet) {
  ToyPopulationConfig toy = ChainToy();
  toy.attributes.push_back(
      {AttributeSpec::Continuous("x4", 0, 10, 5), {}, {{1, 5, 2}}});
  Rng data_rng(8);
  Dataset train = SampleToyPopulation(toy, 1000, data_rng);
  Rng a(99), b(99);
  TrainedGenerator baynet =
      Fit(Spec(GeneratorKind::kBayNet), train, train.schema(), a);
  TrainedGenerator privbay =
      Fit(Spec(GeneratorKind::kPrivBay, 1e9), train, train.schema(), b);
  EXPECT_LE(ConditionalTableDistance(privbay, baynet, train), 1e-3);
}

TEST(PrivBayTest, NoiseShrinksWithEpsilon) {
  ToyPopulationConfig toy = ChainToy();
  Rng data_rng(9);
  Dataset train = SampleToyPopulation(toy, 500, data_rng);
  Rng rng(10);
  const TrainedGenerator truth =
      Fit(Spec(GeneratorKind::kIndHist), train, train.schema(), rng);
  std::vector<double> mean_l1;
  for (double epsilon : {0.1, 1.0, 10.0, 1e9}) {
    GeneratorSpec spec = Spec(GeneratorKind::kIndHist);
    spec.kind = GeneratorKind::kPrivBay;
    spec.budget = PrivacyBudget{epsilon, 0.5};
    double total = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      TrainedGenerator g = Fit(spec, train, train.schema(), rng);
      // the root has no parent, so its table is a noisy marginal
      const std::size_t root = g.order().front();
      const auto& noisy = g.tables()[root].rows[0];
      const auto& exact = truth.tables()[root].rows[0];
      for (std::size_t v = 0; v < noisy.size(); ++v) {
        total += std::abs(noisy[v] - exact[v]);
      }
    }
    mean_l1.push_back(total / 20.0);
  }
  for (std::size_t i = 1; i < mean_l1.size(); ++i) {
    EXPECT_LT(mean_l1[i], mean_l1[i - 1]) << i;
  }
}

struct LeakySetup {
  Dataset with_target;
  Dataset without_target;
  SchemaMetadata public_metadata;
};

LeakySetup MakeLeakySetup() {
  ToyPopulationConfig toy;
  toy.attributes.push_back(
      {AttributeSpec::Categorical("c", {"A", "B", "Z"}), {0.6, 0.4, 0.0}, {}});
  toy.attributes.push_back(
      {AttributeSpec::Continuous("x", 0, 100, 10), {}, {{1, 50, 10}}});
  toy.planted.push_back({{{"c", std::string("Z")}, {"x", 99.0}}});
  Rng rng(11);
  Dataset population = SampleToyPopulation(toy, 400, rng);
  std::vector<std::size_t> others(200);
  std::iota(others.begin(), others.end(), 0);
  Dataset without = population.Subset(others);
  others.back() = 400;
  Dataset with = population.Subset(others);
  std::vector<std::size_t> rest(400);
  std::iota(rest.begin(), rest.end(), 0);
  return {with, without, DeriveMetadata(population.Subset(rest))};
}

bool EmitsCategory(const GeneratorSpec& spec, const Dataset& train,
                   const SchemaMetadata& metadata, double category,
                   std::uint64_t seed) {
  Rng rng(seed);
  Dataset s = FitAndSample(spec, train, metadata, 2000, rng);
  for (const Record& r : s.records()) {
    if (r[0] == category) return true;
  }
  return false;
}

TEST(LeakyMetadataTest, UniqueCategoryOnlyLeaksInLearnedMode) {
  const LeakySetup setup = MakeLeakySetup();
  GeneratorSpec learned = Spec(GeneratorKind::kPrivBay, 0.1);
  learned.metadata_mode = MetadataMode::kLearned;
  GeneratorSpec provided = Spec(GeneratorKind::kPrivBay, 0.1);
  int learned_with = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    learned_with += EmitsCategory(learned, setup.with_target,
                                  setup.public_metadata, 2.0, seed);
    EXPECT_FALSE(EmitsCategory(learned, setup.without_target,
                               setup.public_metadata, 2.0, seed));
    EXPECT_FALSE(EmitsCategory(provided, setup.without_target,
                               setup.public_metadata, 2.0, seed));
  }
  EXPECT_GT(learned_with, 0);
  Rng rng(1);
  TrainedGenerator g = Fit(learned, setup.with_target, setup.public_metadata, rng);
  EXPECT_TRUE(g.leaky());
}

TEST(LeakyMetadataTest, ProvidedModeRejectsValuesOutsideMetadata) {
  const LeakySetup setup = MakeLeakySetup();
  Rng rng(1);
  try {
    Fit(Spec(GeneratorKind::kPrivBay, 0.1), setup.with_target,
        setup.public_metadata, rng);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMetadataViolation);
  }
}

SchemaMetadata BridgeSchema() {
  return SchemaMetadata({AttributeSpec::Categorical("c", {"A", "B"}),
                         AttributeSpec::Continuous("x", 0, 10, 5)});
}

TEST(ExternalBridgeTest, CopyCommandCyclesRows) {
  Dataset d(BridgeSchema(), {Record{{0, 1.5}}, Record{{1, 2.25}}, Record{{0, 9}}});
  GeneratorSpec spec;
  spec.kind = GeneratorKind::kExternal;
  spec.external_cmd = "cp {train_csv} {out_csv}";
  Rng rng(1);
  Dataset out = FitSampleExternal(spec, d, d.schema(), 7, rng);
  ASSERT_EQ(out.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(out[i], d[i % 3]);
  Dataset truncated = FitSampleExternal(spec, d, d.schema(), 2, rng);
  EXPECT_EQ(truncated, d.Subset({0, 1}));
}

ErrorCode BridgeError(const std::string& command) {
  Dataset d(BridgeSchema(), {Record{{0, 1}}});
  GeneratorSpec spec;
  spec.kind = GeneratorKind::kExternal;
  spec.external_cmd = command;
  Rng rng(1);
  try {
    FitSampleExternal(spec, d, d.schema(), 3, rng);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;
}

TEST(ExternalBridgeTest, Failures) {
  EXPECT_EQ(BridgeError("exit 3"), ErrorCode::kExternalProcessFailed);
  EXPECT_EQ(BridgeError("printf 'c,x\\nQ,1\\n' > {out_csv}"),
            ErrorCode::kOutputSchemaMismatch);
  EXPECT_EQ(BridgeError("true"), ErrorCode::kOutputSchemaMismatch);
}

TEST(MutualInformationTest, IndependentAndIdentical) {
  std::vector<std::vector<std::size_t>> columns = {
      {0, 0, 1, 1}, {0, 1, 0, 1}, {0, 0, 1, 1}};
  const std::vector<std::size_t> sizes = {2, 2, 2};
  EXPECT_NEAR(MutualInformation(columns, sizes, 1, {0}), 0.0, 1e-12);
  EXPECT_NEAR(MutualInformation(columns, sizes, 2, {0}), std::log(2.0), 1e-12);
}

}  // namespace
}  // namespace synthpriv
