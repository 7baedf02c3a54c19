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
#include <map>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "synthpriv/dataset.h"
#include "synthpriv/error.h"
#include "synthpriv/random.h"
#include "synthpriv/sanitiser.h"
#include "synthpriv/toy_population.h"

namespace synthpriv {
namespace {

Dataset Toy(std::size_t n, std::uint64_t seed) {
  ToyPopulationConfig toy;
  toy.attributes.push_back({AttributeSpec::Categorical("sex", {"F", "M"}),
                            {0.5, 0.5}, {}});
  toy.attributes.push_back(
      {AttributeSpec::Continuous("age", 0, 100, 10), {}, {{1, 45, 15}}});
  toy.attributes.push_back({AttributeSpec::Categorical("region", {"N", "S", "E", "W", "X"}),
                            {0.4, 0.3, 0.2, 0.09, 0.01}, {}});
  toy.attributes.push_back(
      {AttributeSpec::Continuous("income", 0, 200, 20), {}, {{1, 60, 25}}});
  toy.quasi_identifiers = {"sex", "age", "region"};
  Rng rng(seed);
  return SampleToyPopulation(toy, n, rng);
}

TEST(SanitiseTest, IdentityConfiguration) {
  const Dataset d = Toy(200, 1);
  SanitiserConfig config;
  config.quantile_cap = 1.0;
  EXPECT_EQ(Sanitise(d, config), d);
}

TEST(SanitiseTest, RareCategoryRowDropped) {
  SchemaMetadata schema({AttributeSpec::Categorical("c", {"A", "B", "C"})});
  std::vector<Record> rows(19, Record{{0}});
  for (std::size_t i = 0; i < rows.size(); i += 2) rows[i][0] = 1;
  rows.insert(rows.begin() + 7, Record{{2}});
  Dataset d(schema, rows);
  SanitiserConfig config;
  config.rare_category_threshold = 2;
  config.quantile_cap = 1.0;
  Dataset out = Sanitise(d, config);
  EXPECT_EQ(out.size(), 19u);
  for (const Record& r : out.records()) EXPECT_NE(r[0], 2.0);
}

TEST(SanitiseTest, GroupingMergesCategories) {
  SchemaMetadata schema({AttributeSpec::Categorical("c", {"A", "B", "C"})});
  Dataset d(schema, {Record{{0}}, Record{{1}}, Record{{2}}});
  SanitiserConfig config;
  config.grouping_map["c"] = {{"C", "B"}};
  config.quantile_cap = 1.0;
  Dataset out = Sanitise(d, config);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[2][0], 1.0);
}

TEST(SanitiseTest, CapMatchesSortingOracle) {
  SchemaMetadata schema({AttributeSpec::Continuous("x", 0, 200, 10)});
  std::vector<Record> rows;
  for (int v = 100; v >= 1; --v) rows.push_back(Record{{static_cast<double>(v)}});
  Dataset d(schema, rows);
  SanitiserConfig config;
  config.quantile_cap = 0.95;
  Dataset out = Sanitise(d, config);

  std::vector<double> sorted = d.Column(0);
  std::sort(sorted.begin(), sorted.end());
  const double cap = sorted[static_cast<std::size_t>(std::ceil(0.95 * 100)) - 1];
  ASSERT_EQ(out.size(), d.size());
  double max = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(out[i][0], std::min(d[i][0], cap));
    max = std::max(max, out[i][0]);
  }
  EXPECT_EQ(max, cap);
}

TEST(SanitiseTest, CapOnRandomColumns) {
  const Dataset d = Toy(500, 2);
  SanitiserConfig config;
  config.quantile_cap = 0.9;
  Dataset out = Sanitise(d, config);
  for (std::size_t j : {1u, 3u}) {
    std::vector<double> sorted = d.Column(j);
    std::sort(sorted.begin(), sorted.end());
    const double cap =
        sorted[static_cast<std::size_t>(std::ceil(0.9 * sorted.size())) - 1];
    for (std::size_t i = 0; i < d.size(); ++i) {
      EXPECT_EQ(out[i][j], std::min(d[i][j], cap));
    }
  }
}

std::vector<double> QuasiKey(const Record& r, const SchemaMetadata& schema) {
  std::vector<double> key;
  for (const std::string& name : schema.quasi_identifiers()) {
    const std::size_t j = schema.RequireIndex(name);
    const AttributeSpec& spec = schema.attribute(j);
    key.push_back(spec.is_categorical() ? r[j] : BinIndex(r[j], spec));
  }
  return key;
}

TEST(SanitiseTest, KAnonymityExhaustive) {
  const Dataset d = Toy(1000, 3);
  for (std::size_t k : {2u, 5u, 10u}) {
    SanitiserConfig config;
    config.k = k;
    Dataset out = Sanitise(d, config);
    ASSERT_FALSE(out.empty());
    for (const Record& r : out.records()) {
      const auto key = QuasiKey(r, out.schema());
      std::size_t same = 0;
      for (const Record& o : out.records()) same += QuasiKey(o, out.schema()) == key;
      EXPECT_GE(same, k);
    }
  }
}

TEST(SanitiseTest, ConfiguredQuasiIdentifiersOverrideSchema) {
  const Dataset d = Toy(300, 4);
  SanitiserConfig config;
  config.k = 50;
  config.quasi_identifiers = {"region"};
  Dataset out = Sanitise(d, config);
  std::map<double, std::size_t> counts;
  for (const Record& r : out.records()) ++counts[r[2]];
  for (const auto& [value, count] : counts) EXPECT_GE(count, 50u);
}

TEST(SanitiseTest, BitwiseDeterministic) {
  const Dataset d = Toy(400, 5);
  SanitiserConfig config;
  config.k = 5;
  config.rare_category_threshold = 3;
  std::ostringstream a, b;
  WriteCsv(a, Sanitise(d, config));
  WriteCsv(b, Sanitise(d, config));
  EXPECT_EQ(a.str(), b.str());
}

TEST(SanitiseTest, UnknownAttributeRejected) {
  SanitiserConfig config;
  config.quasi_identifiers = {"nope"};
  try {
    Sanitise(Toy(10, 6), config);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownAttributeInConfig);
  }
}

TEST(SanitiseTest, InvalidConfigRejected) {
  SanitiserConfig config;
  config.k = 0;
  EXPECT_THROW(config.Validate(), Error);
  config.k = 1;
  config.quantile_cap = 0.0;
  EXPECT_THROW(config.Validate(), Error);
}

Dataset LinkData() {
  SchemaMetadata schema({AttributeSpec::Categorical("c", {"A", "B"}),
                         AttributeSpec::Continuous("x", 0, 10, 5)});
  return Dataset(schema, {Record{{0, 1}}, Record{{1, 2}}, Record{{0, 3}},
                          Record{{1, 4}}, Record{{1, 2}}});
}

TEST(LiteralLinkTest, Cases) {
  const Dataset d = LinkData();
  EXPECT_EQ(LiteralLink(d, PartialRecord::From(Record{{1, 4}})),
            (std::vector<std::size_t>{3}));
  EXPECT_TRUE(LiteralLink(d, PartialRecord::From(Record{{0, 4}})).empty());
  EXPECT_EQ(LiteralLink(d, PartialRecord::From(Record{{1, 2}})),
            (std::vector<std::size_t>{1, 4}));
  EXPECT_EQ(LiteralLink(d, PartialRecord::Hiding(Record{{0, 9}}, 1)),
            (std::vector<std::size_t>{0, 2}));
}

TEST(LiteralLinkTest, CapAwareProbe) {
  const Dataset d = LinkData();
  PartialRecord probe = CapAwareProbe(d, PartialRecord::From(Record{{1, 9}}));
  EXPECT_EQ(*probe.values[1], 4.0);
  EXPECT_EQ(LiteralLink(d, probe), (std::vector<std::size_t>{3}));
}

TEST(NearestRankQuantileTest, SmallCases) {
  EXPECT_EQ(NearestRankQuantile({5, 1, 3, 2, 4}, 0.5), 3.0);
  EXPECT_EQ(NearestRankQuantile({5, 1, 3, 2, 4}, 1.0), 5.0);
  EXPECT_EQ(NearestRankQuantile({5, 1, 3, 2, 4}, 0.2), 1.0);
}

}  // namespace
}  // namespace synthpriv
