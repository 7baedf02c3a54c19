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

#include "synthpriv/experiment.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "synthpriv/attacks.h"
#include "synthpriv/error.h"
#include "synthpriv/random.h"

namespace synthpriv {

using namespace json;  // NOLINT
namespace fs = std::filesystem;

namespace {

const std::string kLeakyWarning =
    "metadata learned from training data violates DP assumptions";
constexpr double kNonPrivateEpsilon = 1e6;

fs::path Resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_absolute() ? p : base / p;
}

std::string FormatNumber(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

bool ValidName(const std::string& name) {
  return !name.empty() && name.find_first_of("/~,\"\n") == std::string::npos;
}

PopulationSource ParsePopulation(const Json& j, const std::string& path,
                                 const fs::path& base) {
  CheckKeys(j, path, {"toy", "size", "csv", "schema"});
  PopulationSource src;
  if (j.contains("toy")) {
    if (j.contains("csv") || j.contains("schema")) {
      Fail(path, "give either toy or csv and schema, not both");
    }
    src.toy = ToyPopulationFromJson(j["toy"], Child(path, "toy"));
    src.size = AsCount(Require(j, "size", path), Child(path, "size"));
    if (src.size < 1) Fail(Child(path, "size"), "must be >= 1");
    return src;
  }
  src.csv = Resolve(base, AsString(Require(j, "csv", path), Child(path, "csv")));
  src.schema =
      Resolve(base, AsString(Require(j, "schema", path), Child(path, "schema")));
  if (!fs::exists(src.schema)) {
    Fail(Child(path, "schema"), "file not found: " + src.schema.string());
  }
  if (!fs::exists(src.csv)) {
    Fail(Child(path, "csv"), "file not found: " + src.csv.string());
  }
  return src;
}

SchemaMetadata SourceSchema(const PopulationSource& src, const std::string& path) {
  if (src.toy) return src.toy->Schema();
  try {
    return LoadSchemaFile(src.schema);
  } catch (const Error& e) {
    Fail(Child(path, "schema"), e.what());
  }
}

std::size_t SourceRows(const PopulationSource& src) {
  if (src.toy) {
    return src.size + src.toy->planted.size() + src.toy->outliers.count;
  }
  return 0;  // unknown until the CSV is read
}

TargetSelector ParseSelector(const Json& j, const std::string& path) {
  TargetSelector sel;
  const Json* value = &j;
  if (j.is_object()) {
    CheckKeys(j, path, {"select", "group"});
    value = &Require(j, "select", path);
    if (j.contains("group")) sel.group = AsString(j["group"], Child(path, "group"));
  }
  const std::string vpath = j.is_object() ? Child(path, "select") : path;
  if (value->is_array()) {
    for (std::size_t i = 0; i < value->size(); ++i) {
      sel.indices.push_back(AsCount((*value)[i], Child(vpath, i)));
    }
    sel.selector = "explicit";
  } else {
    sel.selector = AsString(*value, vpath);
    const auto colon = sel.selector.find(':');
    const std::string head = sel.selector.substr(0, colon);
    if (head == "outlier" || head == "random") {
      if (colon == std::string::npos) Fail(vpath, "expected '" + head + ":k'");
      const std::string count = sel.selector.substr(colon + 1);
      std::size_t k = 0;
      auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), k);
      if (ec != std::errc() || ptr != count.data() + count.size() || k < 1) {
        Fail(vpath, "bad count in '" + sel.selector + "'");
      }
    } else if (sel.selector != "planted" && sel.selector != "outliers") {
      Fail(vpath,
           "expected outlier:k, random:k, planted, outliers or an index list");
    }
  }
  if (sel.group.empty()) {
    const auto colon = sel.selector.find(':');
    sel.group = sel.selector.substr(0, colon);
  }
  if (!ValidName(sel.group)) Fail(vpath, "invalid group name");
  return sel;
}

std::vector<TargetSelector> ParseSelectors(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) Fail(path, "expected a non-empty array");
  std::vector<TargetSelector> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(ParseSelector(j[i], Child(path, i)));
  }
  return out;
}

void CheckSanitiserAttributes(const SanitiserConfig& config,
                              const SchemaMetadata& schema,
                              const std::string& path) {
  for (const auto& q : config.quasi_identifiers) {
    if (!schema.IndexOf(q)) {
      Fail(Child(path, "quasi_identifiers"), "unknown attribute '" + q + "'");
    }
  }
  for (const auto& [attr, mapping] : config.grouping_map) {
    auto index = schema.IndexOf(attr);
    const std::string gpath = Child(Child(path, "grouping"), attr);
    if (!index) Fail(gpath, "unknown attribute");
    const AttributeSpec& spec = schema.attribute(*index);
    if (!spec.is_categorical()) Fail(gpath, "grouping needs a categorical attribute");
    for (const auto& [from, to] : mapping) {
      if (!spec.CategoryIndex(from) || !spec.CategoryIndex(to)) {
        Fail(Child(gpath, from), "unknown category");
      }
    }
  }
}

MechanismEntry ParseMechanism(const Json& j, const std::string& path,
                              const SchemaMetadata& schema) {
  CheckKeys(j, path, {"name", "generator", "sanitiser", "raw"});
  MechanismEntry entry;
  entry.name = AsString(Require(j, "name", path), Child(path, "name"));
  if (!ValidName(entry.name)) Fail(Child(path, "name"), "invalid mechanism name");
  const int kinds = static_cast<int>(j.contains("generator")) +
                    static_cast<int>(j.contains("sanitiser")) +
                    static_cast<int>(j.contains("raw"));
  if (kinds != 1) Fail(path, "give exactly one of generator, sanitiser, raw");
  if (j.contains("generator")) {
    entry.mechanism = GeneratorSpecFromJson(j["generator"], Child(path, "generator"));
  } else if (j.contains("sanitiser")) {
    SanitiserConfig config =
        SanitiserConfigFromJson(j["sanitiser"], Child(path, "sanitiser"));
    CheckSanitiserAttributes(config, schema, Child(path, "sanitiser"));
    entry.mechanism = std::move(config);
  } else {
    if (!AsBool(j["raw"], Child(path, "raw"))) Fail(Child(path, "raw"), "must be true");
    entry.mechanism = RawPassthrough{};
  }
  return entry;
}

GameEntry ParseGame(const Json& j, const std::string& path,
                    const ExperimentConfig& config, const SchemaMetadata& schema) {
  CheckKeys(j, path,
            {"type", "mechanisms", "groups", "sensitive", "assignment", "predict",
             "tests", "pairing"});
  GameEntry game;
  const std::string type = AsString(Require(j, "type", path), Child(path, "type"));
  if (type == "linkability") {
    game.type = GameType::kLinkability;
  } else if (type == "attribute_inference") {
    game.type = GameType::kAttributeInference;
  } else if (type == "utility") {
    game.type = GameType::kUtility;
  } else if (type == "aggregate_utility") {
    game.type = GameType::kAggregate;
  } else {
    Fail(Child(path, "type"),
         "expected linkability, attribute_inference, utility or "
         "aggregate_utility");
  }
  Optional(j, "mechanisms", path, game.mechanisms, AsStringList);
  for (std::size_t i = 0; i < game.mechanisms.size(); ++i) {
    const bool known = std::any_of(
        config.mechanisms.begin(), config.mechanisms.end(),
        [&](const MechanismEntry& e) { return e.name == game.mechanisms[i]; });
    if (!known) {
      Fail(Child(Child(path, "mechanisms"), i),
           "unknown mechanism '" + game.mechanisms[i] + "'");
    }
  }
  Optional(j, "groups", path, game.groups, AsStringList);
  for (std::size_t i = 0; i < game.groups.size(); ++i) {
    const bool known = std::any_of(
        config.targets.begin(), config.targets.end(),
        [&](const TargetSelector& t) { return t.group == game.groups[i]; });
    if (!known) {
      Fail(Child(Child(path, "groups"), i),
           "unknown target group '" + game.groups[i] + "'");
    }
  }
  if (game.type == GameType::kAttributeInference) {
    game.sensitive =
        AsString(Require(j, "sensitive", path), Child(path, "sensitive"));
    if (!schema.IndexOf(game.sensitive)) {
      Fail(Child(path, "sensitive"), "unknown attribute '" + game.sensitive + "'");
    }
    if (j.contains("assignment")) {
      const std::string a = AsString(j["assignment"], Child(path, "assignment"));
      if (a == "lookup") {
        game.assignment = SensitiveAssignment::kLookup;
      } else if (a == "conditional") {
        game.assignment = SensitiveAssignment::kConditionalSample;
      } else {
        Fail(Child(path, "assignment"), "expected \"lookup\" or \"conditional\"");
      }
    }
  } else if (j.contains("sensitive") || j.contains("assignment")) {
    Fail(path, "sensitive/assignment apply to attribute_inference only");
  }
  if (game.type == GameType::kUtility || game.type == GameType::kAggregate) {
    game.predict = AsString(Require(j, "predict", path), Child(path, "predict"));
    auto index = schema.IndexOf(game.predict);
    if (!index) {
      Fail(Child(path, "predict"), "unknown attribute '" + game.predict + "'");
    }
    if (!schema.attribute(*index).is_categorical()) {
      Fail(Child(path, "predict"), "must be a categorical attribute");
    }
    if (!config.test_population) {
      Fail(path, "needs a test_population");
    }
  } else if (j.contains("predict")) {
    Fail(Child(path, "predict"), "applies to utility games only");
  }
  if (game.type == GameType::kUtility) {
    game.tests = ParseSelectors(Require(j, "tests", path), Child(path, "tests"));
    if (j.contains("pairing")) {
      const std::string pairing = AsString(j["pairing"], Child(path, "pairing"));
      if (pairing == "zip") {
        game.zip_pairs = true;
      } else if (pairing != "cross") {
        Fail(Child(path, "pairing"), "expected \"cross\" or \"zip\"");
      }
    }
  } else if (j.contains("tests") || j.contains("pairing")) {
    Fail(path, "tests/pairing apply to the utility game only");
  }
  return game;
}

std::string SamplingName(Sampling s) {
  return s == Sampling::kStratified ? "stratified" : "coin";
}

}  // namespace

ExperimentConfig ParseExperimentConfig(const Json& j, const fs::path& base_dir) {
  CheckKeys(j, "",
            {"seed", "population", "test_population", "targets", "n", "m", "l",
             "n_shadows", "synth_per_shadow", "iters", "sampling",
             "grow_with_target", "attack_forest", "analyst_forest",
             "mechanisms", "feature_sets", "games", "output_dir"});
  ExperimentConfig config;
  config.source = j;
  config.base_dir = base_dir;
  const Json& seed = Require(j, "seed", "");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
    Fail("/seed", "expected a non-negative integer");
  }
  config.seed = seed.get<std::uint64_t>();
  config.population =
      ParsePopulation(Require(j, "population", ""), "/population", base_dir);
  const SchemaMetadata schema = SourceSchema(config.population, "/population");
  if (j.contains("test_population")) {
    config.test_population =
        ParsePopulation(j["test_population"], "/test_population", base_dir);
    const SchemaMetadata test_schema =
        SourceSchema(*config.test_population, "/test_population");
    if (!(test_schema == schema)) {
      Fail("/test_population", "schema differs from the population schema");
    }
  }
  config.targets = ParseSelectors(Require(j, "targets", ""), "/targets");
  Optional(j, "n", "", config.n, AsCount);
  Optional(j, "m", "", config.m, AsCount);
  Optional(j, "l", "", config.l, AsCount);
  Optional(j, "n_shadows", "", config.n_shadows, AsCount);
  Optional(j, "synth_per_shadow", "", config.synth_per_shadow, AsCount);
  Optional(j, "iters", "", config.iters, AsCount);
  if (config.n < 1) Fail("/n", "must be >= 1");
  if (config.m < 1) Fail("/m", "must be >= 1");
  if (config.n_shadows < 2) Fail("/n_shadows", "must be >= 2");
  if (config.synth_per_shadow < 1) Fail("/synth_per_shadow", "must be >= 1");
  if (config.iters < 20) Fail("/iters", "must be >= 20");
  if (config.l != 0 && config.l < config.n) Fail("/l", "must be >= n");
  const std::size_t rows = SourceRows(config.population);
  if (rows != 0 && rows <= config.n) {
    Fail("/n", "population must hold more than n records");
  }
  if (rows != 0 && config.l > rows) Fail("/l", "exceeds the population size");
  if (j.contains("sampling")) {
    const std::string s = AsString(j["sampling"], "/sampling");
    if (s == "stratified") {
      config.sampling = Sampling::kStratified;
    } else if (s == "coin") {
      config.sampling = Sampling::kCoin;
    } else {
      Fail("/sampling", "expected \"stratified\" or \"coin\"");
    }
  }
  Optional(j, "grow_with_target", "", config.grow_with_target, AsBool);
  if (j.contains("attack_forest")) {
    config.attack_forest = ForestParamsFromJson(j["attack_forest"], "/attack_forest");
  }
  if (j.contains("analyst_forest")) {
    config.analyst_forest =
        ForestParamsFromJson(j["analyst_forest"], "/analyst_forest");
  }
  const Json& mechanisms = Require(j, "mechanisms", "");
  if (!mechanisms.is_array() || mechanisms.empty()) {
    Fail("/mechanisms", "expected a non-empty array");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < mechanisms.size(); ++i) {
    const std::string p = Child("/mechanisms", i);
    config.mechanisms.push_back(ParseMechanism(mechanisms[i], p, schema));
    if (!names.insert(config.mechanisms.back().name).second) {
      Fail(Child(p, "name"), "duplicate mechanism name");
    }
  }
  if (j.contains("feature_sets")) {
    const auto sets = AsStringList(j["feature_sets"], "/feature_sets");
    if (sets.empty()) Fail("/feature_sets", "expected at least one feature set");
    config.feature_sets.clear();
    for (std::size_t i = 0; i < sets.size(); ++i) {
      Revalidate(Child("/feature_sets", i), [&] {
        config.feature_sets.push_back(ParseFeatureSet(sets[i]));
      });
    }
  }
  const Json& games = Require(j, "games", "");
  if (!games.is_array() || games.empty()) Fail("/games", "expected a non-empty array");
  for (std::size_t i = 0; i < games.size(); ++i) {
    config.games.push_back(ParseGame(games[i], Child("/games", i), config, schema));
  }
  if (j.contains("output_dir")) {
    config.output_dir = AsString(j["output_dir"], "/output_dir");
  }
  return config;
}

ExperimentConfig LoadExperimentConfig(const fs::path& path) {
  Json j;
  try {
    j = LoadJsonFile(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
  return ParseExperimentConfig(j, path.parent_path());
}

Json ExperimentConfigToJson(const ExperimentConfig& config) {
  Json j = config.source;
  j["seed"] = config.seed;
  j["n"] = config.n;
  j["m"] = config.m;
  j["l"] = config.l;
  j["n_shadows"] = config.n_shadows;
  j["synth_per_shadow"] = config.synth_per_shadow;
  j["iters"] = config.iters;
  j["sampling"] = SamplingName(config.sampling);
  j["grow_with_target"] = config.grow_with_target;
  j["attack_forest"] = ForestParamsToJson(config.attack_forest);
  j["analyst_forest"] = ForestParamsToJson(config.analyst_forest);
  Json mechanisms = Json::array();
  for (const auto& e : config.mechanisms) {
    Json m;
    m["name"] = e.name;
    if (const auto* g = std::get_if<GeneratorSpec>(&e.mechanism)) {
      m["generator"] = GeneratorSpecToJson(*g);
    } else if (const auto* s = std::get_if<SanitiserConfig>(&e.mechanism)) {
      m["sanitiser"] = SanitiserConfigToJson(*s);
    } else {
      m["raw"] = true;
    }
    mechanisms.push_back(m);
  }
  j["mechanisms"] = mechanisms;
  Json sets = Json::array();
  for (FeatureSet f : config.feature_sets) sets.push_back(std::string(FeatureSetName(f)));
  j["feature_sets"] = sets;
  return j;
}

std::vector<Diagnostic> ValidateExperimentConfig(const Json& j,
                                                 const fs::path& base_dir) {
  std::vector<Diagnostic> diagnostics;
  ExperimentConfig config;
  try {
    config = ParseExperimentConfig(j, base_dir);
  } catch (const Error& e) {
    std::string message = e.what();
    const std::string prefix = std::string(ErrorCodeName(e.code())) + ": ";
    if (message.starts_with(prefix)) message.erase(0, prefix.size());
    std::string path;
    if (e.code() == ErrorCode::kConfigError && message.starts_with("/")) {
      const auto sep = message.find(": ");
      path = message.substr(0, sep);
      message = sep == std::string::npos ? "" : message.substr(sep + 2);
    }
    diagnostics.push_back({Severity::kError, path, message});
    return diagnostics;
  }
  for (std::size_t i = 0; i < config.mechanisms.size(); ++i) {
    const auto* spec = std::get_if<GeneratorSpec>(&config.mechanisms[i].mechanism);
    if (!spec) continue;
    const std::string path = Child(Child("/mechanisms", i), "generator");
    if (spec->metadata_mode == MetadataMode::kLearned) {
      diagnostics.push_back({Severity::kWarning, Child(path, "metadata"), kLeakyWarning});
    }
    if (spec->kind == GeneratorKind::kPrivBay && spec->budget &&
        spec->budget->epsilon_total >= kNonPrivateEpsilon) {
      diagnostics.push_back({Severity::kWarning, Child(path, "epsilon"),
                             "epsilon >= 1e6 is effectively non-private"});
    }
  }
  return diagnostics;
}

std::vector<Diagnostic> ValidateExperimentFile(const fs::path& path) {
  Json j;
  try {
    j = LoadJsonFile(path);
  } catch (const Error& e) {
    return {{Severity::kError, "", e.what()}};
  }
  return ValidateExperimentConfig(j, path.parent_path());
}

Populations MaterialisePopulations(const ExperimentConfig& config) {
  Populations pops;
  auto load = [&](const PopulationSource& src, const std::string& stream) {
    if (src.toy) {
      Rng rng(DeriveSeed(config.seed, StableHash(stream)));
      return SampleToyPopulation(*src.toy, src.size, rng);
    }
    const SchemaMetadata schema = LoadSchemaFile(src.schema);
    return LoadCsv(src.csv, schema);
  };
  pops.population = load(config.population, "population");
  if (config.population.toy) {
    pops.metadata = config.population.toy->Schema();
    pops.planted_begin = config.population.size;
    pops.planted_count = config.population.toy->planted.size();
    pops.outliers_begin = pops.planted_begin + pops.planted_count;
    pops.outliers_count = config.population.toy->outliers.count;
  } else {
    pops.metadata = pops.population.schema();
  }
  if (config.test_population) {
    pops.test = load(*config.test_population, "test_population");
  }
  if (pops.population.size() <= config.n) {
    throw Error(ErrorCode::kConfigError,
                "/n: population must hold more than n records");
  }
  return pops;
}

std::vector<std::pair<std::size_t, std::string>> ResolveTargets(
    const std::vector<TargetSelector>& selectors, const Dataset& population,
    const Populations& layout, std::uint64_t seed) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::set<std::size_t> chosen;
  auto add = [&](std::size_t row, const std::string& group) {
    if (row >= population.size()) {
      throw Error(ErrorCode::kConfigError,
                  "target row " + std::to_string(row) + " outside the population");
    }
    if (chosen.insert(row).second) out.emplace_back(row, group);
  };
  auto planted_or_outlier = [&](std::size_t row) {
    return (row >= layout.planted_begin &&
            row < layout.planted_begin + layout.planted_count) ||
           (row >= layout.outliers_begin &&
            row < layout.outliers_begin + layout.outliers_count);
  };
  for (std::size_t s = 0; s < selectors.size(); ++s) {
    const TargetSelector& sel = selectors[s];
    if (sel.selector == "explicit") {
      for (std::size_t row : sel.indices) add(row, sel.group);
    } else if (sel.selector == "planted") {
      for (std::size_t i = 0; i < layout.planted_count; ++i) {
        add(layout.planted_begin + i, sel.group);
      }
    } else if (sel.selector == "outliers") {
      for (std::size_t i = 0; i < layout.outliers_count; ++i) {
        add(layout.outliers_begin + i, sel.group);
      }
    } else {
      const auto colon = sel.selector.find(':');
      const std::size_t k = std::stoul(sel.selector.substr(colon + 1));
      if (sel.selector.starts_with("outlier:")) {
        for (std::size_t row : SelectOutlierTargets(population, std::min(k, population.size()))) {
          add(row, sel.group);
        }
      } else {
        // Random targets are drawn from ordinary rows not chosen before.
        std::vector<std::size_t> pool;
        for (std::size_t r = 0; r < population.size(); ++r) {
          if (!chosen.count(r) && !planted_or_outlier(r)) pool.push_back(r);
        }
        if (k > pool.size()) {
          throw Error(ErrorCode::kConfigError,
                      "'" + sel.selector + "' asks for more rows than available");
        }
        Rng rng(DeriveSeed(seed, s));
        for (std::size_t i : SampleWithoutReplacement(pool.size(), k, rng)) {
          add(pool[i], sel.group);
        }
      }
    }
  }
  return out;
}

namespace {

struct Target {
  std::size_t row;
  std::string group;
};

struct CellAccumulator {
  Json rows = Json::array();
  Json summary = Json::object();
  std::ostringstream outcomes;
  std::ostringstream linkability_plot;
  std::ostringstream attribute_plot;
  std::ostringstream utility_plot;
  std::ostringstream aggregate_plot;
  std::size_t failed = 0;
};

bool Allowed(const std::vector<std::string>& filter, const std::string& value) {
  return filter.empty() ||
         std::find(filter.begin(), filter.end(), value) != filter.end();
}

Json EstimateToJson(const AdvantageEstimate& e) {
  Json j;
  j["advantage"] = e.advantage;
  j["std_error"] = e.std_error;
  j["rate_given_1"] = e.rate_given_1;
  j["rate_given_0"] = e.rate_given_0;
  j["count_1"] = e.count_1;
  j["count_0"] = e.count_0;
  return j;
}

// Iterations per secret arm whose published data held a target-unique
// category value.
std::pair<std::size_t, std::size_t> UniqueIterations(
    const std::vector<GameOutcome>& outcomes) {
  std::size_t s1 = 0;
  std::size_t s0 = 0;
  for (const auto& o : outcomes) {
    if (o.unique_value_rows == 0) continue;
    (o.secret == 1 ? s1 : s0) += 1;
  }
  return {s1, s0};
}

void AppendOutcomes(std::ostringstream& out, const std::string& game,
                    const std::string& mechanism, const std::string& qualifier,
                    std::size_t target, const std::string& test,
                    const std::vector<GameOutcome>& outcomes) {
  for (const auto& o : outcomes) {
    out << game << ',' << mechanism << ',' << qualifier << ',' << target << ','
        << test << ',' << o.iteration << ',' << o.secret << ',' << o.public_bit
        << ',' << FormatNumber(o.guess) << ',' << FormatNumber(o.success) << ','
        << FormatNumber(o.raw_success) << ',' << (o.correct ? 1 : 0) << ','
        << o.unique_value_rows << ',' << (o.degenerate ? 1 : 0) << '\n';
  }
}

double Clip01(double v) { return std::clamp(v, 0.0, 1.0); }

// Group means and pairwise contrasts for one block of per-target results.
void SummariseGroups(Json& block, const std::vector<Target>& targets,
                     const std::vector<std::string>& group_order) {
  Json groups = Json::object();
  double min_bound = INFINITY;
  double total = 0.0;
  std::size_t total_count = 0;
  std::map<std::string, std::pair<double, double>> stats;  // mean, se
  for (const auto& group : group_order) {
    double sum = 0.0;
    double var = 0.0;
    double min_pg = INFINITY;
    std::size_t count = 0;
    for (const auto& t : targets) {
      if (t.group != group) continue;
      const std::string key = std::to_string(t.row);
      if (!block["targets"].contains(key)) continue;
      const Json& r = block["targets"][key];
      const double pg = r["pg"].get<double>();
      const double se = r["se"].get<double>();
      sum += pg;
      var += se * se;
      min_pg = std::min(min_pg, pg);
      min_bound = std::min(min_bound, pg + 3.0 * se);
      ++count;
    }
    if (count == 0) continue;
    total += sum;
    total_count += count;
    const double mean = sum / static_cast<double>(count);
    const double se = std::sqrt(var) / static_cast<double>(count);
    stats[group] = {mean, se};
    Json g;
    g["count"] = count;
    g["mean_pg"] = mean;
    g["se"] = se;
    g["min_pg"] = min_pg;
    groups[group] = g;
  }
  block["groups"] = groups;
  if (total_count == 0) return;
  block["mean_pg"] = total / static_cast<double>(total_count);
  block["min_pg_plus_3se"] = min_bound;
  Json contrasts = Json::object();
  for (const auto& a : group_order) {
    for (const auto& b : group_order) {
      if (a == b || !stats.count(a) || !stats.count(b)) continue;
      const double diff = stats[a].first - stats[b].first;
      const double se = std::hypot(stats[a].second, stats[b].second);
      Json c;
      c["difference"] = diff;
      c["se"] = se;
      c["difference_minus_2se"] = diff - 2.0 * se;
      contrasts[a + "_minus_" + b] = c;
    }
  }
  block["contrasts"] = contrasts;
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentConfig& input,
                               const RunOptions& options) {
  if (options.jobs < 1) {
    throw Error(ErrorCode::kConfigError, "--jobs must be >= 1");
  }
  ExperimentConfig config = input;
  if (options.seed) config.seed = *options.seed;
  if (options.keep_workdirs) {
    for (auto& e : config.mechanisms) {
      if (auto* g = std::get_if<GeneratorSpec>(&e.mechanism)) g->keep_workdirs = true;
    }
  }
  const std::uint64_t seed = config.seed;
  const Populations pops = MaterialisePopulations(config);
  const Dataset& population = pops.population;
  const SchemaMetadata& schema = population.schema();

  std::vector<Target> targets;
  std::vector<std::string> group_order;
  for (const auto& [row, group] : ResolveTargets(
           config.targets, population, pops, DeriveSeed(seed, StableHash("targets")))) {
    targets.push_back({row, group});
    if (std::find(group_order.begin(), group_order.end(), group) == group_order.end()) {
      group_order.push_back(group);
    }
  }

  const std::size_t l = config.l == 0 ? population.size() : config.l;
  if (l > population.size()) {
    throw Error(ErrorCode::kConfigError, "/l: exceeds the population size");
  }
  Rng reference_rng(DeriveSeed(seed, StableHash("reference")));
  std::vector<std::size_t> reference_rows =
      SampleWithoutReplacement(population.size(), l, reference_rng);
  std::sort(reference_rows.begin(), reference_rows.end());
  const Dataset reference = population.Subset(reference_rows);

  CellAccumulator acc;
  acc.outcomes << "game,mechanism,qualifier,target,test,iteration,secret,"
                  "public_bit,guess,success,raw_success,correct,"
                  "unique_value_rows,degenerate\n";
  acc.linkability_plot << "mechanism,feature_set,target,group,privacy_gain,"
                          "privacy_gain_display,std_error,advantage\n";
  acc.attribute_plot << "mechanism,sensitive,target,group,privacy_gain,"
                        "privacy_gain_se,advantage_raw,advantage_published,"
                        "success_given_1,success_given_0\n";
  acc.utility_plot << "mechanism,predict,target,group,test,advantage,"
                      "std_error,accuracy_given_1,accuracy_given_0\n";
  acc.aggregate_plot << "mechanism,metric,attribute,value\n";

  auto run_cell = [&](const std::string& key, Json row, auto&& body) {
    Rng rng(DeriveSeed(seed, StableHash(key)));
    try {
      body(rng, row);
      row["status"] = "ok";
    } catch (const std::exception& e) {
      row["status"] = "failed";
      row["error"] = e.what();
      ++acc.failed;
    }
    acc.rows.push_back(row);
    return row["status"] == "ok";
  };

  for (std::size_t gi = 0; gi < config.games.size(); ++gi) {
    const GameEntry& game = config.games[gi];
    for (const auto& mech : config.mechanisms) {
      if (!Allowed(game.mechanisms, mech.name)) continue;
      ChallengerConfig challenger;
      challenger.population = population;
      challenger.n = config.n;
      challenger.m = config.m;
      challenger.mechanism = mech.mechanism;
      challenger.metadata = pops.metadata;
      challenger.jobs = options.jobs;
      const PublishedKind kind = PublishedKindOf(mech.mechanism);

      if (game.type == GameType::kLinkability) {
        std::vector<std::string> sets;
        if (kind == PublishedKind::kRaw) {
          sets.push_back("literal");
        } else {
          for (FeatureSet f : config.feature_sets) sets.emplace_back(FeatureSetName(f));
        }
        for (const auto& set_name : sets) {
          Json& block = acc.summary["linkability"][mech.name][set_name];
          block["targets"] = Json::object();
          for (const auto& t : targets) {
            if (!Allowed(game.groups, t.group)) continue;
            Json row;
            row["game"] = "linkability";
            row["mechanism"] = mech.name;
            row["feature_set"] = set_name;
            row["target"] = t.row;
            row["group"] = t.group;
            const std::string key = "linkability|" + std::to_string(gi) + "|" +
                                    mech.name + "|" + set_name + "|" +
                                    std::to_string(t.row);
            LinkabilityResult result;
            const bool ok = run_cell(key, row, [&](Rng& rng, Json& r) {
              const Record& target = population[t.row];
              MiaAttacker attacker = MiaAttacker::LiteralOnly(target);
              if (kind != PublishedKind::kRaw) {
                PriorKnowledge prior{reference, mech.mechanism, pops.metadata,
                                     config.n, config.m};
                ShadowConfig shadows;
                shadows.n_shadows = config.n_shadows;
                shadows.synth_per_shadow = config.synth_per_shadow;
                shadows.grow_with_target = config.grow_with_target;
                shadows.forest = config.attack_forest;
                shadows.jobs = options.jobs;
                attacker = TrainMia(target, prior, ParseFeatureSet(set_name),
                                    shadows, rng);
              }
              result = RunLinkability(target, challenger, attacker, config.iters,
                                      config.sampling, rng);
              r.update(EstimateToJson(result.advantage));
              r["privacy_gain"] = result.privacy_gain;
              r["privacy_gain_se"] = result.advantage.std_error;
              r["privacy_gain_display"] = Clip01(result.privacy_gain);
              const auto [u1, u0] = UniqueIterations(result.outcomes);
              r["unique_value_iterations_s1"] = u1;
              r["unique_value_iterations_s0"] = u0;
            });
            if (!ok) continue;
            const auto& last = acc.rows.back();
            Json t_json;
            t_json["group"] = t.group;
            t_json["pg"] = result.privacy_gain;
            t_json["se"] = result.advantage.std_error;
            t_json["advantage"] = result.advantage.advantage;
            t_json["pg_plus_3se"] =
                result.privacy_gain + 3.0 * result.advantage.std_error;
            t_json["unique_value_iterations_s1"] = last["unique_value_iterations_s1"];
            t_json["unique_value_iterations_s0"] = last["unique_value_iterations_s0"];
            block["targets"][std::to_string(t.row)] = t_json;
            AppendOutcomes(acc.outcomes, "linkability", mech.name, set_name, t.row,
                           "", result.outcomes);
            acc.linkability_plot
                << mech.name << ',' << set_name << ',' << t.row << ',' << t.group
                << ',' << FormatNumber(result.privacy_gain) << ','
                << FormatNumber(Clip01(result.privacy_gain)) << ','
                << FormatNumber(result.advantage.std_error) << ','
                << FormatNumber(result.advantage.advantage) << '\n';
          }
          SummariseGroups(block, targets, group_order);
        }
      } else if (game.type == GameType::kAttributeInference) {
        const std::size_t sensitive = schema.RequireIndex(game.sensitive);
        Json& block = acc.summary["attribute_inference"][mech.name][game.sensitive];
        block["targets"] = Json::object();
        for (const auto& t : targets) {
          if (!Allowed(game.groups, t.group)) continue;
          Json row;
          row["game"] = "attribute_inference";
          row["mechanism"] = mech.name;
          row["sensitive"] = game.sensitive;
          row["target"] = t.row;
          row["group"] = t.group;
          const std::string key = "attribute_inference|" + std::to_string(gi) +
                                  "|" + mech.name + "|" + game.sensitive + "|" +
                                  std::to_string(t.row);
          AttributeInferenceResult result;
          const bool ok = run_cell(key, row, [&](Rng& rng, Json& r) {
            result = RunAttributeInference(population[t.row], challenger, sensitive,
                                           config.iters, config.sampling, rng,
                                           game.assignment, config.attack_forest);
            r.update(EstimateToJson(result.published));
            r["advantage_raw"] = result.raw.advantage;
            r["advantage_raw_se"] = result.raw.std_error;
            r["privacy_gain"] = result.privacy_gain;
            r["privacy_gain_se"] = result.privacy_gain_se;
            r["privacy_gain_display"] = Clip01(result.privacy_gain);
            r["sensitive_value"] = result.sensitive_value;
          });
          if (!ok) continue;
          Json t_json;
          t_json["group"] = t.group;
          t_json["pg"] = result.privacy_gain;
          t_json["se"] = result.privacy_gain_se;
          t_json["advantage_raw"] = result.raw.advantage;
          t_json["advantage_published"] = result.published.advantage;
          block["targets"][std::to_string(t.row)] = t_json;
          AppendOutcomes(acc.outcomes, "attribute_inference", mech.name,
                         game.sensitive, t.row, "", result.outcomes);
          acc.attribute_plot
              << mech.name << ',' << game.sensitive << ',' << t.row << ','
              << t.group << ',' << FormatNumber(result.privacy_gain) << ','
              << FormatNumber(result.privacy_gain_se) << ','
              << FormatNumber(result.raw.advantage) << ','
              << FormatNumber(result.published.advantage) << ','
              << FormatNumber(result.published.rate_given_1) << ','
              << FormatNumber(result.published.rate_given_0) << '\n';
        }
        SummariseGroups(block, targets, group_order);
      } else if (game.type == GameType::kUtility) {
        const std::size_t predict = schema.RequireIndex(game.predict);
        const Dataset& test_pop = *pops.test;
        Populations test_layout;
        if (config.test_population && config.test_population->toy) {
          test_layout.planted_begin = config.test_population->size;
          test_layout.planted_count = config.test_population->toy->planted.size();
          test_layout.outliers_begin = test_layout.planted_begin + test_layout.planted_count;
          test_layout.outliers_count = config.test_population->toy->outliers.count;
        }
        const auto tests = ResolveTargets(game.tests, test_pop, test_layout,
                                          DeriveSeed(seed, StableHash("tests|" + std::to_string(gi))));
        Json& block = acc.summary["utility"][mech.name]["pairs"];
        block = Json::object();
        std::vector<std::pair<Target, std::size_t>> pairs;
        std::vector<Target> chosen;
        for (const auto& t : targets) {
          if (Allowed(game.groups, t.group)) chosen.push_back(t);
        }
        if (game.zip_pairs) {
          if (chosen.size() != tests.size()) {
            throw Error(ErrorCode::kConfigError,
                        "/games/" + std::to_string(gi) +
                            "/pairing: zip needs as many tests as targets");
          }
          for (std::size_t i = 0; i < chosen.size(); ++i) {
            pairs.emplace_back(chosen[i], tests[i].first);
          }
        } else {
          for (const auto& t : chosen) {
            for (const auto& test : tests) pairs.emplace_back(t, test.first);
          }
        }
        for (const auto& [t, test_row] : pairs) {
          {
            Json row;
            row["game"] = "utility";
            row["mechanism"] = mech.name;
            row["predict"] = game.predict;
            row["target"] = t.row;
            row["group"] = t.group;
            row["test"] = test_row;
            const std::string key = "utility|" + std::to_string(gi) + "|" +
                                    mech.name + "|" + std::to_string(t.row) +
                                    "|" + std::to_string(test_row);
            UtilityResult result;
            const bool ok = run_cell(key, row, [&](Rng& rng, Json& r) {
              result = RunUtilityGame(population[t.row], test_pop[test_row],
                                      challenger, predict, config.iters,
                                      config.sampling, rng, config.analyst_forest);
              r.update(EstimateToJson(result.advantage));
              r["degenerate_iterations"] = result.degenerate_iterations;
            });
            if (!ok) continue;
            Json p;
            p["advantage"] = result.advantage.advantage;
            p["abs_advantage"] = std::abs(result.advantage.advantage);
            p["se"] = result.advantage.std_error;
            block[std::to_string(t.row) + "_" + std::to_string(test_row)] = p;
            const std::string test_label = std::to_string(test_row);
            AppendOutcomes(acc.outcomes, "utility", mech.name, game.predict, t.row,
                           test_label, result.outcomes);
            acc.utility_plot << mech.name << ',' << game.predict << ',' << t.row
                             << ',' << t.group << ',' << test_row << ','
                             << FormatNumber(result.advantage.advantage) << ','
                             << FormatNumber(result.advantage.std_error) << ','
                             << FormatNumber(result.advantage.rate_given_1) << ','
                             << FormatNumber(result.advantage.rate_given_0) << '\n';
          }
        }
      } else {
        const std::size_t predict = schema.RequireIndex(game.predict);
        Json row;
        row["game"] = "aggregate_utility";
        row["mechanism"] = mech.name;
        row["predict"] = game.predict;
        const std::string key =
            "aggregate_utility|" + std::to_string(gi) + "|" + mech.name;
        AggregateUtility report;
        const bool ok = run_cell(key, row, [&](Rng& rng, Json& r) {
          const auto rows = SampleWithoutReplacement(population.size(), config.n, rng);
          const Dataset raw = population.Subset(rows);
          const Dataset published =
              Publish(mech.mechanism, raw, pops.metadata, config.m, rng);
          report = ComputeAggregateUtility(raw, published, *pops.test, predict, rng,
                                           config.analyst_forest);
          r["accuracy_raw"] = report.accuracy_raw;
          r["accuracy_published"] = report.accuracy_published;
        });
        if (!ok) continue;
        Json& block = acc.summary["aggregate_utility"][mech.name];
        block["accuracy_raw"] = report.accuracy_raw;
        block["accuracy_published"] = report.accuracy_published;
        block["accuracy_loss"] = report.accuracy_raw - report.accuracy_published;
        block["mean_discrepancy"] = report.mean_discrepancy;
        block["median_discrepancy"] = report.median_discrepancy;
        block["marginal_l1"] = report.marginal_l1;
        acc.aggregate_plot << mech.name << ",accuracy_raw,"
                           << game.predict << ','
                           << FormatNumber(report.accuracy_raw) << '\n';
        acc.aggregate_plot << mech.name << ",accuracy_published,"
                           << game.predict << ','
                           << FormatNumber(report.accuracy_published) << '\n';
        for (const auto& [name, v] : report.mean_discrepancy) {
          acc.aggregate_plot << mech.name << ",mean_discrepancy," << name << ','
                             << FormatNumber(v) << '\n';
        }
        for (const auto& [name, v] : report.median_discrepancy) {
          acc.aggregate_plot << mech.name << ",median_discrepancy," << name << ','
                             << FormatNumber(v) << '\n';
        }
        for (const auto& [name, v] : report.marginal_l1) {
          acc.aggregate_plot << mech.name << ",marginal_l1," << name << ','
                             << FormatNumber(v) << '\n';
        }
      }
    }
  }

  ExperimentResult result;
  result.failed_cells = acc.failed;
  Json targets_json = Json::array();
  for (const auto& t : targets) {
    Json tj;
    tj["row"] = t.row;
    tj["group"] = t.group;
    targets_json.push_back(tj);
  }
  result.report["tool"] = "synthpriv";
  result.report["version"] = kVersion;
  result.report["seed"] = seed;
  result.report["population_size"] = population.size();
  result.report["reference_size"] = l;
  result.report["targets"] = targets_json;
  result.report["rows"] = acc.rows;
  acc.summary["failed_cells"] = acc.failed;
  result.report["summary"] = acc.summary;

  Json& prov = result.provenance;
  prov["tool"] = "synthpriv";
  prov["version"] = kVersion;
  prov["master_seed"] = seed;
  prov["jobs"] = options.jobs;
  prov["config"] = ExperimentConfigToJson(config);
  Json& d = prov["defaults"];
  d["sampling"] = SamplingName(config.sampling) +
                  ": iteration pairs share the raw draw and mechanism seeds";
  d["linkability_advantage"] =
      "P(guess=1 | s_t=1) - P(guess=1 | s_t=0) on the published data; the raw "
      "advantage is taken as 1";
  d["std_error"] = "sqrt(var1/n1 + var0/n0), population variances";
  d["attribute_success_continuous"] =
      "posterior density at the truth divided by the density at the predicted "
      "value, clipped to [0, 1]";
  d["attribute_assignment_default"] = "lookup of the target's own value";
  d["shadow_raw_size"] = config.grow_with_target
                             ? "n drawn records versus n plus the target"
                             : "n records: n-1 drawn plus filler or target";
  d["privacy_budget_split"] =
      "structure_fraction of epsilon for structure learning (default 0.5), the "
      "rest for conditional tables";
  d["privbay_table_noise"] =
      "Laplace with scale 2k/epsilon_tables on every count cell, clipped at 0";
  d["mi_sensitivity"] =
      "(2/n)log((n+1)/2) + ((n-1)/n)log((n+1)/(n-1)) unless overridden";
  d["network_root"] = "first schema attribute";
  d["binning_rule"] =
      "equal-width bins over the metadata range; values at or beyond the ends "
      "go to the first or last bin";
  d["attack_forest"] = ForestParamsToJson(config.attack_forest);
  d["analyst_forest"] = ForestParamsToJson(config.analyst_forest);
  d["outlier_score"] =
      "count of categories below the 5th percentile of record frequencies plus "
      "continuous values above the 95% quantile (nearest rank)";
  d["random_targets"] = "drawn from rows not chosen earlier, excluding planted "
                        "and outlier rows of toy populations";
  d["reference"] = "l rows drawn without replacement from the population";
  d["metadata"] = config.population.toy ? "toy schema ranges"
                                        : "schema file ranges";

  result.outcomes_csv = acc.outcomes.str();
  result.plotdata["linkability_privacy_gain.csv"] = acc.linkability_plot.str();
  result.plotdata["attribute_inference_privacy_gain.csv"] = acc.attribute_plot.str();
  result.plotdata["utility_advantage.csv"] = acc.utility_plot.str();
  result.plotdata["aggregate_utility.csv"] = acc.aggregate_plot.str();
  return result;
}

void WriteExperimentOutputs(const ExperimentResult& result, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "plotdata", ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create '" + dir.string() + "': " + ec.message());
  }
  SaveJsonFile(dir / "report.json", result.report);
  SaveJsonFile(dir / "provenance.json", result.provenance);
  auto write = [](const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  };
  write(dir / "outcomes.csv", result.outcomes_csv);
  for (const auto& [name, content] : result.plotdata) {
    write(dir / "plotdata" / name, content);
  }
}

std::vector<ManifestCheck> CheckManifest(const Json& manifest, const Json& report) {
  if (!manifest.is_array()) {
    throw Error(ErrorCode::kConfigError, "manifest must be a JSON array");
  }
  auto lookup = [&](const std::string& pointer, double& out, std::string& why) {
    try {
      const Json& v = report.at(Json::json_pointer(pointer));
      if (!v.is_number()) {
        why = pointer + " is not a number";
        return false;
      }
      out = v.get<double>();
      return true;
    } catch (const std::exception&) {
      why = pointer + " not found in report";
      return false;
    }
  };
  std::vector<ManifestCheck> checks;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const std::string path = Child("", i);
    const Json& entry = manifest[i];
    CheckKeys(entry, path, {"metric_path", "comparator", "bound", "note"});
    ManifestCheck check;
    check.metric_path =
        AsString(Require(entry, "metric_path", path), Child(path, "metric_path"));
    check.comparator =
        AsString(Require(entry, "comparator", path), Child(path, "comparator"));
    const Json& bound = Require(entry, "bound", path);
    std::string why;
    bool ok = lookup(check.metric_path, check.value, why);
    if (ok) {
      if (bound.is_number()) {
        check.bound = bound.get<double>();
      } else if (bound.is_string()) {
        ok = lookup(bound.get<std::string>(), check.bound, why);
      } else {
        Fail(Child(path, "bound"), "expected a number or a JSON pointer");
      }
    }
    if (ok) {
      const std::string& c = check.comparator;
      if (c == "<") {
        check.passed = check.value < check.bound;
      } else if (c == "<=") {
        check.passed = check.value <= check.bound;
      } else if (c == ">") {
        check.passed = check.value > check.bound;
      } else if (c == ">=") {
        check.passed = check.value >= check.bound;
      } else if (c == "==") {
        check.passed = check.value == check.bound;
      } else {
        Fail(Child(path, "comparator"), "expected <, <=, >, >= or ==");
      }
      check.message = check.metric_path + " = " + FormatNumber(check.value) + " " +
                      c + " " + FormatNumber(check.bound);
    } else {
      check.message = why;
    }
    checks.push_back(check);
  }
  return checks;
}

}  // namespace synthpriv
