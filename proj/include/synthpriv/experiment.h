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


// End-to-end experiments: JSON configuration, validation, execution and
// report emission. The command-line tool is a thin shell over this API.

#ifndef SYNTHPRIV_EXPERIMENT_H_
#define SYNTHPRIV_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synthpriv/dataset.h"
#include "synthpriv/features.h"
#include "synthpriv/games.h"
#include "synthpriv/json_io.h"
#include "synthpriv/mechanism.h"
#include "synthpriv/random_forest.h"
#include "synthpriv/toy_population.h"

namespace synthpriv {

inline constexpr const char* kVersion = "1.0.0";

struct PopulationSource {
  std::optional<ToyPopulationConfig> toy;
  // Number of i.i.d. toy records before planted records and outliers.
  std::size_t size = 0;
  std::filesystem::path csv;
  std::filesystem::path schema;
};

// Selector grammar: "outlier:k", "random:k", "planted", "outliers" (toy
// outlier-plan rows) or an explicit list of row indices.
struct TargetSelector {
  std::string selector;
  std::vector<std::size_t> indices;
  std::string group;
};

struct MechanismEntry {
  std::string name;
  Mechanism mechanism;
};

enum class GameType { kLinkability, kAttributeInference, kUtility, kAggregate };

struct GameEntry {
  GameType type = GameType::kLinkability;
  // Restrictions; empty means all mechanisms / all target groups.
  std::vector<std::string> mechanisms;
  std::vector<std::string> groups;
  std::string sensitive;
  SensitiveAssignment assignment = SensitiveAssignment::kLookup;
  std::string predict;
  // Utility game test records, selected from the test population.
  std::vector<TargetSelector> tests;
  // Utility game: pair the i-th target with the i-th test record instead of
  // running every combination.
  bool zip_pairs = false;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  PopulationSource population;
  std::optional<PopulationSource> test_population;
  std::vector<TargetSelector> targets;
  std::size_t n = 1000;
  std::size_t m = 1000;
  // Adversary reference size; 0 means the whole population.
  std::size_t l = 0;
  std::size_t n_shadows = 10;
  std::size_t synth_per_shadow = 5;
  std::size_t iters = 400;
  Sampling sampling = Sampling::kStratified;
  bool grow_with_target = false;
  ForestParams attack_forest;
  ForestParams analyst_forest;
  std::vector<MechanismEntry> mechanisms;
  std::vector<FeatureSet> feature_sets = {FeatureSet::kNaive};
  std::vector<GameEntry> games;
  std::filesystem::path output_dir = "out";
  // Directory that relative input paths resolve against.
  std::filesystem::path base_dir;
  // The JSON the config was parsed from.
  Json source;
};

// Throws kConfigError naming the offending field.
ExperimentConfig ParseExperimentConfig(const Json& j,
                                       const std::filesystem::path& base_dir);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);

// Canonical JSON form of a parsed config (used in provenance).
Json ExperimentConfigToJson(const ExperimentConfig& config);

enum class Severity { kError, kWarning };

struct Diagnostic {
  Severity severity = Severity::kError;
  std::string path;
  std::string message;
};

// Static validation without running anything.
std::vector<Diagnostic> ValidateExperimentConfig(const Json& j,
                                                 const std::filesystem::path& base_dir);
std::vector<Diagnostic> ValidateExperimentFile(const std::filesystem::path& path);

struct Populations {
  Dataset population;
  std::optional<Dataset> test;
  SchemaMetadata metadata;
  std::size_t planted_begin = 0;
  std::size_t planted_count = 0;
  std::size_t outliers_begin = 0;
  std::size_t outliers_count = 0;
};

Populations MaterialisePopulations(const ExperimentConfig& config);

// Resolves selectors to (row, group) pairs in selector order; duplicates
// keep their first group.
std::vector<std::pair<std::size_t, std::string>> ResolveTargets(
    const std::vector<TargetSelector>& selectors, const Dataset& population,
    const Populations& layout, std::uint64_t seed);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool keep_workdirs = false;
};

struct ExperimentResult {
  Json report;
  Json provenance;
  std::string outcomes_csv;
  // File name -> CSV content.
  std::map<std::string, std::string> plotdata;
  std::size_t failed_cells = 0;
};

ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const RunOptions& options);

void WriteExperimentOutputs(const ExperimentResult& result,
                            const std::filesystem::path& dir);

struct ManifestCheck {
  std::string metric_path;
  std::string comparator;
  double value = 0.0;
  double bound = 0.0;
  bool passed = false;
  std::string message;
};

// Manifest: JSON list of {metric_path, comparator, bound}; `bound` is a
// number or a JSON pointer into the same report.
std::vector<ManifestCheck> CheckManifest(const Json& manifest,
                                         const Json& report);

}  // namespace synthpriv

#endif  // SYNTHPRIV_EXPERIMENT_H_
