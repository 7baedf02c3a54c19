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


#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "synthpriv/error.h"
#include "synthpriv/experiment.h"
#include "synthpriv/json_io.h"

namespace synthpriv {
namespace {

namespace fs = std::filesystem;

Json SmokeConfig() {
  return Json::parse(R"({
    "seed": 11,
    "population": {
      "size": 300,
      "toy": {
        "attributes": [
          {"name": "c", "kind": "categorical", "categories": ["A", "B"]},
          {"name": "x", "kind": "continuous", "min": 0, "max": 100,
           "mixture": [{"mean": 40, "sd": 10}]},
          {"name": "y", "kind": "continuous", "min": 0, "max": 100,
           "mixture": [{"mean": 60, "sd": 5}]}
        ]
      }
    },
    "targets": [{"select": [3, 8], "group": "picked"}],
    "n": 60,
    "m": 60,
    "iters": 40,
    "n_shadows": 3,
    "synth_per_shadow": 2,
    "attack_forest": {"n_trees": 10},
    "mechanisms": [{"name": "IndHist", "generator": {"kind": "indhist"}}],
    "games": [{"type": "linkability"}]
  })");
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("synthpriv_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

int RunCli(const std::string& args) {
  const std::string command =
      std::string(SYNTHPRIV_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(RunExperimentTest, SmokeRun) {
  const ExperimentConfig config = ParseExperimentConfig(SmokeConfig(), ".");
  const ExperimentResult result = RunExperiment(config, RunOptions{});
  EXPECT_EQ(result.failed_cells, 0u);
  const Json& rows = result.report.at("rows");
  ASSERT_EQ(rows.size(), 2u);
  for (const Json& row : rows) {
    EXPECT_EQ(row.at("status"), "ok");
    EXPECT_TRUE(row.contains("privacy_gain"));
  }
  EXPECT_TRUE(result.report.at("summary").at("linkability").at("IndHist").at(
      "naive").at("targets").contains("3"));
  EXPECT_EQ(result.report.at("seed"), 11);
}

TEST(RunExperimentTest, SameSeedByteIdenticalReport) {
  const ExperimentConfig config = ParseExperimentConfig(SmokeConfig(), ".");
  RunOptions one, three;
  three.jobs = 3;
  const fs::path a = TempDir("det_a"), b = TempDir("det_b");
  WriteExperimentOutputs(RunExperiment(config, one), a);
  WriteExperimentOutputs(RunExperiment(config, three), b);
  EXPECT_EQ(ReadText(a / "report.json"), ReadText(b / "report.json"));
  EXPECT_FALSE(ReadText(a / "report.json").empty());
  EXPECT_TRUE(fs::exists(a / "provenance.json"));
  EXPECT_TRUE(fs::exists(a / "outcomes.csv"));
  EXPECT_TRUE(fs::exists(a / "plotdata" / "linkability_privacy_gain.csv"));
}

TEST(RunExperimentTest, SeedOverrideChangesReport) {
  const ExperimentConfig config = ParseExperimentConfig(SmokeConfig(), ".");
  RunOptions other;
  other.seed = 12;
  EXPECT_NE(RunExperiment(config, RunOptions{}).report.dump(),
            RunExperiment(config, other).report.dump());
}

TEST(ParseExperimentConfigTest, MissingSchemaFile) {
  const fs::path dir = TempDir("missing_schema");
  std::ofstream(dir / "data.csv") << "c\nA\n";
  Json j = SmokeConfig();
  j["population"] = Json::parse(R"({"csv": "data.csv", "schema": "nope.json"})");
  try {
    ParseExperimentConfig(j, dir);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
  }
  SaveJsonFile(dir / "config.json", j);
  EXPECT_NE(RunCli("run --config " + (dir / "config.json").string()), 0);
}

TEST(ParseExperimentConfigTest, RejectsBadFields) {
  for (const char* patch :
       {R"({"iters": 10})", R"({"n": 5000})", R"({"unknown": 1})",
        R"({"mechanisms": [{"name": "S", "sanitiser": {"k": 0}}]})"}) {
    Json j = SmokeConfig();
    j.merge_patch(Json::parse(patch));
    EXPECT_THROW(ParseExperimentConfig(j, "."), Error) << patch;
  }
  Json j = SmokeConfig();
  j.erase("seed");
  EXPECT_THROW(ParseExperimentConfig(j, "."), Error);
}

TEST(ParseExperimentConfigTest, CanonicalFormRoundTrips) {
  const ExperimentConfig config = ParseExperimentConfig(SmokeConfig(), ".");
  const Json canonical = ExperimentConfigToJson(config);
  EXPECT_EQ(ExperimentConfigToJson(ParseExperimentConfig(canonical, ".")),
            canonical);
}

TEST(ValidateTest, Diagnostics) {
  EXPECT_TRUE(ValidateExperimentConfig(SmokeConfig(), ".").empty());

  Json leaky = SmokeConfig();
  leaky["mechanisms"] = Json::parse(R"([{"name": "P", "generator":
      {"kind": "privbay", "epsilon": 0.1, "metadata": "learned"}}])");
  const auto warnings = ValidateExperimentConfig(leaky, ".");
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_EQ(warnings[0].severity, Severity::kWarning);
  EXPECT_EQ(warnings[0].message,
            "metadata learned from training data violates DP assumptions");

  Json k0 = SmokeConfig();
  k0["mechanisms"] = Json::parse(R"([{"name": "S", "sanitiser": {"k": 0}}])");
  const auto errors = ValidateExperimentConfig(k0, ".");
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].severity, Severity::kError);
}

TEST(CliTest, ValidateExitCodes) {
  const fs::path dir = TempDir("cli_validate");
  SaveJsonFile(dir / "good.json", SmokeConfig());
  Json bad = SmokeConfig();
  bad.erase("seed");
  SaveJsonFile(dir / "bad.json", bad);
  EXPECT_EQ(RunCli("validate --config " + (dir / "good.json").string()), 0);
  EXPECT_EQ(RunCli("validate --config " + (dir / "bad.json").string()), 1);
}

TEST(CliTest, RunWritesReport) {
  const fs::path dir = TempDir("cli_run");
  SaveJsonFile(dir / "config.json", SmokeConfig());
  EXPECT_EQ(RunCli("run --config " + (dir / "config.json").string() +
                   " --output " + (dir / "out").string() + " --jobs 2"),
            0);
  const Json report = LoadJsonFile(dir / "out" / "report.json");
  EXPECT_EQ(report.at("rows").size(), 2u);
}

TEST(CheckManifestTest, NumbersAndPointers) {
  const Json report = Json::parse(R"({"a": {"x": 0.5, "y": 0.7}})");
  const Json manifest = Json::parse(R"([
    {"metric_path": "/a/x", "comparator": "<", "bound": "/a/y"},
    {"metric_path": "/a/x", "comparator": ">=", "bound": 0.5},
    {"metric_path": "/a/y", "comparator": "<=", "bound": 0.6},
    {"metric_path": "/a/z", "comparator": "==", "bound": 0}
  ])");
  const auto checks = CheckManifest(manifest, report);
  ASSERT_EQ(checks.size(), 4u);
  EXPECT_TRUE(checks[0].passed);
  EXPECT_TRUE(checks[1].passed);
  EXPECT_FALSE(checks[2].passed);
  EXPECT_FALSE(checks[3].passed);
}

TEST(ReproConfigsTest, AllValidate) {
  for (const auto& entry : fs::directory_iterator(SYNTHPRIV_REPRO_DIR)) {
    const std::string name = entry.path().filename().string();
    if (entry.path().extension() != ".json" ||
        name.find(".manifest.") != std::string::npos) {
      continue;
    }
    for (const Diagnostic& d : ValidateExperimentFile(entry.path())) {
      EXPECT_EQ(d.severity, Severity::kWarning) << name << ": " << d.message;
    }
  }
}

TEST(ReproConfigsTest, CsvPopulation) {
  const ExperimentConfig config =
      LoadExperimentConfig(fs::path(SYNTHPRIV_REPRO_DIR) / "csv_example.json");
  const Populations pops = MaterialisePopulations(config);
  EXPECT_EQ(pops.population.size(), 400u);
  EXPECT_EQ(pops.population.schema().size(), 4u);
}

}  // namespace
}  // namespace synthpriv
