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

// Command-line front end: run, validate, select-targets, sanitise and
// synthesize.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "synthpriv/dataset.h"
#include "synthpriv/error.h"
#include "synthpriv/experiment.h"
#include "synthpriv/games.h"
#include "synthpriv/generator.h"
#include "synthpriv/json_io.h"
#include "synthpriv/sanitiser.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

namespace fs = std::filesystem;
using synthpriv::Error;
using synthpriv::ErrorCode;

int Run(const fs::path& config_path, std::optional<std::uint64_t> seed,
        int jobs, bool keep_workdirs, const std::string& output) {
  synthpriv::ExperimentConfig config =
      synthpriv::LoadExperimentConfig(config_path);
  synthpriv::RunOptions options;
  options.seed = seed;
  options.jobs = jobs;
  options.keep_workdirs = keep_workdirs;
  const synthpriv::ExperimentResult result =
      synthpriv::RunExperiment(config, options);
  const fs::path dir = output.empty() ? config.output_dir : fs::path(output);
  synthpriv::WriteExperimentOutputs(result, dir);
  std::cout << "wrote " << (dir / "report.json").string() << '\n';
  if (result.failed_cells > 0) {
    std::cerr << result.failed_cells << " cell(s) failed; see report.json\n";
    return kExitPartial;
  }
  return kExitOk;
}

int Validate(const fs::path& config_path) {
  const auto diagnostics = synthpriv::ValidateExperimentFile(config_path);
  bool errors = false;
  for (const auto& d : diagnostics) {
    const bool error = d.severity == synthpriv::Severity::kError;
    errors |= error;
    std::cout << (error ? "error" : "warning") << ' '
              << (d.path.empty() ? "/" : d.path) << ": " << d.message << '\n';
  }
  if (diagnostics.empty()) std::cout << "ok\n";
  return errors ? kExitConfig : kExitOk;
}

synthpriv::Dataset LoadData(const std::string& data, const std::string& schema) {
  return synthpriv::LoadCsv(data, synthpriv::LoadSchemaFile(schema));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy gain and utility evaluation for synthetic data"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool keep_workdirs = false;
  std::string output;

  auto* run = app.add_subcommand("run", "Run an experiment");
  run->add_option("--config", config_path, "Experiment config (JSON)")
      ->required();
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--keep-workdirs", keep_workdirs,
                "Keep external generator work directories");
  run->add_option("--output", output, "Override output_dir");

  auto* validate = app.add_subcommand("validate", "Check a config statically");
  validate->add_option("--config", config_path, "Experiment config (JSON)")
      ->required();

  std::string data_path;
  std::string schema_path;
  std::size_t count = 5;
  auto* select = app.add_subcommand(
      "select-targets", "Print the highest outlier-score rows");
  select->add_option("--data", data_path, "Population CSV")->required();
  select->add_option("--schema", schema_path, "Schema JSON")->required();
  select->add_option("--count", count, "Number of targets");

  std::string mechanism_path;
  std::string out_path;
  auto* sanitise = app.add_subcommand("sanitise", "Apply row-level sanitisation");
  sanitise->add_option("--data", data_path, "Input CSV")->required();
  sanitise->add_option("--schema", schema_path, "Schema JSON")->required();
  sanitise->add_option("--config", mechanism_path, "Sanitiser config (JSON)")
      ->required();
  sanitise->add_option("--out", out_path, "Output CSV")->required();

  std::size_t m = 0;
  std::uint64_t synth_seed = 0;
  auto* synthesize =
      app.add_subcommand("synthesize", "Fit a generator and sample records");
  synthesize->add_option("--data", data_path, "Training CSV")->required();
  synthesize->add_option("--schema", schema_path, "Schema JSON")->required();
  synthesize->add_option("--config", mechanism_path, "Generator spec (JSON)")
      ->required();
  synthesize->add_option("--m", m, "Records to sample")->required();
  synthesize->add_option("--seed", synth_seed, "Seed")->required();
  synthesize->add_option("--out", out_path, "Output CSV")->required();
  synthesize->add_flag("--keep-workdirs", keep_workdirs,
                       "Keep external generator work directories");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return Run(config_path, seed, jobs, keep_workdirs, output);
    if (*validate) return Validate(config_path);
    if (*select) {
      const synthpriv::Dataset data = LoadData(data_path, schema_path);
      const auto scores = synthpriv::OutlierScores(data);
      for (std::size_t row : synthpriv::SelectOutlierTargets(data, count)) {
        std::cout << row << ' ' << scores[row] << '\n';
      }
      return kExitOk;
    }
    if (*sanitise) {
      const synthpriv::Dataset data = LoadData(data_path, schema_path);
      const auto config = synthpriv::SanitiserConfigFromJson(
          synthpriv::LoadJsonFile(mechanism_path), "");
      synthpriv::SaveCsv(out_path, synthpriv::Sanitise(data, config));
      return kExitOk;
    }
    if (*synthesize) {
      const synthpriv::Dataset data = LoadData(data_path, schema_path);
      auto spec = synthpriv::GeneratorSpecFromJson(
          synthpriv::LoadJsonFile(mechanism_path), "");
      spec.keep_workdirs = spec.keep_workdirs || keep_workdirs;
      synthpriv::Rng rng(synth_seed);
      synthpriv::SaveCsv(out_path, synthpriv::FitAndSample(
                                       spec, data, data.schema(), m, rng));
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::kConfigError:
      case ErrorCode::kParseError:
      case ErrorCode::kIoError:
      case ErrorCode::kInvalidSchema:
        return kExitConfig;
      default:
        return kExitPartial;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitPartial;
  }
  return kExitOk;
}
