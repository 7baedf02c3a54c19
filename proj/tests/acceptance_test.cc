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


// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. With `--manifest NAME` it instead runs
// repro/NAME.json and checks repro/NAME.manifest.json.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "synthpriv/dataset.h"
#include "synthpriv/dp.h"
#include "synthpriv/error.h"
#include "synthpriv/experiment.h"
#include "synthpriv/generator.h"
#include "synthpriv/json_io.h"
#include "synthpriv/linear_model.h"
#include "synthpriv/random.h"
#include "synthpriv/sanitiser.h"
#include "synthpriv/toy_population.h"

namespace synthpriv {
namespace {

namespace fs = std::filesystem;

struct Verdict {
  bool passed = true;
  std::string detail;

  void Require(bool condition, const std::string& what) {
    if (!condition) {
      passed = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string Format(double value) {
  std::ostringstream out;
  out.precision(4);
  out << value;
  return out.str();
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

fs::path ReproPath(const std::string& file) {
  return fs::path(SYNTHPRIV_REPRO_DIR) / file;
}

struct ReproRun {
  ExperimentResult result;
  double seconds = 0.0;
};

ReproRun RunRepro(const std::string& name, int jobs = 1) {
  const ExperimentConfig config = LoadExperimentConfig(ReproPath(name + ".json"));
  RunOptions options;
  options.jobs = jobs;
  const auto start = std::chrono::steady_clock::now();
  ReproRun run{RunExperiment(config, options), 0.0};
  run.seconds = Seconds(start);
  return run;
}

void CheckManifestFile(const std::string& name, const Json& report,
                       Verdict& verdict) {
  const Json manifest = LoadJsonFile(ReproPath(name + ".manifest.json"));
  for (const ManifestCheck& check : CheckManifest(manifest, report)) {
    verdict.Require(check.passed, check.metric_path + " " + check.comparator +
                                      " " + Format(check.bound) + " (got " +
                                      Format(check.value) + ")");
  }
}

Verdict RawBaseline() {
  Verdict v;
  const ReproRun run = RunRepro("raw_baseline");
  std::size_t rows = 0;
  for (const Json& row : run.result.report.at("rows")) {
    if (row.at("game") != "linkability") continue;
    ++rows;
    v.Require(row.at("status") == "ok", "cell failed");
    if (row.at("status") != "ok") continue;
    v.Require(row.at("advantage").get<double>() == 1.0,
              "target " + std::to_string(row.at("target").get<int>()) +
                  " advantage != 1");
    v.Require(row.at("privacy_gain").get<double>() == 0.0,
              "target " + std::to_string(row.at("target").get<int>()) +
                  " PG != 0");
  }
  v.Require(rows > 0, "no linkability rows");
  v.Require(run.seconds < 1.0, "runtime " + Format(run.seconds) + " s");
  CheckManifestFile("raw_baseline", run.result.report, v);
  v.detail += (v.detail.empty() ? "" : "; ") + std::to_string(rows) +
              " targets, Adv = 1 and PG = 0, " + Format(run.seconds) + " s";
  return v;
}

Verdict DpBound() {
  Verdict v;
  const ReproRun run = RunRepro("dp_bound");
  const ExperimentConfig config = LoadExperimentConfig(ReproPath("dp_bound.json"));
  v.Require(config.iters / 2 >= 200, "fewer than 200 iterations per arm");
  double worst = 1e9;
  for (const Json& row : run.result.report.at("rows")) {
    if (row.at("status") != "ok") {
      v.Require(false, "cell failed");
      continue;
    }
    const double bound = row.at("privacy_gain").get<double>() +
                         3 * row.at("privacy_gain_se").get<double>();
    worst = std::min(worst, bound);
    v.Require(bound >= 0.89, "target " + std::to_string(row.at("target").get<int>()) +
                                 " PG + 3SE = " + Format(bound));
  }
  CheckManifestFile("dp_bound", run.result.report, v);
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("min PG + 3SE = ") +
              Format(worst) + ", " + Format(run.seconds) + " s";
  return v;
}

Verdict LeakyMetadata(Json* report_out) {
  Verdict v;
  const ReproRun run = RunRepro("leaky_metadata");
  CheckManifestFile("leaky_metadata", run.result.report, v);
  const Json& target = run.result.report.at(
      Json::json_pointer("/summary/linkability/PrivBay-e0.1-learned/naive/targets/2000"));
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("planted PG = ") +
              Format(target.at("pg").get<double>()) + ", unique-category iterations s=1: " +
              std::to_string(target.at("unique_value_iterations_s1").get<int>()) +
              ", s=0: " +
              std::to_string(target.at("unique_value_iterations_s0").get<int>());
  *report_out = run.result.report;
  return v;
}

Verdict DisparateGain() {
  Verdict v;
  const ReproRun run = RunRepro("disparate_gain");
  CheckManifestFile("disparate_gain", run.result.report, v);
  for (const char* mech : {"IndHist", "BayNet"}) {
    const std::string base = std::string("/summary/linkability/") + mech +
                             "/naive/contrasts/random_minus_outlier";
    const Json& c = run.result.report.at(Json::json_pointer(base));
    v.detail += (v.detail.empty() ? "" : "; ") + std::string(mech) +
                " diff = " + Format(c.at("difference").get<double>()) +
                " (2SE = " + Format(2 * c.at("se").get<double>()) + ")";
  }
  return v;
}

Dataset ChainPopulation(std::size_t n, std::uint64_t seed) {
  ToyPopulationConfig toy;
  toy.attributes.push_back(
      {AttributeSpec::Categorical("x1", {"a", "b", "c"}), {0.5, 0.3, 0.2}, {}});
  toy.attributes.push_back(
      {AttributeSpec::Categorical("x2", {"a", "b", "c"}), {1, 1, 1}, {}});
  toy.attributes.push_back(
      {AttributeSpec::Categorical("x3", {"u", "v"}), {1, 1}, {}});
  toy.attributes.push_back(
      {AttributeSpec::Continuous("x4", 0, 10, 5), {}, {{1, 5, 2}}});
  toy.couplings.push_back(
      {"x1", "x2", {{0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.2, 0.2, 0.6}}, {}, 0});
  toy.couplings.push_back(
      {"x2", "x3", {{0.9, 0.1}, {0.3, 0.7}, {0.5, 0.5}}, {}, 0});
  Rng rng(seed);
  return SampleToyPopulation(toy, n, rng);
}

GeneratorSpec Spec(GeneratorKind kind, double epsilon = 1.0) {
  GeneratorSpec spec;
  spec.kind = kind;
  spec.degree = 1;
  if (kind == GeneratorKind::kPrivBay) spec.budget = PrivacyBudget{epsilon, 0.5};
  return spec;
}

Verdict EpsilonConvergence() {
  Verdict v;
  double worst = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Dataset data = ChainPopulation(1000, seed);
    Rng a(100 + seed), b(100 + seed);
    const TrainedGenerator baynet = Fit(Spec(GeneratorKind::kBayNet), data,
                                        data.schema(), a);
    const TrainedGenerator privbay = Fit(Spec(GeneratorKind::kPrivBay, 1e9),
                                         data, data.schema(), b);
    worst = std::max(worst, ConditionalTableDistance(privbay, baynet, data));
  }
  v.Require(worst <= 1e-3, "TV " + Format(worst));
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("max TV = ") + Format(worst);
  return v;
}

double ChiSquaredPValue(const std::vector<double>& observed,
                        const std::vector<double>& probabilities) {
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  double stat = 0.0;
  std::size_t cells = 0;
  for (std::size_t c = 0; c < observed.size(); ++c) {
    if (probabilities[c] == 0.0) continue;
    const double e = probabilities[c] * total;
    stat += (observed[c] - e) * (observed[c] - e) / e;
    ++cells;
  }
  boost::math::chi_squared dist(static_cast<double>(cells - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

Verdict OracleEquivalence() {
  Verdict v;
  // IndHist marginals against the training histograms
  const Dataset train = ChainPopulation(3000, 11);
  Rng rng(12);
  const TrainedGenerator indhist =
      Fit(Spec(GeneratorKind::kIndHist), train, train.schema(), rng);
  const Dataset sample = indhist.Sample(100000, rng);
  double min_p = 1.0;
  for (std::size_t j = 0; j < train.schema().size(); ++j) {
    const AttributeSpec& spec = train.schema().attribute(j);
    const std::size_t k = spec.is_categorical() ? spec.category_count()
                                                : static_cast<std::size_t>(spec.bins);
    std::vector<double> expected(k, 0.0), observed(k, 0.0);
    auto cell = [&](const Record& r) {
      return spec.is_categorical() ? r.category(j)
                                   : static_cast<std::size_t>(BinIndex(r[j], spec));
    };
    for (const Record& r : train.records()) expected[cell(r)] += 1.0 / train.size();
    for (const Record& r : sample.records()) observed[cell(r)] += 1.0;
    min_p = std::min(min_p, ChiSquaredPValue(observed, expected));
  }
  v.Require(min_p > 0.001, "IndHist chi-squared p = " + Format(min_p));

  // BayNet chain recovery and conditionals
  const Dataset chain = ChainPopulation(20000, 13);
  const TrainedGenerator baynet =
      Fit(Spec(GeneratorKind::kBayNet), chain, chain.schema(), rng);
  v.Require(baynet.tables()[1].parents == std::vector<std::size_t>{0} &&
                baynet.tables()[2].parents == std::vector<std::size_t>{1},
            "chain structure not recovered");
  const Dataset chain_sample = baynet.Sample(100000, rng);
  const std::vector<std::vector<double>> truth12 = {
      {0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.2, 0.2, 0.6}};
  const std::vector<std::vector<double>> truth23 = {{0.9, 0.1}, {0.3, 0.7}, {0.5, 0.5}};
  double worst_tv = 0.0;
  auto conditional_tv = [&](std::size_t parent, std::size_t child,
                            const std::vector<std::vector<double>>& truth) {
    for (std::size_t pv = 0; pv < truth.size(); ++pv) {
      std::vector<double> counts(truth[pv].size(), 0.0);
      double total = 0.0;
      for (const Record& r : chain_sample.records()) {
        if (r.category(parent) != pv) continue;
        counts[r.category(child)] += 1.0;
        total += 1.0;
      }
      double tv = 0.0;
      for (std::size_t c = 0; c < counts.size(); ++c) {
        tv += std::abs(counts[c] / total - truth[pv][c]);
      }
      worst_tv = std::max(worst_tv, 0.5 * tv);
    }
  };
  conditional_tv(0, 1, truth12);
  conditional_tv(1, 2, truth23);
  v.Require(worst_tv <= 0.02, "BayNet conditional TV " + Format(worst_tv));

  // exponential mechanism against brute-force softmax
  const std::vector<double> scores = {0.3, 1.1, 2.0, -0.5, 1.1};
  const double delta = 1.5, epsilon = 2.0;
  std::vector<double> softmax;
  for (double s : scores) softmax.push_back(std::exp(epsilon * s / (2 * delta)));
  const double z = std::accumulate(softmax.begin(), softmax.end(), 0.0);
  std::vector<double> counts(scores.size(), 0.0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    counts[ExponentialMechanism(scores, delta, epsilon, rng)] += 1.0;
  }
  double worst_z = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double p = softmax[i] / z;
    const double sigma = std::sqrt(p * (1 - p) / draws);
    worst_z = std::max(worst_z, std::abs(counts[i] / draws - p) / sigma);
  }
  v.Require(worst_z <= 3.0, "exponential mechanism off by " + Format(worst_z) + " sigma");
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("chi2 min p = ") +
              Format(min_p) + ", chain TV = " + Format(worst_tv) +
              ", softmax max |z| = " + Format(worst_z);
  return v;
}

Verdict PosteriorChecks() {
  Verdict v;
  Rng rng(21);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = 60, known = 4;
  FeatureMatrix x;
  std::vector<double> y;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row;
    for (std::size_t c = 0; c < known; ++c) row.push_back(normal(rng) * (c + 1));
    y.push_back(2 * row[0] - row[2] + 0.3 * row[3] + 5 + normal(rng));
    x.push_back(row);
  }
  // independent evaluation: centred normal equations by Gauss-Jordan
  std::vector<double> mean(known, 0.0);
  double mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < known; ++c) mean[c] += x[i][c] / n;
    mean_y += y[i] / n;
  }
  std::vector<std::vector<double>> a(known, std::vector<double>(known + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < known; ++r) {
      for (std::size_t c = 0; c < known; ++c) {
        a[r][c] += (x[i][r] - mean[r]) * (x[i][c] - mean[c]);
      }
      a[r][known] += (x[i][r] - mean[r]) * (y[i] - mean_y);
    }
  }
  for (std::size_t c = 0; c < known; ++c) {
    for (std::size_t r = 0; r < known; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= known; ++k) a[r][k] -= f * a[c][k];
    }
  }
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double fitted = 0.0;
    for (std::size_t c = 0; c < known; ++c) {
      fitted += (x[i][c] - mean[c]) * a[c][known] / a[c][c];
    }
    rss += (y[i] - mean_y - fitted) * (y[i] - mean_y - fitted);
  }
  const double oracle = rss / static_cast<double>(n - known);
  const LinearAttackModel model = FitLinear(x, y);
  const double rel = std::abs(model.sigma_hat_sq / oracle - 1.0);
  v.Require(rel <= 1e-9, "sigma^2 relative error " + Format(rel));

  const std::vector<double> probe = {0.5, -1.0, 2.0, 0.1};
  const double mode = model.Predict(probe);
  const double sigma = std::sqrt(model.sigma_hat_sq);
  const int steps = 20000;
  const double lo = mode - 8 * sigma, h = 16 * sigma / steps;
  double sum = PosteriorDensity(model, probe, lo) +
               PosteriorDensity(model, probe, lo + steps * h);
  for (int i = 1; i < steps; ++i) {
    sum += (i % 2 ? 4 : 2) * PosteriorDensity(model, probe, lo + i * h);
  }
  const double integral = sum * h / 3;
  v.Require(std::abs(integral - 1.0) <= 1e-4, "integral " + Format(integral));
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("sigma^2 rel err = ") +
              Format(rel) + ", integral = " + Format(integral);
  return v;
}

Verdict SanitiserChecks() {
  Verdict v;
  ToyPopulationConfig toy;
  toy.attributes.push_back({AttributeSpec::Categorical("sex", {"F", "M"}),
                            {0.5, 0.5}, {}});
  toy.attributes.push_back(
      {AttributeSpec::Continuous("age", 0, 100, 10), {}, {{1, 45, 15}}});
  toy.attributes.push_back({AttributeSpec::Categorical("region", {"N", "S", "E", "W"}),
                            {0.4, 0.3, 0.2, 0.1}, {}});
  toy.attributes.push_back(
      {AttributeSpec::Continuous("income", 0, 200, 20), {}, {{1, 60, 25}}});
  toy.quasi_identifiers = {"sex", "age", "region"};
  Rng rng(31);
  const Dataset data = SampleToyPopulation(toy, 2000, rng);
  const SchemaMetadata& schema = data.schema();

  std::size_t smallest_class = data.size();
  for (std::size_t k : {2u, 5u, 10u}) {
    SanitiserConfig config;
    config.k = k;
    const Dataset out = Sanitise(data, config);
    std::vector<std::vector<double>> keys;
    for (const Record& r : out.records()) {
      std::vector<double> key;
      for (const std::string& name : schema.quasi_identifiers()) {
        const std::size_t j = schema.RequireIndex(name);
        const AttributeSpec& spec = schema.attribute(j);
        key.push_back(spec.is_categorical() ? r[j] : BinIndex(r[j], spec));
      }
      keys.push_back(std::move(key));
    }
    for (const auto& key : keys) {
      const auto same = static_cast<std::size_t>(std::count(keys.begin(), keys.end(), key));
      smallest_class = std::min(smallest_class, same);
      v.Require(same >= k, "class of size " + std::to_string(same) + " at k=" +
                               std::to_string(k));
    }
  }

  SanitiserConfig cap_only;
  cap_only.quantile_cap = 0.95;
  const Dataset capped = Sanitise(data, cap_only);
  v.Require(capped.size() == data.size(), "capping dropped rows");
  for (std::size_t j : {1u, 3u}) {
    std::vector<double> sorted = data.Column(j);
    std::sort(sorted.begin(), sorted.end());
    const double cap =
        sorted[static_cast<std::size_t>(std::ceil(0.95 * sorted.size())) - 1];
    double max = -1e300;
    for (std::size_t i = 0; i < data.size(); ++i) {
      v.Require(capped[i][j] == std::min(data[i][j], cap), "cap mismatch");
      max = std::max(max, capped[i][j]);
    }
    v.Require(max == cap, "capped maximum differs from quantile");
  }

  SanitiserConfig full;
  full.k = 10;
  full.rare_category_threshold = 5;
  std::ostringstream first, second;
  WriteCsv(first, Sanitise(data, full));
  WriteCsv(second, Sanitise(data, full));
  v.Require(first.str() == second.str(), "sanitise not deterministic");
  v.detail += (v.detail.empty() ? "" : "; ") +
              std::string("smallest class over k in {2,5,10} = ") +
              std::to_string(smallest_class);
  return v;
}

Verdict UtilityTradeoff() {
  Verdict v;
  const ReproRun run = RunRepro("utility_tradeoff");
  CheckManifestFile("utility_tradeoff", run.result.report, v);
  const Json& utility = run.result.report.at("summary").at("utility");
  for (const char* pair : {"1500_200", "1501_201"}) {
    std::string line = std::string(pair) + ":";
    for (const char* mech : {"Raw", "San", "PrivBay-e1"}) {
      line += std::string(" ") + mech + " |Adv^U| = " +
              Format(utility.at(mech).at("pairs").at(pair).at("abs_advantage").get<double>());
    }
    v.detail += (v.detail.empty() ? "" : "; ") + line;
  }
  return v;
}

Verdict Determinism(const Json& reference_report) {
  Verdict v;
  const ReproRun parallel = RunRepro("leaky_metadata", 3);
  const std::string a = reference_report.dump(2);
  const std::string b = parallel.result.report.dump(2);
  v.Require(a == b, "leaky_metadata report differs between --jobs 1 and 3");
  const fs::path dir = fs::temp_directory_path() / "synthpriv_acceptance";
  fs::remove_all(dir);
  const ReproRun serial = RunRepro("csv_example", 1);
  const ReproRun threaded = RunRepro("csv_example", 2);
  WriteExperimentOutputs(serial.result, dir / "a");
  WriteExperimentOutputs(threaded.result, dir / "b");
  auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
  };
  v.Require(read(dir / "a" / "report.json") == read(dir / "b" / "report.json"),
            "csv_example report.json differs between --jobs 1 and 2");
  v.detail += (v.detail.empty() ? "" : "; ") +
              std::string("report.json byte-identical across worker counts");
  return v;
}

int RunManifestOnly(const std::string& name) {
  Verdict v;
  const ReproRun run = RunRepro(name);
  CheckManifestFile(name, run.result.report, v);
  std::printf("%s repro %s: %s (%s s)\n", v.passed ? "PASS" : "FAIL",
              name.c_str(), v.detail.empty() ? "all manifest checks hold" : v.detail.c_str(),
              Format(run.seconds).c_str());
  return v.passed ? 0 : 1;
}

int RunAll() {
  const std::vector<std::pair<int, std::string>> names = {
      {1, "raw-data linkability baseline"},
      {2, "DP bound for PrivBay epsilon = 0.1"},
      {3, "leaky-metadata violation"},
      {4, "disparate gain, random vs outlier targets"},
      {5, "epsilon convergence of PrivBay to BayNet"},
      {6, "oracle equivalence of generators and exponential mechanism"},
      {7, "regression posterior"},
      {8, "sanitiser k-anonymity, capping and determinism"},
      {9, "utility-suppression tradeoff"},
      {10, "determinism across worker counts"},
  };
  Json leaky_report;
  const std::map<int, std::function<Verdict()>> checks = {
      {1, RawBaseline},
      {2, DpBound},
      {3, [&] { return LeakyMetadata(&leaky_report); }},
      {4, DisparateGain},
      {5, EpsilonConvergence},
      {6, OracleEquivalence},
      {7, PosteriorChecks},
      {8, SanitiserChecks},
      {9, UtilityTradeoff},
      {10, [&] { return Determinism(leaky_report); }},
  };
  int failures = 0;
  for (const auto& [id, name] : names) {
    Verdict verdict;
    const auto start = std::chrono::steady_clock::now();
    try {
      verdict = checks.at(id)();
    } catch (const std::exception& e) {
      verdict.passed = false;
      verdict.detail = e.what();
    }
    failures += !verdict.passed;
    std::printf("%s criterion %d: %s [%s] (%s s)\n", verdict.passed ? "PASS" : "FAIL",
                id, name.c_str(), verdict.detail.c_str(),
                Format(Seconds(start)).c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace synthpriv

int main(int argc, char** argv) {
  if (argc == 3 && std::string(argv[1]) == "--manifest") {
    return synthpriv::RunManifestOnly(argv[2]);
  }
  return synthpriv::RunAll();
}
