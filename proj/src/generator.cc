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

#include "synthpriv/generator.h"

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <utility>

#include "synthpriv/error.h"
#include "synthpriv/json_io.h"

namespace synthpriv {
namespace {

using Columns = std::vector<std::vector<std::size_t>>;

void CheckCompatible(const SchemaMetadata& data_schema,
                     const SchemaMetadata& metadata) {
  if (data_schema.size() != metadata.size()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "metadata and data have different attribute counts");
  }
  for (std::size_t j = 0; j < data_schema.size(); ++j) {
    const AttributeSpec& d = data_schema.attribute(j);
    const AttributeSpec& m = metadata.attribute(j);
    if (d.name != m.name || d.kind != m.kind) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "metadata attribute " + std::to_string(j) + " ('" + m.name +
                      "') does not match data attribute '" + d.name + "'");
    }
  }
}

std::vector<AttributeDomain> BuildDomains(const SchemaMetadata& data_schema,
                                          const SchemaMetadata& metadata,
                                          int nbins) {
  std::vector<AttributeDomain> domains;
  for (std::size_t j = 0; j < metadata.size(); ++j) {
    const AttributeSpec& meta = metadata.attribute(j);
    const AttributeSpec& repr = data_schema.attribute(j);
    AttributeDomain domain;
    domain.categorical = meta.is_categorical();
    if (meta.is_categorical()) {
      for (const auto& c : meta.categories) {
        auto index = repr.CategoryIndex(c);
        if (!index) {
          throw Error(ErrorCode::kSchemaMismatch,
                      "metadata category '" + c + "' of '" + meta.name +
                          "' is not in the data schema");
        }
        domain.categories.push_back(*index);
      }
    } else {
      domain.min = meta.min;
      domain.max = meta.max;
      domain.bins = nbins;
    }
    domains.push_back(std::move(domain));
  }
  return domains;
}

// Every k-subset of `items` in lexicographic order.
void Combinations(const std::vector<std::size_t>& items, std::size_t k,
                  std::size_t start, std::vector<std::size_t>& current,
                  std::vector<std::vector<std::size_t>>& out) {
  if (current.size() == k) {
    out.push_back(current);
    return;
  }
  for (std::size_t i = start; i < items.size(); ++i) {
    current.push_back(items[i]);
    Combinations(items, k, i + 1, current, out);
    current.pop_back();
  }
}

std::size_t ConfigIndex(const Columns& columns,
                        const std::vector<std::size_t>& sizes,
                        const std::vector<std::size_t>& parents,
                        std::size_t row) {
  std::size_t config = 0;
  for (std::size_t p : parents) config = config * sizes[p] + columns[p][row];
  return config;
}

std::size_t ConfigCount(const std::vector<std::size_t>& sizes,
                        const std::vector<std::size_t>& parents) {
  std::size_t count = 1;
  for (std::size_t p : parents) count *= sizes[p];
  return count;
}

struct Structure {
  std::vector<std::size_t> order;
  std::vector<std::vector<std::size_t>> parents;
};

// Greedy network construction. The first schema attribute is the root; each
// step adds the (child, parent set) pair with the highest mutual
// information, or, when `budget` is set, one drawn by the exponential
// mechanism on those scores.
Structure GreedyStructure(const Columns& columns,
                          const std::vector<std::size_t>& sizes, int degree,
                          const GeneratorSpec& spec, std::size_t n, Rng& rng) {
  const std::size_t k = sizes.size();
  Structure s;
  s.parents.resize(k);
  if (k == 0) return s;
  std::vector<bool> added(k, false);
  s.order.push_back(0);
  added[0] = true;

  const bool is_private = spec.kind == GeneratorKind::kPrivBay;
  double step_epsilon = 0.0;
  double sensitivity = 0.0;
  if (is_private && k > 1) {
    step_epsilon = spec.budget->structure_epsilon() / static_cast<double>(k - 1);
    bool all_binary = std::all_of(sizes.begin(), sizes.end(),
                                  [](std::size_t d) { return d <= 2; });
    sensitivity = spec.mi_sensitivity.value_or(
        MutualInformationSensitivity(n, all_binary));
  }

  while (s.order.size() < k) {
    std::vector<std::size_t> chosen(s.order);
    std::sort(chosen.begin(), chosen.end());
    const std::size_t width =
        std::min<std::size_t>(static_cast<std::size_t>(degree), chosen.size());
    std::vector<std::vector<std::size_t>> parent_sets;
    std::vector<std::size_t> scratch;
    Combinations(chosen, width, 0, scratch, parent_sets);

    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    std::vector<double> scores;
    for (std::size_t child = 0; child < k; ++child) {
      if (added[child]) continue;
      for (std::size_t p = 0; p < parent_sets.size(); ++p) {
        candidates.emplace_back(child, p);
        scores.push_back(
            MutualInformation(columns, sizes, child, parent_sets[p]));
      }
    }
    std::size_t pick = 0;
    if (is_private) {
      pick = ExponentialMechanism(scores, sensitivity, step_epsilon, rng);
    } else {
      for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[pick]) pick = i;
      }
    }
    const auto [child, p] = candidates[pick];
    s.order.push_back(child);
    s.parents[child] = parent_sets[p];
    added[child] = true;
  }
  return s;
}

}  // namespace

std::string_view GeneratorKindName(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kIndHist: return "IndHist";
    case GeneratorKind::kBayNet: return "BayNet";
    case GeneratorKind::kPrivBay: return "PrivBay";
    case GeneratorKind::kExternal: return "External";
  }
  return "Unknown";
}

void GeneratorSpec::Validate() const {
  if (nbins < 1) throw Error(ErrorCode::kInvalidArgument, "nbins must be >= 1");
  if (degree < 1) {
    throw Error(ErrorCode::kInvalidArgument, "degree must be >= 1");
  }
  if (!(learned_pad_fraction >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "pad fraction must be >= 0");
  }
  if (kind == GeneratorKind::kPrivBay) {
    if (!budget) {
      throw Error(ErrorCode::kInvalidArgument, "PrivBay needs a budget");
    }
    budget->Validate();
  }
  if (mi_sensitivity && !(*mi_sensitivity > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mi_sensitivity must be > 0");
  }
  if (kind == GeneratorKind::kExternal && external_cmd.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "external generator needs external_cmd");
  }
}

std::size_t ConditionalTable::ParentConfig(
    const std::vector<std::size_t>& local) const {
  std::size_t config = 0;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    config = config * parent_sizes[i] + local[parents[i]];
  }
  return config;
}

double MutualInformation(const Columns& columns,
                         const std::vector<std::size_t>& sizes,
                         std::size_t child,
                         const std::vector<std::size_t>& parents) {
  const std::size_t n = columns[child].size();
  if (n == 0) return 0.0;
  const std::size_t child_size = sizes[child];
  const std::size_t configs = ConfigCount(sizes, parents);
  std::vector<double> joint(child_size * configs, 0.0);
  std::vector<double> child_marginal(child_size, 0.0);
  std::vector<double> parent_marginal(configs, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t c = columns[child][r];
    const std::size_t p = ConfigIndex(columns, sizes, parents, r);
    joint[p * child_size + c] += 1.0;
    child_marginal[c] += 1.0;
    parent_marginal[p] += 1.0;
  }
  const double total = static_cast<double>(n);
  double mi = 0.0;
  for (std::size_t p = 0; p < configs; ++p) {
    if (parent_marginal[p] == 0.0) continue;
    for (std::size_t c = 0; c < child_size; ++c) {
      const double count = joint[p * child_size + c];
      if (count == 0.0) continue;
      mi += count / total *
            std::log(count * total / (child_marginal[c] * parent_marginal[p]));
    }
  }
  return std::max(mi, 0.0);
}

std::vector<std::vector<std::size_t>> TrainedGenerator::Encode(
    const Dataset& data) const {
  const std::size_t k = domains_.size();
  Columns columns(k, std::vector<std::size_t>(data.size()));
  for (std::size_t j = 0; j < k; ++j) {
    const AttributeDomain& domain = domains_[j];
    const std::string& name = data.schema().attribute(j).name;
    if (domain.categorical) {
      std::vector<std::size_t> local_of(
          data.schema().attribute(j).category_count(), domain.size());
      for (std::size_t i = 0; i < domain.categories.size(); ++i) {
        local_of[domain.categories[i]] = i;
      }
      for (std::size_t r = 0; r < data.size(); ++r) {
        const std::size_t local = local_of[data[r].category(j)];
        if (local == domain.size()) {
          throw Error(ErrorCode::kMetadataViolation,
                      "attribute '" + name + "': category outside metadata");
        }
        columns[j][r] = local;
      }
    } else {
      for (std::size_t r = 0; r < data.size(); ++r) {
        const double v = data[r][j];
        if (v < domain.min || v > domain.max) {
          throw Error(ErrorCode::kMetadataViolation,
                      "attribute '" + name + "': value outside metadata range");
        }
        columns[j][r] = static_cast<std::size_t>(
            BinIndex(v, domain.min, domain.max, domain.bins));
      }
    }
  }
  return columns;
}

TrainedGenerator Fit(const GeneratorSpec& spec, const Dataset& data,
                     const SchemaMetadata& metadata, Rng& rng) {
  spec.Validate();
  if (spec.kind == GeneratorKind::kExternal) {
    throw Error(ErrorCode::kInvalidArgument,
                "external generators are run through FitSampleExternal");
  }
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "nothing to fit");

  TrainedGenerator model;
  model.spec_ = spec;
  model.data_schema_ = data.shared_schema();
  model.training_size_ = data.size();
  model.fit_seed_ = rng();
  Rng fit_rng(model.fit_seed_);
  if (spec.metadata_mode == MetadataMode::kLearned) {
    model.metadata_ = DeriveMetadata(data, spec.learned_pad_fraction);
    model.leaky_ = true;
  } else {
    model.metadata_ = metadata;
  }
  CheckCompatible(data.schema(), model.metadata_);
  model.domains_ = BuildDomains(data.schema(), model.metadata_, spec.nbins);

  const Columns columns = model.Encode(data);
  const std::size_t k = model.domains_.size();
  std::vector<std::size_t> sizes(k);
  for (std::size_t j = 0; j < k; ++j) sizes[j] = model.domains_[j].size();

  Structure structure;
  if (spec.kind == GeneratorKind::kIndHist) {
    structure.order.resize(k);
    std::iota(structure.order.begin(), structure.order.end(), std::size_t{0});
    structure.parents.resize(k);
  } else {
    structure = GreedyStructure(columns, sizes, spec.degree, spec, data.size(),
                                fit_rng);
  }
  model.order_ = structure.order;

  const bool noisy = spec.kind == GeneratorKind::kPrivBay;
  // L1 sensitivity of a count table under record replacement is 2; the
  // table budget is split evenly over the k tables.
  const double noise_scale =
      noisy ? 2.0 * static_cast<double>(k) / spec.budget->tables_epsilon()
            : 0.0;

  model.tables_.resize(k);
  model.cdfs_.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    ConditionalTable& table = model.tables_[j];
    table.attribute = j;
    table.parents = structure.parents[j];
    for (std::size_t p : table.parents) table.parent_sizes.push_back(sizes[p]);
    const std::size_t configs = ConfigCount(sizes, table.parents);
    table.rows.assign(configs, std::vector<double>(sizes[j], 0.0));
    for (std::size_t r = 0; r < data.size(); ++r) {
      const std::size_t config = ConfigIndex(columns, sizes, table.parents, r);
      table.rows[config][columns[j][r]] += 1.0;
    }
    for (auto& row : table.rows) {
      if (noisy) {
        for (double& cell : row) {
          cell = std::max(0.0, cell + LaplaceNoise(noise_scale, fit_rng));
        }
      }
      const double total = std::accumulate(row.begin(), row.end(), 0.0);
      if (total > 0.0) {
        for (double& cell : row) cell /= total;
      } else {
        std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(row.size()));
      }
    }
    auto& cdf_rows = model.cdfs_[j];
    cdf_rows.reserve(configs);
    for (const auto& row : table.rows) {
      std::vector<double> cdf(row.size());
      std::partial_sum(row.begin(), row.end(), cdf.begin());
      cdf_rows.push_back(std::move(cdf));
    }
  }
  return model;
}

Dataset TrainedGenerator::Sample(std::size_t m, Rng& rng) const {
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "m must be >= 1");
  const SchemaMetadata& schema = *data_schema_;
  const std::size_t k = domains_.size();
  std::vector<Record> records(m);
  std::vector<std::size_t> local(k);
  for (std::size_t i = 0; i < m; ++i) {
    Record& rec = records[i];
    rec.values.resize(k);
    for (std::size_t j : order_) {
      const ConditionalTable& table = tables_[j];
      local[j] = DrawFromCdf(cdfs_[j][table.ParentConfig(local)], rng);
      const AttributeDomain& domain = domains_[j];
      if (domain.categorical) {
        rec[j] = static_cast<double>(domain.categories[local[j]]);
      } else {
        const double width = (domain.max - domain.min) / domain.bins;
        const double v = domain.min +
                         (static_cast<double>(local[j]) + UniformUnit(rng)) * width;
        const AttributeSpec& repr = schema.attribute(j);
        rec[j] = std::clamp(v, std::max(domain.min, repr.min),
                            std::min(domain.max, repr.max));
      }
    }
  }
  return Dataset(data_schema_, std::move(records));
}

double ConditionalTableDistance(const TrainedGenerator& a,
                                const TrainedGenerator& b,
                                const Dataset& data) {
  if (a.tables().size() != b.tables().size()) return 1.0;
  const auto columns = a.Encode(data);
  std::vector<std::size_t> sizes;
  for (const auto& d : a.domains()) sizes.push_back(d.size());
  double worst = 0.0;
  for (std::size_t j = 0; j < a.tables().size(); ++j) {
    const ConditionalTable& ta = a.tables()[j];
    const ConditionalTable& tb = b.tables()[j];
    if (ta.parents != tb.parents || ta.rows.size() != tb.rows.size()) {
      return 1.0;
    }
    std::vector<double> weight(ta.rows.size(), 0.0);
    for (std::size_t r = 0; r < data.size(); ++r) {
      weight[ConfigIndex(columns, sizes, ta.parents, r)] += 1.0;
    }
    double distance = 0.0;
    for (std::size_t c = 0; c < ta.rows.size(); ++c) {
      if (weight[c] == 0.0) continue;
      if (ta.rows[c].size() != tb.rows[c].size()) return 1.0;
      double tv = 0.0;
      for (std::size_t v = 0; v < ta.rows[c].size(); ++v) {
        tv += std::abs(ta.rows[c][v] - tb.rows[c][v]);
      }
      distance += weight[c] / static_cast<double>(data.size()) * 0.5 * tv;
    }
    worst = std::max(worst, distance);
  }
  return worst;
}

namespace {

std::string Substitute(std::string text, const std::string& key,
                       const std::string& value) {
  const std::string token = "{" + key + "}";
  for (std::size_t pos = text.find(token); pos != std::string::npos;
       pos = text.find(token, pos + value.size())) {
    text.replace(pos, token.size(), value);
  }
  return text;
}

std::string ShellQuote(const std::string& text) {
  std::string out = "'";
  for (char c : text) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

std::filesystem::path MakeWorkDir() {
  std::string pattern =
      (std::filesystem::temp_directory_path() / "synthpriv-XXXXXX").string();
  if (mkdtemp(pattern.data()) == nullptr) {
    throw Error(ErrorCode::kIoError, "cannot create work directory");
  }
  return pattern;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

Dataset FitSampleExternal(const GeneratorSpec& spec, const Dataset& data,
                          const SchemaMetadata& metadata, std::size_t m,
                          Rng& rng) {
  if (spec.external_cmd.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "external generator needs external_cmd");
  }
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "nothing to fit");
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "m must be >= 1");

  const SchemaMetadata used = spec.metadata_mode == MetadataMode::kLearned
                                  ? DeriveMetadata(data, spec.learned_pad_fraction)
                                  : metadata;
  const std::filesystem::path dir = MakeWorkDir();
  struct Cleanup {
    std::filesystem::path dir;
    bool keep;
    ~Cleanup() {
      std::error_code ignored;
      if (!keep) std::filesystem::remove_all(dir, ignored);
    }
  } cleanup{dir, spec.keep_workdirs};

  const auto train_csv = dir / "train.csv";
  const auto schema_json = dir / "schema.json";
  const auto out_csv = dir / "out.csv";
  const auto stderr_path = dir / "stderr.txt";
  SaveCsv(train_csv, data);
  SaveSchemaFile(schema_json, used);

  std::string command = spec.external_cmd;
  command = Substitute(command, "train_csv", ShellQuote(train_csv.string()));
  command = Substitute(command, "schema_json", ShellQuote(schema_json.string()));
  command = Substitute(command, "out_csv", ShellQuote(out_csv.string()));
  command = Substitute(command, "m", std::to_string(m));
  command = Substitute(command, "seed", std::to_string(rng()));
  const std::string wrapped =
      "( " + command + " ) 2> " + ShellQuote(stderr_path.string());

  const int status = std::system(wrapped.c_str());
  const int exit_code =
      status == -1 ? -1 : (WIFEXITED(status) ? WEXITSTATUS(status) : 128);
  if (exit_code != 0) {
    throw Error(ErrorCode::kExternalProcessFailed,
                "exit code " + std::to_string(exit_code) + ": " +
                    ReadFile(stderr_path));
  }
  if (!std::filesystem::exists(out_csv)) {
    throw Error(ErrorCode::kOutputSchemaMismatch, "command wrote no output");
  }
  Dataset produced;
  try {
    produced = LoadCsv(out_csv, data.schema(), RangePolicy::kReject);
  } catch (const Error& e) {
    throw Error(ErrorCode::kOutputSchemaMismatch, e.what());
  }
  if (produced.empty()) {
    throw Error(ErrorCode::kOutputSchemaMismatch, "command wrote no rows");
  }
  std::vector<std::size_t> rows(m);
  for (std::size_t i = 0; i < m; ++i) rows[i] = i % produced.size();
  return Dataset(data.shared_schema(), produced.Subset(rows).records());
}

Dataset FitAndSample(const GeneratorSpec& spec, const Dataset& data,
                     const SchemaMetadata& metadata, std::size_t m, Rng& rng) {
  if (spec.kind == GeneratorKind::kExternal) {
    return FitSampleExternal(spec, data, metadata, m, rng);
  }
  return Fit(spec, data, metadata, rng).Sample(m, rng);
}

}  // namespace synthpriv
