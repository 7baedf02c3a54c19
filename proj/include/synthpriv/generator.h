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

#ifndef SYNTHPRIV_GENERATOR_H_
#define SYNTHPRIV_GENERATOR_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "synthpriv/dataset.h"
#include "synthpriv/dp.h"
#include "synthpriv/random.h"
#include "synthpriv/schema.h"

namespace synthpriv {

enum class GeneratorKind { kIndHist, kBayNet, kPrivBay, kExternal };
enum class MetadataMode { kProvided, kLearned };

std::string_view GeneratorKindName(GeneratorKind kind);

// Training algorithm and its hyperparameters.
//
// `metadata_mode` decides where category lists and numeric ranges come from:
// kProvided uses the metadata handed to Fit (independent of the training
// data), kLearned re-derives them from the training data. The learned mode
// leaks membership through the support of the model and voids any DP claim.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kIndHist;
  int nbins = 25;
  int degree = 1;
  std::optional<PrivacyBudget> budget;
  MetadataMode metadata_mode = MetadataMode::kProvided;
  double learned_pad_fraction = 0.0;
  // Mutual-information sensitivity for structure selection. Unset means the
  // PrivBayes bound for the training-set size (see
  // MutualInformationSensitivity).
  std::optional<double> mi_sensitivity;
  // External bridge only. Placeholders: {train_csv} {schema_json} {out_csv}
  // {m} {seed}.
  std::string external_cmd;
  bool keep_workdirs = false;

  // Throws kInvalidArgument.
  void Validate() const;
};

// Support of one attribute inside a model: the schema categories it may emit
// or the range and bin count it discretises into.
struct AttributeDomain {
  bool categorical = true;
  std::vector<std::size_t> categories;
  double min = 0.0;
  double max = 0.0;
  int bins = 1;

  std::size_t size() const {
    return categorical ? categories.size() : static_cast<std::size_t>(bins);
  }
};

// P(attribute | parents) with one row per parent configuration (mixed radix
// over parent domains, first parent most significant). Rows sum to 1.
struct ConditionalTable {
  std::size_t attribute = 0;
  std::vector<std::size_t> parents;
  std::vector<std::size_t> parent_sizes;
  std::vector<std::vector<double>> rows;

  std::size_t ParentConfig(const std::vector<std::size_t>& local) const;
};

// A fitted model. Holds a Bayesian network over discretised attributes;
// IndHist is the network without edges. Immutable after Fit.
class TrainedGenerator {
 public:
  const GeneratorSpec& spec() const { return spec_; }
  const SchemaMetadata& schema() const { return *data_schema_; }
  const SchemaMetadata& metadata() const { return metadata_; }
  bool leaky() const { return leaky_; }
  std::uint64_t fit_seed() const { return fit_seed_; }
  std::size_t training_size() const { return training_size_; }

  const std::vector<AttributeDomain>& domains() const { return domains_; }
  // Attributes in sampling (topological) order.
  const std::vector<std::size_t>& order() const { return order_; }
  // Indexed by attribute position in the schema.
  const std::vector<ConditionalTable>& tables() const { return tables_; }

  // m i.i.d. records on the training data's schema. Continuous values are
  // drawn uniformly inside the sampled bin. Throws kInvalidArgument for m < 1.
  Dataset Sample(std::size_t m, Rng& rng) const;

  // Local domain index of every cell; throws kMetadataViolation for values
  // outside the model's support.
  std::vector<std::vector<std::size_t>> Encode(const Dataset& data) const;

 private:
  friend TrainedGenerator Fit(const GeneratorSpec&, const Dataset&,
                              const SchemaMetadata&, Rng&);

  GeneratorSpec spec_;
  std::shared_ptr<const SchemaMetadata> data_schema_;
  SchemaMetadata metadata_;
  bool leaky_ = false;
  std::uint64_t fit_seed_ = 0;
  std::size_t training_size_ = 0;
  std::vector<AttributeDomain> domains_;
  std::vector<std::size_t> order_;
  std::vector<ConditionalTable> tables_;
  std::vector<std::vector<std::vector<double>>> cdfs_;
};

// Fits IndHist, BayNet or PrivBay. `metadata` must list the same attributes
// as `data.schema()`, in order; it is ignored in kLearned mode.
// Throws kEmptyDataset, kMetadataViolation (provided-mode value outside the
// metadata), kSchemaMismatch, kInvalidArgument (external kind).
TrainedGenerator Fit(const GeneratorSpec& spec, const Dataset& data,
                     const SchemaMetadata& metadata, Rng& rng);

// Fit + sample through an external command; see GeneratorSpec::external_cmd.
// The command's output is read under the reject policy and truncated or
// cycled to m rows. Throws kExternalProcessFailed, kOutputSchemaMismatch.
Dataset FitSampleExternal(const GeneratorSpec& spec, const Dataset& data,
                          const SchemaMetadata& metadata, std::size_t m,
                          Rng& rng);

// Fit then sample m records, dispatching to the external bridge when needed.
Dataset FitAndSample(const GeneratorSpec& spec, const Dataset& data,
                     const SchemaMetadata& metadata, std::size_t m, Rng& rng);

// Plug-in mutual information (nats) between `child` and the joint of
// `parents` over encoded columns.
double MutualInformation(const std::vector<std::vector<std::size_t>>& columns,
                         const std::vector<std::size_t>& sizes,
                         std::size_t child,
                         const std::vector<std::size_t>& parents);

// Largest, over attributes, parent-frequency-weighted total-variation
// distance between the conditional rows of two models with the same
// structure. Weights are the parent-configuration frequencies of `data`
// encoded under `a`. Returns 1 when the structures differ.
double ConditionalTableDistance(const TrainedGenerator& a,
                                const TrainedGenerator& b, const Dataset& data);

}  // namespace synthpriv

#endif  // SYNTHPRIV_GENERATOR_H_
