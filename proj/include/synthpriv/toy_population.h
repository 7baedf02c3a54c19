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

#ifndef SYNTHPRIV_TOY_POPULATION_H_
#define SYNTHPRIV_TOY_POPULATION_H_

#include <cstddef>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "synthpriv/dataset.h"
#include "synthpriv/random.h"
#include "synthpriv/schema.h"

namespace synthpriv {

struct MixtureComponent {
  double weight = 1.0;
  double mean = 0.0;
  double sd = 1.0;
};

// Generative description of one toy attribute. Categorical attributes draw
// from `weights` (one per category, zero allowed); continuous attributes from
// a Gaussian mixture clipped into [spec.min, spec.max].
struct ToyAttribute {
  AttributeSpec spec;
  std::vector<double> weights;
  std::vector<MixtureComponent> mixture;
};

// Makes `child` depend on an earlier `parent` attribute.
//  - categorical parent, categorical child: child_weights[parent category]
//    replaces the child's weights.
//  - categorical parent, continuous child: shifts[parent category] is added.
//  - continuous parent, continuous child: slope * parent is added.
struct Coupling {
  std::string parent;
  std::string child;
  std::vector<std::vector<double>> child_weights;
  std::vector<double> shifts;
  double slope = 0.0;
};

using PlantedValue = std::variant<double, std::string>;

// A record appended after the i.i.d. draws. Attributes it leaves out are
// drawn from the toy distribution as usual.
struct PlantedRecord {
  std::map<std::string, PlantedValue> values;
};

// Outlier hook: `count` extra records, each pushed into the top 3% of the
// range on `extreme_attributes` continuous attributes (chosen cyclically so
// different outliers stress different columns). With `rare_category`, each
// also takes a zero-weight category where one exists.
struct OutlierPlan {
  std::size_t count = 0;
  std::size_t extreme_attributes = 0;
  bool rare_category = false;
};

struct ToyPopulationConfig {
  std::vector<ToyAttribute> attributes;
  std::vector<std::string> quasi_identifiers;
  std::vector<Coupling> couplings;
  std::vector<PlantedRecord> planted;
  OutlierPlan outliers;

  SchemaMetadata Schema() const;
  // Throws kInvalidConfig.
  void Validate() const;
};

// n i.i.d. records followed by the planted records and then the hook's
// outliers. Bitwise reproducible for a given rng state.
Dataset SampleToyPopulation(const ToyPopulationConfig& config, std::size_t n,
                            Rng& rng);

}  // namespace synthpriv

#endif  // SYNTHPRIV_TOY_POPULATION_H_
