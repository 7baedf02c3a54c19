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

#ifndef SYNTHPRIV_MECHANISM_H_
#define SYNTHPRIV_MECHANISM_H_

#include <cstddef>
#include <string>
#include <variant>

#include "synthpriv/dataset.h"
#include "synthpriv/generator.h"
#include "synthpriv/random.h"
#include "synthpriv/sanitiser.h"

namespace synthpriv {

// Publishing the raw data unchanged.
struct RawPassthrough {};

// How a data holder turns the raw dataset into what gets published.
using Mechanism = std::variant<GeneratorSpec, SanitiserConfig, RawPassthrough>;

enum class PublishedKind { kRaw, kSanitised, kSynthetic };

PublishedKind PublishedKindOf(const Mechanism& mechanism);

// Synthetic: fit on `raw` (with `metadata` in provided mode) and sample m
// records. Sanitised: Sanitise(raw). Raw: `raw` itself.
Dataset Publish(const Mechanism& mechanism, const Dataset& raw,
                const SchemaMetadata& metadata, std::size_t m, Rng& rng);

}  // namespace synthpriv

#endif  // SYNTHPRIV_MECHANISM_H_
