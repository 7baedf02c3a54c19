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

#include "synthpriv/mechanism.h"

namespace synthpriv {

PublishedKind PublishedKindOf(const Mechanism& mechanism) {
  if (std::holds_alternative<GeneratorSpec>(mechanism)) {
    return PublishedKind::kSynthetic;
  }
  if (std::holds_alternative<SanitiserConfig>(mechanism)) {
    return PublishedKind::kSanitised;
  }
  return PublishedKind::kRaw;
}

Dataset Publish(const Mechanism& mechanism, const Dataset& raw,
                const SchemaMetadata& metadata, std::size_t m, Rng& rng) {
  if (const auto* spec = std::get_if<GeneratorSpec>(&mechanism)) {
    return FitAndSample(*spec, raw, metadata, m, rng);
  }
  if (const auto* config = std::get_if<SanitiserConfig>(&mechanism)) {
    return Sanitise(raw, *config);
  }
  return raw;
}

}  // namespace synthpriv
