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

#ifndef SYNTHPRIV_RANDOM_H_
#define SYNTHPRIV_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace synthpriv {

/// The random engine used throughout. Streams are always passed explicitly;
/// there is no global generator.
using Rng = std::mt19937_64;

/// Mixes `base` and `stream` into an independent seed (splitmix64 finaliser).
/// Used to give every shadow model, game iteration and experiment cell its
/// own stream so results do not depend on scheduling order.
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream);

/// FNV-1a over the bytes of `text`. Stable across platforms, unlike std::hash.
std::uint64_t StableHash(std::string_view text);

/// Uniform draw in [0, 1).
double UniformUnit(Rng& rng);

/// Uniform integer in [0, bound).
std::size_t UniformIndex(std::size_t bound, Rng& rng);

/// `count` distinct indices from [0, pool) in random order (partial
/// Fisher-Yates over an index vector).
std::vector<std::size_t> SampleWithoutReplacement(std::size_t pool,
                                                  std::size_t count, Rng& rng);

/// Draws an index from the cumulative weights `cdf` (last entry is the total).
std::size_t DrawFromCdf(const std::vector<double>& cdf, Rng& rng);

}  // namespace synthpriv

#endif  // SYNTHPRIV_RANDOM_H_
