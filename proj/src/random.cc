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

#include "synthpriv/random.h"

#include <algorithm>
#include <numeric>
#include <utility>

namespace synthpriv {

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t StableHash(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

double UniformUnit(Rng& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

std::size_t UniformIndex(std::size_t bound, Rng& rng) {
  std::uniform_int_distribution<std::size_t> dist(0, bound - 1);
  return dist(rng);
}

std::vector<std::size_t> SampleWithoutReplacement(std::size_t pool,
                                                  std::size_t count, Rng& rng) {
  std::vector<std::size_t> indices(pool);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  count = std::min(count, pool);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + UniformIndex(pool - i, rng);
    std::swap(indices[i], indices[j]);
  }
  indices.resize(count);
  return indices;
}

std::size_t DrawFromCdf(const std::vector<double>& cdf, Rng& rng) {
  const double u = UniformUnit(rng) * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace synthpriv
