// Copyright 2026 The Falsiflow Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FALSIFLOW_RANDOM_HPP
#define FALSIFLOW_RANDOM_HPP

#include <cstdint>
#include <random>

namespace falsiflow {

// SplitMix64 finalizer, used to derive independent per-replicate seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of replicate `index` under base seed `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

using Engine = std::mt19937_64;

// Uniform integer in [0, bound) by rejection; identical on every platform,
// unlike std::uniform_int_distribution.
inline std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  for (;;) {
    const std::uint64_t r = engine();
    if (r < limit) return r % bound;
  }
}

}  // namespace falsiflow

#endif  // FALSIFLOW_RANDOM_HPP
