// Copyright 2026 The opfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OPFUZZ_RANDOM_HPP_
#define OPFUZZ_RANDOM_HPP_

#include <cstdint>
#include <limits>
#include <random>

namespace opfuzz {

// std::mt19937_64 is specified bit-exactly by the standard; the standard
// distributions are not, so bounded draws go through the helpers below to
// keep emission sequences identical across standard libraries.
using Rng = std::mt19937_64;

constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0, n). n == 0 means the full 64-bit range.
inline uint64_t uniform_below(Rng& rng, uint64_t n) {
  if (n == 0) return rng();
  const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % n;
  uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

// Uniform in the inclusive range [lo, hi].
inline int64_t uniform_range(Rng& rng, int64_t lo, int64_t hi) {
  const uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
  return static_cast<int64_t>(static_cast<uint64_t>(lo) + uniform_below(rng, span));
}

}  // namespace opfuzz

#endif  // OPFUZZ_RANDOM_HPP_
