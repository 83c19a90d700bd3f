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

#ifndef OPFUZZ_HASH_HPP_
#define OPFUZZ_HASH_HPP_

#include <cstdint>

namespace opfuzz {

// 32-bit avalanche finalizer: alternating xor-shift and odd-constant
// multiplication. Every step is invertible, so the whole map is a bijection.
constexpr uint32_t mix32(uint32_t x) {
  x ^= x >> 16;
  x *= 0x7feb352dU;
  x ^= x >> 15;
  x *= 0x846ca68bU;
  x ^= x >> 16;
  return x;
}

// mix32 of the low 32 bits of v, reduced to one of bucket_count buckets.
// Throws ConfigError when bucket_count < 2.
uint32_t bucket(int64_t v, uint32_t bucket_count);

}  // namespace opfuzz

#endif  // OPFUZZ_HASH_HPP_
