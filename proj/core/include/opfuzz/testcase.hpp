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

#ifndef OPFUZZ_TESTCASE_HPP_
#define OPFUZZ_TESTCASE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opfuzz/operators.hpp"

namespace opfuzz {

inline constexpr int kTestCaseVersion = 1;
inline constexpr std::string_view kGeneratorVersion = "opfuzz 0.1.0";

enum class DType { kF16, kF32, kF64, kI32, kI64 };

std::string_view to_string(DType d);
std::optional<DType> parse_dtype(std::string_view s);

struct TestCase {
  std::string id;  // 32 lowercase hex digits
  OperatorKind kind;
  Params params;
  DType dtype = DType::kF32;
  uint64_t seed = 0;
  uint64_t iteration = 0;
  std::string generator_version{kGeneratorVersion};

  bool operator==(const TestCase&) const = default;
};

// First 128 bits of SHA-256 over the canonical encoding of (family, rank,
// params, dtype). Seed and iteration do not participate.
std::string compute_id(OperatorKind kind, const Params& params, DType dtype);

TestCase make_testcase(OperatorKind kind, Params params, DType dtype, uint64_t seed,
                       uint64_t iteration);

// Pretty-printed JSON with a trailing newline.
std::string to_json(const TestCase& tc);
// Throws ParseError naming the offending field, UnsupportedVersionError on a
// version other than kTestCaseVersion.
TestCase from_json(std::string_view text);

// Re-derives the operator model under permissive bounds, evaluates every
// labelled rule, then cross-checks output dims against output_shape. One
// entry per violated rule; empty iff valid.
std::vector<Violation> validate(const TestCase& tc);
std::vector<Violation> validate(OperatorKind kind, const Params& params);

}  // namespace opfuzz

#endif  // OPFUZZ_TESTCASE_HPP_
