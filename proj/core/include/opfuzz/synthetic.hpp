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

#ifndef OPFUZZ_SYNTHETIC_HPP_
#define OPFUZZ_SYNTHETIC_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opfuzz/int128.hpp"
#include "opfuzz/testcase.hpp"
#include "opfuzz/verdict.hpp"

namespace opfuzz {

// Emulates the host-side launch arithmetic of an elementwise-over-output GPU
// kernel: total = prod(output dims), grid = ceil(total / block). Injected
// bugs corrupt that arithmetic; the covering check is analytic.

inline constexpr int64_t kDefaultBlock = 256;

struct InjectedBug {
  // "*" (any), a family ("ConvTranspose") or an operator ("ConvTranspose2d").
  std::string family = "*";
  BugPattern pattern = BugPattern::kTrunc32ElementCount;
  // Applies only when the true element count is at least this.
  i128 guard_min_true_count = 0;
  std::string note;

  bool matches(OperatorKind kind) const;
  bool operator==(const InjectedBug&) const = default;
};

struct BugManifest {
  std::vector<InjectedBug> bugs;

  // Trunc32ElementCount on ConvTranspose, FloorGrid on ReplicationPad above
  // 2^24 elements.
  static BugManifest default_manifest();
  bool operator==(const BugManifest&) const = default;
};

// JSON list of {family, pattern, guard_min_true_count, note}. Throws
// ParseError.
BugManifest parse_manifest(std::string_view text);
std::string manifest_to_json(const BugManifest& m);
// Throws IoError / ParseError.
BugManifest load_manifest(const std::filesystem::path& path);

// Count-level arithmetic shared by launch_config and the property tests.
i128 truncate_to_int32(i128 v);
Diagnostics launch_arithmetic(i128 true_count, bool truncate, bool floor_grid,
                              int64_t block = kDefaultBlock);
// Verdict kind (and OOB sub-kind) for given launch arithmetic.
Verdict judge(const Diagnostics& d);

struct LaunchConfig {
  Diagnostics diag;
  std::vector<BugPattern> applied;
};

// Saturating product of the reference output shape; 0 when the test case is
// invalid.
i128 true_element_count(const TestCase& tc);

// Precondition: tc valid.
LaunchConfig launch_config(const TestCase& tc, const BugManifest& manifest,
                           int64_t block = kDefaultBlock);

// PreconditionReject for invalid test cases, otherwise the launch verdict.
Verdict execute(const TestCase& tc, const BugManifest& manifest, int64_t block = kDefaultBlock);

}  // namespace opfuzz

#endif  // OPFUZZ_SYNTHETIC_HPP_
