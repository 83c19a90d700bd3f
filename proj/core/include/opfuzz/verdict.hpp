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

#ifndef OPFUZZ_VERDICT_HPP_
#define OPFUZZ_VERDICT_HPP_

#include <optional>
#include <string>
#include <string_view>

#include "opfuzz/int128.hpp"
#include "opfuzz/operators.hpp"

namespace opfuzz {

enum class VerdictKind {
  kPass,
  // Synthetic target.
  kOobWrite,
  kInvalidLaunchConfig,
  kPreconditionReject,
  // External targets.
  kSanitizerError,
  kApiException,
  kHostCrash,
  kOutOfMemory,
  kTimedOut,
};

enum class OobKind { kUndersizedGrid, kNegativeCount };

enum class BugPattern { kTrunc32ElementCount, kFloorGrid };

// compute-sanitizer memcheck error kinds, as reported by the harness.
enum class SanitizerKind {
  kInvalidGlobalWrite,
  kInvalidGlobalRead,
  kInvalidSharedRead,
  kMisalignedWrite,
  kLaunchFailure,
  kApiError,
};

enum class BugClass {
  kNone,
  kSilentMemoryCorruption,
  kGpuLevelException,
  kCpuSideAssert,
  // Reported in their own buckets, never counted as bugs.
  kOutOfMemory,
  kTimedOut,
};

std::string_view to_string(VerdictKind k);
std::string_view to_string(OobKind k);
std::string_view to_string(BugPattern p);
std::string_view to_string(SanitizerKind k);
std::string_view to_string(BugClass c);
std::optional<VerdictKind> parse_verdict_kind(std::string_view s);
std::optional<OobKind> parse_oob_kind(std::string_view s);
std::optional<BugPattern> parse_bug_pattern(std::string_view s);
std::optional<SanitizerKind> parse_sanitizer_kind(std::string_view s);
std::optional<BugClass> parse_bug_class(std::string_view s);

bool is_bug(BugClass c);

// Launch arithmetic behind a synthetic verdict.
struct Diagnostics {
  i128 true_count = 0;
  i128 host_count = 0;
  int64_t block = 0;
  i128 grid = 0;

  i128 capacity() const { return grid * block; }
  // Negative when the grid does not cover the work.
  i128 slack() const { return capacity() - true_count; }
  bool operator==(const Diagnostics&) const = default;
};

struct Verdict {
  VerdictKind kind = VerdictKind::kPass;
  std::optional<OobKind> oob;              // kOobWrite only
  std::optional<BugPattern> pattern;       // injected bug responsible, if any
  std::optional<SanitizerKind> sanitizer;  // kSanitizerError only
  std::string frame;                       // top kernel frame (external)
  std::string detail;                      // exception type, rejected rule, ...
  Diagnostics diag;

  bool operator==(const Verdict&) const = default;
};

BugClass classify(const Verdict& v);

// Stable finding key: operator name, verdict kind, then pattern/sub-kind or
// sanitizer kind and frame. Filesystem safe.
std::string dedup_signature(OperatorKind kind, const Verdict& v);

// Verdict JSON exchanged with external harnesses and stored with findings.
// Counts are decimal strings since they may exceed 64 bits.
std::string verdict_to_json(const Verdict& v);
// Throws ParseError.
Verdict verdict_from_json(std::string_view text);

}  // namespace opfuzz

#endif  // OPFUZZ_VERDICT_HPP_
