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

#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "opfuzz/error.hpp"
#include "opfuzz/generator.hpp"
#include "opfuzz/synthetic.hpp"
#include "opfuzz/testcase.hpp"
#include "opfuzz/verdict.hpp"
#include "test_util.hpp"

namespace opfuzz {
namespace {

constexpr i128 kTwo31 = i128{1} << 31;
constexpr i128 kTwo32 = i128{1} << 32;

// ConvTranspose2d with stride (200, 200) on a 40000 x 2 input; kernel,
// padding, channels and batch are our fixed choices.
TestCase large_stride_case() {
  Params p{{"dims", std::vector<int64_t>{1, 10, 40000, 2}},
           {"inch", int64_t{10}},
           {"outch", int64_t{16}},
           {"ksize", std::vector<int64_t>{3, 3}},
           {"stride", std::vector<int64_t>{200, 200}},
           {"pad", std::vector<int64_t>{0, 0}},
           {"dil", std::vector<int64_t>{1, 1}},
           {"outpad", std::vector<int64_t>{0, 0}},
           {"groups", int64_t{1}},
           {"out_dims", std::vector<int64_t>{1, 16, 7'999'803, 203}}};
  return make_testcase({OperatorFamily::kConvTranspose, 2}, p, DType::kF32, 0, 0);
}

TEST(LaunchArithmeticTest, CeilGrid) {
  const Diagnostics d = launch_arithmetic(1000, false, false, 256);
  EXPECT_EQ(d.host_count, 1000);
  EXPECT_EQ(d.grid, 4);
  EXPECT_EQ(d.capacity(), 1024);
  EXPECT_EQ(d.slack(), 24);
  EXPECT_EQ(judge(d).kind, VerdictKind::kPass);
}

TEST(LaunchArithmeticTest, SignedTruncation) {
  EXPECT_EQ(truncate_to_int32(kTwo31 + 8), -2'147'483'640);
  EXPECT_EQ(truncate_to_int32(kTwo32 + 5), 5);
  EXPECT_EQ(truncate_to_int32(kTwo31 - 1), 2'147'483'647);
  const Diagnostics d = launch_arithmetic(kTwo31 + 8, true, false, 256);
  EXPECT_EQ(d.host_count, -2'147'483'640);
  EXPECT_EQ(judge(d).kind, VerdictKind::kInvalidLaunchConfig);
}

TEST(LaunchArithmeticTest, FloorGridUndersized) {
  const Diagnostics d = launch_arithmetic(257, false, true, 256);
  EXPECT_EQ(d.grid, 1);
  EXPECT_EQ(d.slack(), -1);
  const Verdict v = judge(d);
  EXPECT_EQ(v.kind, VerdictKind::kOobWrite);
  EXPECT_EQ(v.oob, OobKind::kUndersizedGrid);
  EXPECT_EQ(classify(v), BugClass::kSilentMemoryCorruption);
}

TEST(LaunchArithmeticTest, TinyCountFloorsToZeroGrid) {
  // 100 elements, floor(100 / 256) == 0 blocks: the launch itself is invalid.
  EXPECT_EQ(judge(launch_arithmetic(100, false, true, 256)).kind,
            VerdictKind::kInvalidLaunchConfig);
}

TEST(SyntheticTest, LargeStrideRegression) {
  const TestCase tc = large_stride_case();
  ASSERT_TRUE(validate(tc).empty());
  EXPECT_EQ(true_element_count(tc), i128{25'983'360'144});
  const LaunchConfig lc = launch_config(tc, BugManifest::default_manifest());
  EXPECT_EQ(lc.diag.host_count, 213'556'368);
  EXPECT_EQ(lc.diag.grid, 834'205);
  EXPECT_EQ(lc.diag.capacity(), 213'556'480);
  ASSERT_EQ(lc.applied.size(), 1u);
  EXPECT_EQ(lc.applied[0], BugPattern::kTrunc32ElementCount);
  for (int i = 0; i < 3; ++i) {
    const Verdict v = execute(tc, BugManifest::default_manifest());
    EXPECT_EQ(v.kind, VerdictKind::kOobWrite);
    EXPECT_EQ(v.oob, OobKind::kUndersizedGrid);
    EXPECT_EQ(v.pattern, BugPattern::kTrunc32ElementCount);
    EXPECT_EQ(classify(v), BugClass::kSilentMemoryCorruption);
    EXPECT_EQ(v.diag.true_count, i128{25'983'360'144});
  }
  EXPECT_EQ(execute(tc, BugManifest{}).kind, VerdictKind::kPass);
}

TEST(SyntheticTest, InvalidCaseIsPreconditionReject) {
  TestCase tc = large_stride_case();
  tc.params["groups"] = int64_t{3};
  const Verdict v = execute(tc, BugManifest::default_manifest());
  EXPECT_EQ(v.kind, VerdictKind::kPreconditionReject);
  EXPECT_EQ(classify(v), BugClass::kCpuSideAssert);
  EXPECT_FALSE(v.detail.empty());
  EXPECT_EQ(v.diag.block, kDefaultBlock);
  EXPECT_EQ(true_element_count(tc), 0);
}

TEST(SyntheticTest, ManifestFiltersByFamilyAndGuard) {
  InjectedBug bug;
  bug.family = "ConvTranspose";
  EXPECT_TRUE(bug.matches({OperatorFamily::kConvTranspose, 3}));
  EXPECT_FALSE(bug.matches({OperatorFamily::kConv, 3}));
  bug.family = "ConvTranspose2d";
  EXPECT_TRUE(bug.matches({OperatorFamily::kConvTranspose, 2}));
  EXPECT_FALSE(bug.matches({OperatorFamily::kConvTranspose, 3}));
  bug.family = "*";
  EXPECT_TRUE(bug.matches({OperatorFamily::kMatMul, 0}));

  BugManifest guarded;
  guarded.bugs.push_back({"*", BugPattern::kTrunc32ElementCount, i128{1} << 40, ""});
  EXPECT_EQ(execute(large_stride_case(), guarded).kind, VerdictKind::kPass);
}

// Non-Pass iff the count reaches 2^31, checked against plain 128-bit
// arithmetic over counts straddling 2^31, 2^32 and 2^33.
TEST(SyntheticPropertyTest, TruncationTriggerCompleteness) {
  std::vector<i128> counts;
  for (i128 base : {i128{1}, kTwo31, kTwo32, kTwo31 + kTwo32, kTwo32 * 2}) {
    for (i128 off = -600; off <= 600; off += 7) {
      if (base + off >= 1) counts.push_back(base + off);
    }
  }
  for (int64_t c : {1, 255, 256, 257, 1000, 65536}) counts.push_back(c);
  for (const i128 c : counts) {
    const i128 low = c % kTwo32;
    const i128 host = low >= kTwo31 ? low - kTwo32 : low;
    const Verdict v = judge(launch_arithmetic(c, true, false, 256));
    EXPECT_EQ(v.kind != VerdictKind::kPass, c >= kTwo31) << to_string(c);
    EXPECT_EQ(v.kind != VerdictKind::kPass, host != c) << to_string(c);
    if (host <= 0) {
      EXPECT_EQ(v.kind, VerdictKind::kInvalidLaunchConfig) << to_string(c);
    } else if (host != c) {
      EXPECT_EQ(v.kind, VerdictKind::kOobWrite) << to_string(c);
    }
  }
}

TEST(SyntheticPropertyTest, EmptyManifestNeverFires) {
  for (const OperatorKind& k : all_operator_kinds()) {
    ModelConfig cfg;
    cfg.dim.hi = 4096;
    TestCaseGenerator gen(k, 5, cfg);
    for (int i = 0; i < 60; ++i) {
      const TestCase tc = *gen.next();
      EXPECT_EQ(execute(tc, BugManifest{}).kind, VerdictKind::kPass) << k.name();
    }
  }
}

TEST(SyntheticPropertyTest, DiagnosticsAndDeterminism) {
  const BugManifest m = BugManifest::default_manifest();
  for (const OperatorKind& k : all_operator_kinds()) {
    TestCaseGenerator gen(k, 12);
    for (int i = 0; i < 30; ++i) {
      const TestCase tc = *gen.next();
      const Verdict v = execute(tc, m);
      EXPECT_EQ(v, execute(tc, m));
      // Recompute the product and covering slack independently.
      i128 total = 1;
      for (int64_t d : array_param(tc.params, "out_dims")) total *= d;
      EXPECT_EQ(v.diag.true_count, total) << k.name();
      EXPECT_EQ(v.diag.block, kDefaultBlock);
      EXPECT_EQ(v.diag.slack(), v.diag.grid * kDefaultBlock - total);
      if (v.kind == VerdictKind::kPass) {
        EXPECT_EQ(v.diag.host_count, total);
        EXPECT_GE(v.diag.slack(), 0);
        EXPECT_LT(v.diag.slack(), kDefaultBlock);
      }
    }
  }
}

TEST(SyntheticPropertyTest, FloorGridOnLargePads) {
  const BugManifest m = BugManifest::default_manifest();
  int fired = 0;
  int quiet = 0;
  TestCaseGenerator gen({OperatorFamily::kReplicationPad, 3}, 2);
  for (int i = 0; i < 300; ++i) {
    const TestCase tc = *gen.next();
    const i128 total = true_element_count(tc);
    const Verdict v = execute(tc, m);
    const bool expect_oob = total >= (i128{1} << 24) && total % kDefaultBlock != 0;
    EXPECT_EQ(v.kind == VerdictKind::kOobWrite, expect_oob);
    if (expect_oob) {
      EXPECT_EQ(v.pattern, BugPattern::kFloorGrid);
      ++fired;
    } else {
      EXPECT_EQ(v.kind, VerdictKind::kPass);
      ++quiet;
    }
  }
  EXPECT_GT(fired, 0);
  EXPECT_GT(quiet, 0);
}

// --- manifest file -------------------------------------------------------

TEST(ManifestTest, RoundTrip) {
  const BugManifest m = BugManifest::default_manifest();
  ASSERT_EQ(m.bugs.size(), 2u);
  EXPECT_EQ(parse_manifest(manifest_to_json(m)), m);
  BugManifest big;
  big.bugs.push_back({"Conv", BugPattern::kFloorGrid, i128{1} << 100, "huge guard"});
  EXPECT_EQ(parse_manifest(manifest_to_json(big)), big);
  EXPECT_TRUE(parse_manifest("[]").bugs.empty());
}

TEST(ManifestTest, Errors) {
  EXPECT_THROW(parse_manifest("{}"), ParseError);
  EXPECT_THROW(parse_manifest("[{\"family\": \"Conv\", \"pattern\": \"Nope\"}]"), ParseError);
  EXPECT_THROW(parse_manifest("[{\"family\": \"Conv9d\", \"pattern\": \"FloorGrid\"}]"),
               ParseError);
  EXPECT_THROW(
      parse_manifest("[{\"family\": \"*\", \"pattern\": \"FloorGrid\", \"extra\": 1}]"),
      ParseError);
  test::TempDir dir;
  EXPECT_THROW(load_manifest(dir.path() / "missing.json"), IoError);
}

}  // namespace
}  // namespace opfuzz
