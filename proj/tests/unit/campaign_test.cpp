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

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "opfuzz/campaign.hpp"
#include "opfuzz/corpus.hpp"
#include "opfuzz/error.hpp"
#include "opfuzz/external.hpp"
#include "opfuzz/generator.hpp"
#include "opfuzz/verdict.hpp"
#include "test_util.hpp"

namespace opfuzz {
namespace {

namespace fs = std::filesystem;
using std::chrono::milliseconds;

const OperatorKind kConvT2{OperatorFamily::kConvTranspose, 2};
const OperatorKind kConv2{OperatorFamily::kConv, 2};

Verdict oob(BugPattern p) {
  Verdict v;
  v.kind = VerdictKind::kOobWrite;
  v.oob = OobKind::kUndersizedGrid;
  v.pattern = p;
  v.diag = launch_arithmetic(i128{1} << 33, true, false);
  return v;
}

Verdict sanitizer(SanitizerKind k, std::string frame) {
  Verdict v;
  v.kind = VerdictKind::kSanitizerError;
  v.sanitizer = k;
  v.frame = std::move(frame);
  return v;
}

// --- verdicts ------------------------------------------------------------

TEST(ClassifyTest, Table) {
  Verdict v;
  EXPECT_EQ(classify(v), BugClass::kNone);
  EXPECT_EQ(classify(oob(BugPattern::kTrunc32ElementCount)), BugClass::kSilentMemoryCorruption);
  v.kind = VerdictKind::kInvalidLaunchConfig;
  EXPECT_EQ(classify(v), BugClass::kGpuLevelException);
  v.kind = VerdictKind::kPreconditionReject;
  EXPECT_EQ(classify(v), BugClass::kCpuSideAssert);
  EXPECT_EQ(classify(sanitizer(SanitizerKind::kInvalidSharedRead, "k")),
            BugClass::kSilentMemoryCorruption);
  EXPECT_EQ(classify(sanitizer(SanitizerKind::kLaunchFailure, "k")),
            BugClass::kGpuLevelException);
  v.kind = VerdictKind::kApiException;
  EXPECT_EQ(classify(v), BugClass::kCpuSideAssert);
  v.kind = VerdictKind::kOutOfMemory;
  EXPECT_EQ(classify(v), BugClass::kOutOfMemory);
  EXPECT_FALSE(is_bug(classify(v)));
  v.kind = VerdictKind::kTimedOut;
  EXPECT_FALSE(is_bug(classify(v)));
  EXPECT_FALSE(is_bug(BugClass::kNone));
  EXPECT_TRUE(is_bug(BugClass::kCpuSideAssert));
}

TEST(VerdictNamesTest, RoundTrip) {
  for (int i = 0; i <= static_cast<int>(VerdictKind::kTimedOut); ++i) {
    const auto k = static_cast<VerdictKind>(i);
    EXPECT_EQ(parse_verdict_kind(to_string(k)), k);
  }
  for (int i = 0; i <= static_cast<int>(SanitizerKind::kApiError); ++i) {
    const auto k = static_cast<SanitizerKind>(i);
    EXPECT_EQ(parse_sanitizer_kind(to_string(k)), k);
  }
  for (int i = 0; i <= static_cast<int>(BugClass::kTimedOut); ++i) {
    const auto c = static_cast<BugClass>(i);
    EXPECT_EQ(parse_bug_class(to_string(c)), c);
  }
  EXPECT_FALSE(parse_verdict_kind("Fine"));
}

TEST(VerdictJsonTest, RoundTrip) {
  Verdict api;
  api.kind = VerdictKind::kApiException;
  api.detail = "RuntimeError";
  for (const Verdict& v : {oob(BugPattern::kFloorGrid), api,
                           sanitizer(SanitizerKind::kMisalignedWrite, "vol2col_kernel")}) {
    EXPECT_EQ(verdict_from_json(verdict_to_json(v)), v);
  }
  const std::string text = verdict_to_json(oob(BugPattern::kTrunc32ElementCount));
  EXPECT_NE(text.find("\"true_count\": \"8589934592\""), std::string::npos);
}

TEST(VerdictJsonTest, HarnessDocument) {
  const Verdict v = verdict_from_json(R"({"kind": "SanitizerError",
      "sanitizer_kind": "InvalidGlobalWrite", "frame": "col2im_kernel"})");
  EXPECT_EQ(v.sanitizer, SanitizerKind::kInvalidGlobalWrite);
  EXPECT_EQ(classify(v), BugClass::kSilentMemoryCorruption);
}

TEST(VerdictJsonTest, Errors) {
  EXPECT_THROW(verdict_from_json("{}"), ParseError);
  EXPECT_THROW(verdict_from_json(R"({"kind": "Weird"})"), ParseError);
  EXPECT_THROW(verdict_from_json(R"({"kind": "Pass", "extra": 1})"), ParseError);
  EXPECT_THROW(verdict_from_json(R"({"kind": "Pass", "bug_class": "GpuLevelException"})"),
               ParseError);
  EXPECT_THROW(verdict_from_json("nope"), ParseError);
}

TEST(SignatureTest, TupleDoesNotParticipate) {
  Verdict a = oob(BugPattern::kTrunc32ElementCount);
  Verdict b = a;
  b.diag = launch_arithmetic(i128{1} << 35, true, false);
  EXPECT_EQ(dedup_signature(kConvT2, a), dedup_signature(kConvT2, b));
  EXPECT_EQ(dedup_signature(kConvT2, a), "ConvTranspose2d__OobWrite__UndersizedGrid__Trunc32ElementCount");
}

TEST(SignatureTest, KindRankAndPatternParticipate) {
  Verdict a = oob(BugPattern::kTrunc32ElementCount);
  Verdict b = a;
  b.kind = VerdictKind::kInvalidLaunchConfig;
  b.oob.reset();
  EXPECT_NE(dedup_signature(kConvT2, a), dedup_signature(kConvT2, b));
  EXPECT_NE(dedup_signature(kConvT2, a), dedup_signature({OperatorFamily::kConvTranspose, 3}, a));
  EXPECT_NE(dedup_signature(kConvT2, a),
            dedup_signature(kConvT2, oob(BugPattern::kFloorGrid)));
}

TEST(SignatureTest, SanitizerKindAndFrame) {
  const auto a = sanitizer(SanitizerKind::kInvalidGlobalWrite, "at::native::col2im<float>");
  const auto b = sanitizer(SanitizerKind::kInvalidGlobalWrite, "at::native::col2im<float>");
  const auto c = sanitizer(SanitizerKind::kInvalidGlobalWrite, "other_kernel");
  EXPECT_EQ(dedup_signature(kConv2, a), dedup_signature(kConv2, b));
  EXPECT_NE(dedup_signature(kConv2, a), dedup_signature(kConv2, c));
  // Usable as a directory name.
  const std::string sig = dedup_signature(kConv2, a);
  EXPECT_EQ(sig.find('/'), std::string::npos);
  EXPECT_EQ(sig.find(':'), std::string::npos);
  EXPECT_EQ(sig.find('<'), std::string::npos);
}

// --- archive -------------------------------------------------------------

TEST(ArchiveTest, FirstThenRepeatOccurrence) {
  test::TempDir dir;
  TestCaseGenerator gen(kConvT2, 1);
  const TestCase first = *gen.next();
  const TestCase second = *gen.next();
  Finding f;
  f.signature = dedup_signature(kConvT2, oob(BugPattern::kTrunc32ElementCount));
  f.testcase_id = first.id;
  f.verdict = oob(BugPattern::kTrunc32ElementCount);
  f.bug_class = classify(f.verdict);

  const fs::path d = archive_finding(dir.path(), f, first, "log one\n");
  EXPECT_EQ(d, dir.path() / "findings" / f.signature);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(d)) files.push_back(e.path().filename());
  std::sort(files.begin(), files.end());
  EXPECT_EQ(files, (std::vector<std::string>{"log.txt", "testcase.json", "verdict.json"}));
  EXPECT_EQ(f.count, 1u);

  archive_finding(dir.path(), f, second, "log two\n");
  EXPECT_EQ(f.count, 2u);
  const Finding stored = finding_from_json(read_file(d / "verdict.json"));
  EXPECT_EQ(stored.count, 2u);
  EXPECT_EQ(stored.testcase_id, first.id);
  EXPECT_FALSE(stored.first_seen.empty());
  EXPECT_EQ(from_json(read_file(d / "testcase.json")), first);
  EXPECT_EQ(read_file(d / "log.txt"), "log one\n");

  Finding other = f;
  other.signature = "ConvTranspose2d__InvalidLaunchConfig__Trunc32ElementCount";
  other.count = 0;
  archive_finding(dir.path(), other, second, "");
  EXPECT_TRUE(fs::is_directory(dir.path() / "findings" / other.signature));
  EXPECT_TRUE(fs::is_directory(d));
}

TEST(ArchiveTest, ResumesCountFromDisk) {
  test::TempDir dir;
  TestCaseGenerator gen(kConvT2, 1);
  const TestCase tc = *gen.next();
  Finding f;
  f.signature = "Sig";
  f.testcase_id = tc.id;
  f.verdict = oob(BugPattern::kTrunc32ElementCount);
  f.bug_class = classify(f.verdict);
  archive_finding(dir.path(), f, tc, "");
  archive_finding(dir.path(), f, tc, "");
  Finding fresh = f;
  fresh.count = 0;
  archive_finding(dir.path(), fresh, tc, "");
  EXPECT_EQ(fresh.count, 3u);
}

// --- campaigns -----------------------------------------------------------

CampaignConfig base_config(const fs::path& out) {
  CampaignConfig cfg;
  cfg.out = out;
  cfg.count = 200;
  return cfg;
}

void expect_conservation(const CampaignReport& r) {
  uint64_t generated = 0;
  uint64_t executed = 0;
  for (const auto& [name, s] : r.per_operator) {
    generated += s.generated;
    executed += s.executed;
    uint64_t hist = 0;
    for (const auto& [cls, n] : s.histogram) hist += n;
    EXPECT_EQ(hist, s.executed) << name;
  }
  EXPECT_EQ(generated, r.generated);
  EXPECT_EQ(executed, r.executed);
  uint64_t hist = 0;
  for (const auto& [cls, n] : r.histogram) hist += n;
  EXPECT_EQ(hist, r.executed);
  EXPECT_LE(r.executed, r.generated);
}

TEST(CampaignConfigTest, Checks) {
  CampaignConfig cfg;
  EXPECT_THROW(cfg.check(), ConfigError);  // no operators
  cfg.ops = {kConv2};
  EXPECT_THROW(cfg.check(), ConfigError);  // no budget
  cfg.count = 0;
  EXPECT_THROW(cfg.check(), ConfigError);
  cfg.count = 10;
  EXPECT_NO_THROW(cfg.check());
  cfg.workers = 0;
  EXPECT_THROW(cfg.check(), ConfigError);
  cfg.workers = 1;
  cfg.target = TargetKind::kExternal;
  cfg.external_command = "definitely-not-a-real-program-xyz {script}";
  EXPECT_THROW(cfg.check(), ConfigError);
}

TEST(CampaignTest, BugFreeTargetHasNoFindings) {
  test::TempDir dir;
  CampaignConfig cfg = base_config(dir.path());
  cfg.ops = {kConv2};
  cfg.count = 1000;
  cfg.manifest = {};
  const CampaignReport r = run_campaign(cfg);
  EXPECT_EQ(r.generated, 1000u);
  EXPECT_EQ(r.executed, 1000u);
  EXPECT_TRUE(r.findings.empty());
  EXPECT_EQ(r.histogram.at(BugClass::kNone), 1000u);
  expect_conservation(r);
  EXPECT_TRUE(fs::exists(dir.path() / "report.json"));
  EXPECT_TRUE(fs::exists(dir.path() / "summary.txt"));
  EXPECT_EQ(corpus_scan(dir.path()).cases.size(), 1000u);
}

TEST(CampaignTest, QuotaIsSplitAcrossOperators) {
  test::TempDir dir;
  CampaignConfig cfg = base_config(dir.path());
  cfg.ops = {kConv2, {OperatorFamily::kMatMul, 0}, {OperatorFamily::kAvgPool, 1}};
  cfg.count = 100;
  cfg.archive_corpus = false;
  const CampaignReport r = run_campaign(cfg);
  EXPECT_EQ(r.generated, 100u);
  EXPECT_EQ(r.per_operator.at("Conv2d").generated, 34u);
  EXPECT_EQ(r.per_operator.at("MatMul").generated, 33u);
  EXPECT_EQ(r.per_operator.at("AvgPool1d").generated, 33u);
  EXPECT_FALSE(fs::exists(dir.path() / "testcases"));
  expect_conservation(r);
}

TEST(CampaignTest, ExhaustedStreamsStopEarly) {
  test::TempDir dir;
  CampaignConfig cfg = base_config(dir.path());
  cfg.ops = {{OperatorFamily::kMatMul, 0}};
  cfg.model.dim = {1, 2};
  cfg.model.batch = {1, 1};
  cfg.count = 500;
  const CampaignReport r = run_campaign(cfg);
  // (n, m, p) over {1, 2}^3 with m shared: exactly eight tuples.
  EXPECT_EQ(r.generated, 8u);
  EXPECT_TRUE(r.per_operator.at("MatMul").exhausted);
}

struct FindingKey {
  std::string signature;
  uint64_t count;
  std::string testcase_id;
  bool operator==(const FindingKey&) const = default;
};

std::vector<FindingKey> keys(const CampaignReport& r) {
  std::vector<FindingKey> out;
  for (const Finding& f : r.findings) out.push_back({f.signature, f.count, f.testcase_id});
  return out;
}

TEST(CampaignTest, SingleWorkerRunsReproduce) {
  test::TempDir a;
  test::TempDir b;
  CampaignConfig cfg = base_config(a.path());
  cfg.ops = {kConvT2, {OperatorFamily::kReplicationPad, 3}};
  cfg.count = 400;
  cfg.archive_corpus = false;
  const CampaignReport ra = run_campaign(cfg);
  cfg.out = b.path();
  const CampaignReport rb = run_campaign(cfg);
  ASSERT_FALSE(ra.findings.empty());
  EXPECT_EQ(keys(ra), keys(rb));
  expect_conservation(ra);
}

TEST(CampaignTest, WorkersShardOperatorsDeterministically) {
  test::TempDir a;
  test::TempDir b;
  CampaignConfig cfg = base_config(a.path());
  cfg.ops = {kConvT2, {OperatorFamily::kConvTranspose, 3}, {OperatorFamily::kReplicationPad, 3},
             kConv2};
  cfg.count = 400;
  cfg.archive_corpus = false;
  const CampaignReport serial = run_campaign(cfg);
  cfg.out = b.path();
  cfg.workers = 4;
  const CampaignReport parallel = run_campaign(cfg);
  EXPECT_EQ(keys(serial), keys(parallel));
  expect_conservation(parallel);
}

TEST(CampaignTest, EveryFindingReplays) {
  test::TempDir dir;
  CampaignConfig cfg = base_config(dir.path());
  cfg.ops = {kConvT2, {OperatorFamily::kReplicationPad, 3}};
  cfg.count = 300;
  const CampaignReport r = run_campaign(cfg);
  ASSERT_FALSE(r.findings.empty());
  for (const Finding& f : r.findings) {
    const fs::path d = dir.path() / "findings" / f.signature;
    const TestCase tc = from_json(read_file(d / "testcase.json"));
    EXPECT_EQ(tc.id, f.testcase_id);
    const auto v = execute_on_target(cfg, tc);
    ASSERT_TRUE(v);
    EXPECT_EQ(dedup_signature(tc.kind, *v), f.signature);
    EXPECT_EQ(*v, f.verdict);
    EXPECT_EQ(finding_from_json(read_file(d / "verdict.json")).count, f.count);
  }
}

TEST(CampaignTest, DurationBudgetGenerationOnly) {
  test::TempDir dir;
  CampaignConfig cfg = base_config(dir.path());
  cfg.ops = {kConv2};
  cfg.count.reset();
  cfg.duration = milliseconds(300);
  cfg.target = TargetKind::kNone;
  cfg.archive_corpus = false;
  const auto start = std::chrono::steady_clock::now();
  const CampaignReport r = run_campaign(cfg);
  const auto took = std::chrono::steady_clock::now() - start;
  EXPECT_GT(r.generated, 5u);  // 1000/min floor, scaled to 0.3 s
  EXPECT_EQ(r.executed, 0u);
  EXPECT_LT(took, std::chrono::seconds(5));
}

TEST(CampaignTest, ReportJson) {
  test::TempDir dir;
  CampaignConfig cfg = base_config(dir.path());
  cfg.ops = {kConvT2};
  cfg.count = 50;
  const CampaignReport r = run_campaign(cfg);
  const std::string text = read_file(dir.path() / "report.json");
  EXPECT_EQ(text, report_to_json(r, cfg));
  EXPECT_NE(text.find("\"generated\": 50"), std::string::npos);
  EXPECT_NE(text.find("\"throughput_per_minute\""), std::string::npos);
  EXPECT_NE(report_summary(r).find("ConvTranspose2d"), std::string::npos);
}

// --- external target -----------------------------------------------------

TEST(ExternalTest, RunProcessCapturesStreams) {
  const ProcessResult r = run_process("echo out; echo err 1>&2; exit 7", milliseconds(5000));
  EXPECT_EQ(r.out, "out\n");
  EXPECT_EQ(r.err, "err\n");
  EXPECT_EQ(r.exit_code, 7);
  EXPECT_FALSE(r.timed_out);
}

TEST(ExternalTest, TimeoutKillsTheProcessGroup) {
  const auto start = std::chrono::steady_clock::now();
  const ProcessResult r = run_process("sleep 30 & sleep 30; echo late", milliseconds(200));
  EXPECT_TRUE(r.timed_out);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
  EXPECT_EQ(verdict_from_status(r).kind, VerdictKind::kTimedOut);
}

TEST(ExternalTest, TemplateQuoting) {
  const std::string cmd = expand_template("printf '%s|%s|%s' {script} {framework} {verdict}",
                                          "a b'c", "pytorch", "$HOME");
  const ProcessResult r = run_process(cmd, milliseconds(5000));
  EXPECT_EQ(r.out, "a b'c|pytorch|$HOME");
}

TEST(ExternalTest, StatusLines) {
  auto status = [](const std::string& cmd) {
    return verdict_from_status(run_process(cmd, milliseconds(5000)));
  };
  EXPECT_EQ(status("echo noise; echo OK").kind, VerdictKind::kPass);
  const Verdict exc = status("echo EXCEPTION:ValueError; exit 1");
  EXPECT_EQ(exc.kind, VerdictKind::kApiException);
  EXPECT_EQ(exc.detail, "ValueError");
  const Verdict san = status("echo SANITIZER:InvalidGlobalWrite; exit 1");
  EXPECT_EQ(san.kind, VerdictKind::kSanitizerError);
  EXPECT_EQ(san.sanitizer, SanitizerKind::kInvalidGlobalWrite);
  EXPECT_EQ(status("echo OOM; exit 1").kind, VerdictKind::kOutOfMemory);
  EXPECT_EQ(status("echo EXCEPTION:OutOfMemoryError; exit 1").kind, VerdictKind::kOutOfMemory);
  EXPECT_EQ(status("kill -9 $$").kind, VerdictKind::kHostCrash);
  EXPECT_EQ(status("exit 3").kind, VerdictKind::kHostCrash);
  // OK with a failing exit status is not a pass.
  EXPECT_EQ(status("echo OK; exit 1").kind, VerdictKind::kHostCrash);
}

TEST(ExternalTest, MissingCommandIsConfigError) {
  EXPECT_THROW(check_command_available(""), ConfigError);
  EXPECT_THROW(check_command_available("no-such-harness-abc {script}"), ConfigError);
  EXPECT_THROW(check_command_available("/nonexistent/harness {script}"), ConfigError);
  EXPECT_NO_THROW(check_command_available("sh -c true"));
  test::TempDir dir;
  CampaignConfig cfg = base_config(dir.path());
  cfg.ops = {kConv2};
  cfg.target = TargetKind::kExternal;
  cfg.external_command = "no-such-harness-abc {script}";
  EXPECT_THROW(run_campaign(cfg), ConfigError);
  EXPECT_FALSE(fs::exists(dir.path() / "report.json"));
}

TEST(ExternalTest, ScriptIsMaterializedAndVerdictFileWins) {
  test::TempDir dir;
  const fs::path fixture = dir.path() / "fixture.json";
  std::ofstream(fixture) << R"({"kind": "SanitizerError", "sanitizer_kind": "InvalidGlobalWrite",
                               "frame": "col2im_kernel"})";
  ExternalTarget t;
  t.work_dir = dir.path() / "scripts";
  t.timeout = milliseconds(5000);
  t.command_template = "grep -q 'torch.nn.Conv2d' {script} && cp '" + fixture.string() +
                       "' {verdict}; echo OK";
  TestCaseGenerator gen(kConv2, 3);
  const TestCase tc = *gen.next();
  const ExternalRun run = run_external(t, tc);
  ASSERT_TRUE(run.verdict);
  EXPECT_EQ(run.verdict->kind, VerdictKind::kSanitizerError);
  EXPECT_EQ(run.verdict->frame, "col2im_kernel");
  EXPECT_TRUE(fs::exists(t.work_dir / script_filename(tc, Framework::kPyTorch)));
  EXPECT_NE(run.log.find("--- stdout ---"), std::string::npos);
}

TEST(ExternalTest, UnsupportedOnTargetIsCountedNotExecuted) {
  test::TempDir dir;
  CampaignConfig cfg = base_config(dir.path());
  cfg.ops = {{OperatorFamily::kLPPool, 2}};
  cfg.count = 5;
  cfg.target = TargetKind::kExternal;
  cfg.framework = Framework::kTensorFlow;
  cfg.external_command = "echo OK # {script}";
  const CampaignReport r = run_campaign(cfg);
  EXPECT_EQ(r.generated, 5u);
  EXPECT_EQ(r.unsupported, 5u);
  EXPECT_EQ(r.executed, 0u);
}

TEST(ExternalTest, CampaignThroughFakeHarness) {
  test::TempDir dir;
  CampaignConfig cfg = base_config(dir.path());
  cfg.ops = {kConv2};
  cfg.count = 6;
  cfg.target = TargetKind::kExternal;
  cfg.external_command = "echo EXCEPTION:RuntimeError; exit 1 # {script} {framework}";
  cfg.external_timeout = milliseconds(5000);
  const CampaignReport r = run_campaign(cfg);
  EXPECT_EQ(r.executed, 6u);
  ASSERT_EQ(r.findings.size(), 1u);
  EXPECT_EQ(r.findings[0].signature, "Conv2d__ApiException__RuntimeError");
  EXPECT_EQ(r.findings[0].count, 6u);
  EXPECT_EQ(r.histogram.at(BugClass::kCpuSideAssert), 6u);
}

TEST(ExternalTest, TimeoutsAreABucketNotABug) {
  test::TempDir dir;
  CampaignConfig cfg = base_config(dir.path());
  cfg.ops = {kConv2};
  cfg.count = 2;
  cfg.target = TargetKind::kExternal;
  cfg.external_command = "sleep 10 # {script}";
  cfg.external_timeout = milliseconds(150);
  const CampaignReport r = run_campaign(cfg);
  EXPECT_EQ(r.histogram.at(BugClass::kTimedOut), 2u);
  EXPECT_EQ(r.bug_findings(), 0u);
}

}  // namespace
}  // namespace opfuzz
