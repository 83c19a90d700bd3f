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

#ifndef OPFUZZ_CAMPAIGN_HPP_
#define OPFUZZ_CAMPAIGN_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opfuzz/explorer.hpp"
#include "opfuzz/external.hpp"
#include "opfuzz/operators.hpp"
#include "opfuzz/synthetic.hpp"
#include "opfuzz/testcase.hpp"
#include "opfuzz/verdict.hpp"

namespace opfuzz {

enum class TargetKind {
  kNone,       // generation only
  kSynthetic,
  kExternal,
};

struct CampaignConfig {
  std::vector<OperatorKind> ops;
  uint64_t seed = 1;
  std::optional<uint64_t> count;                   // total test cases
  std::optional<std::chrono::milliseconds> duration;
  TargetKind target = TargetKind::kSynthetic;
  BugManifest manifest = BugManifest::default_manifest();
  int64_t block = kDefaultBlock;
  std::string external_command;
  Framework framework = Framework::kPyTorch;
  std::chrono::milliseconds external_timeout{120'000};
  ModelConfig model;
  ExplorePolicy policy;
  DType dtype = DType::kF32;
  std::filesystem::path out = "opfuzz-out";
  unsigned workers = 1;
  // Write every generated test case to {out}/testcases.
  bool archive_corpus = true;

  // Throws ConfigError.
  void check() const;
};

// Seed of one operator's explorer stream.
uint64_t stream_seed(uint64_t campaign_seed, OperatorKind kind);

struct Finding {
  std::string signature;
  std::string testcase_id;
  Verdict verdict;
  BugClass bug_class = BugClass::kNone;
  std::string first_seen;  // UTC, ISO 8601
  uint64_t count = 0;
};

std::string finding_to_json(const Finding& f);
// Throws ParseError.
Finding finding_from_json(std::string_view text);

// {dir}/findings/{signature}/{testcase.json, verdict.json, log.txt}. A repeat
// occurrence only bumps the count in verdict.json. Returns the finding
// directory. Not thread-safe: one archiver per directory. With
// write_verdict=false the count is bumped in memory only and the caller must
// flush it later with write_verdict().
std::filesystem::path archive_finding(const std::filesystem::path& dir, Finding& finding,
                                      const TestCase& tc, const std::string& raw_log,
                                      bool write_verdict = true);
void write_verdict(const std::filesystem::path& dir, const Finding& finding);

struct OperatorStats {
  uint64_t generated = 0;
  uint64_t executed = 0;
  uint64_t unsupported = 0;  // not expressible on the external framework
  bool exhausted = false;
  std::map<BugClass, uint64_t> histogram;
};

struct CampaignReport {
  uint64_t generated = 0;
  uint64_t executed = 0;
  uint64_t unsupported = 0;
  std::map<BugClass, uint64_t> histogram;
  std::vector<Finding> findings;  // sorted by signature
  double elapsed_seconds = 0;
  double throughput_per_minute = 0;  // generated test cases
  std::map<std::string, OperatorStats> per_operator;

  uint64_t bug_findings() const;
};

std::string report_to_json(const CampaignReport& r, const CampaignConfig& cfg);
std::string report_summary(const CampaignReport& r);

// Runs the configured campaign and writes {out}/report.json and
// {out}/summary.txt. Throws ConfigError before generating anything when the
// configuration (or the external command) is unusable.
CampaignReport run_campaign(const CampaignConfig& cfg);

// Re-executes one test case against the configured target, as a campaign
// would. `log` receives the raw execution log. nullopt when the test case is
// not expressible on the external framework.
std::optional<Verdict> execute_on_target(const CampaignConfig& cfg, const TestCase& tc,
                                         std::string* log = nullptr);

}  // namespace opfuzz

#endif  // OPFUZZ_CAMPAIGN_HPP_
