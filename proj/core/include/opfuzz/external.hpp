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

#ifndef OPFUZZ_EXTERNAL_HPP_
#define OPFUZZ_EXTERNAL_HPP_

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "opfuzz/materialize.hpp"
#include "opfuzz/verdict.hpp"

namespace opfuzz {

// An external executor invoked once per test case through a shell command
// template. Placeholders: {script}, {framework}, {verdict}. The command must
// print one status line on stdout: OK, EXCEPTION:<type>, SANITIZER:<kind>
// or OOM. When it writes verdict JSON to {verdict}, that takes precedence.
struct ExternalTarget {
  std::string command_template;
  Framework framework = Framework::kPyTorch;
  std::chrono::milliseconds timeout{120'000};
  std::filesystem::path work_dir;  // materialized scripts and verdict files
};

// Throws ConfigError when the template is empty or its program is neither an
// executable path nor found on PATH.
void check_command_available(std::string_view command_template);

std::string expand_template(std::string_view tmpl, const std::string& script,
                            const std::string& framework, const std::string& verdict);

struct ProcessResult {
  std::string out;
  std::string err;
  int exit_code = -1;   // valid when !signaled
  int term_signal = 0;  // nonzero when killed by a signal
  bool timed_out = false;
};

// Runs `command` with /bin/sh -c in its own process group, capturing both
// streams; the group is killed on timeout. Throws IoError when spawning fails.
ProcessResult run_process(const std::string& command, std::chrono::milliseconds timeout);

// Verdict from the status-line protocol alone.
Verdict verdict_from_status(const ProcessResult& r);

struct ExternalRun {
  std::optional<Verdict> verdict;         // nullopt when unsupported on target
  std::string unsupported_reason;
  std::string log;                        // command, exit status, both streams
};

ExternalRun run_external(const ExternalTarget& target, const TestCase& tc);

}  // namespace opfuzz

#endif  // OPFUZZ_EXTERNAL_HPP_
