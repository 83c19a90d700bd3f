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

#ifndef OPFUZZ_CORPUS_HPP_
#define OPFUZZ_CORPUS_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "opfuzz/testcase.hpp"

namespace opfuzz {

// Writes `text` to `path` through a uniquely named sibling temp file and an
// atomic rename. Throws IoError with the path.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);
// Throws IoError with the path.
std::string read_file(const std::filesystem::path& path);

// {dir}/testcases/{id}.json. Returns the path written.
std::filesystem::path corpus_write(const std::filesystem::path& dir, const TestCase& tc);

struct CorruptFile {
  std::filesystem::path path;
  std::string error;
};

struct CorpusScan {
  std::vector<TestCase> cases;  // sorted by id
  std::vector<CorruptFile> corrupt;
};

// Reads every *.json under {dir}/testcases. Unparseable files are reported,
// not dropped silently. A missing directory scans as empty.
CorpusScan corpus_scan(const std::filesystem::path& dir);

}  // namespace opfuzz

#endif  // OPFUZZ_CORPUS_HPP_
