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

#include "opfuzz/corpus.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "opfuzz/error.hpp"

namespace opfuzz {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& text) {
  static std::atomic<uint64_t> counter{0};
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path().string() + ": " + ec.message());
  }
  std::ostringstream suffix;
  suffix << ".tmp." << ::getpid() << "." << std::hash<std::thread::id>{}(std::this_thread::get_id())
         << "." << counter++;
  fs::path tmp = path;
  tmp += suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp.string() + ": cannot open for writing");
    out << text;
    out.flush();
    if (!out) throw IoError(tmp.string() + ": write failed");
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError(path.string() + ": rename failed");
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path.string() + ": read failed");
  return ss.str();
}

fs::path corpus_write(const fs::path& dir, const TestCase& tc) {
  const fs::path path = dir / "testcases" / (tc.id + ".json");
  write_file_atomic(path, to_json(tc));
  return path;
}

CorpusScan corpus_scan(const fs::path& dir) {
  CorpusScan scan;
  const fs::path root = dir / "testcases";
  std::error_code ec;
  if (!fs::exists(root, ec)) return scan;
  std::vector<fs::path> files;
  for (fs::directory_iterator it(root, ec), end; it != end; it.increment(ec)) {
    if (ec) break;
    if (it->is_regular_file() && it->path().extension() == ".json") files.push_back(it->path());
  }
  if (ec) throw IoError(root.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      scan.cases.push_back(from_json(read_file(f)));
    } catch (const Error& e) {
      scan.corrupt.push_back({f, e.what()});
    }
  }
  std::sort(scan.cases.begin(), scan.cases.end(),
            [](const TestCase& a, const TestCase& b) { return a.id < b.id; });
  return scan;
}

}  // namespace opfuzz
