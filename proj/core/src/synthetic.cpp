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

#include "opfuzz/synthetic.hpp"

#include "json.hpp"
#include "opfuzz/corpus.hpp"
#include "opfuzz/error.hpp"

namespace opfuzz {

using json = nlohmann::json;

namespace {

constexpr i128 kSaturate = static_cast<i128>(1) << 120;

i128 ceil_div(i128 a, i128 b) { return (a + b - 1) / b; }

}  // namespace

bool InjectedBug::matches(OperatorKind kind) const {
  return family == "*" || family == to_string(kind.family) || family == kind.name();
}

BugManifest BugManifest::default_manifest() {
  BugManifest m;
  m.bugs.push_back({"ConvTranspose", BugPattern::kTrunc32ElementCount, 0,
                    "element count cast to int32 before the grid computation"});
  m.bugs.push_back({"ReplicationPad", BugPattern::kFloorGrid, static_cast<i128>(1) << 24,
                    "grid rounded down on large outputs"});
  return m;
}

BugManifest parse_manifest(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed manifest JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("", "manifest must be a JSON list");
  BugManifest m;
  for (size_t i = 0; i < doc.size(); ++i) {
    const json& e = doc[i];
    const std::string at = "[" + std::to_string(i) + "].";
    if (!e.is_object()) throw ParseError("[" + std::to_string(i) + "]", "expected an object");
    for (const auto& [key, value] : e.items()) {
      if (key != "family" && key != "pattern" && key != "guard_min_true_count" && key != "note") {
        throw ParseError(at + key, "unknown field");
      }
    }
    InjectedBug bug;
    if (!e.contains("family") || !e["family"].is_string()) {
      throw ParseError(at + "family", "expected a string");
    }
    bug.family = e["family"].get<std::string>();
    if (bug.family != "*" && !parse_family(bug.family) && !parse_operator(bug.family)) {
      throw ParseError(at + "family", "unknown operator '" + bug.family + "'");
    }
    if (!e.contains("pattern") || !e["pattern"].is_string()) {
      throw ParseError(at + "pattern", "expected a string");
    }
    const auto p = parse_bug_pattern(e["pattern"].get<std::string>());
    if (!p) throw ParseError(at + "pattern", "unknown pattern");
    bug.pattern = *p;
    if (auto it = e.find("guard_min_true_count"); it != e.end()) {
      if (it->is_number_integer()) {
        bug.guard_min_true_count = it->get<int64_t>();
      } else if (it->is_string()) {
        auto v = parse_i128(it->get<std::string>());
        if (!v) throw ParseError(at + "guard_min_true_count", "malformed integer");
        bug.guard_min_true_count = *v;
      } else {
        throw ParseError(at + "guard_min_true_count", "expected an integer");
      }
    }
    if (auto it = e.find("note"); it != e.end()) {
      if (!it->is_string()) throw ParseError(at + "note", "expected a string");
      bug.note = it->get<std::string>();
    }
    m.bugs.push_back(std::move(bug));
  }
  return m;
}

std::string manifest_to_json(const BugManifest& m) {
  json doc = json::array();
  for (const auto& b : m.bugs) {
    json e = {{"family", b.family}, {"pattern", to_string(b.pattern)}, {"note", b.note}};
    if (b.guard_min_true_count <= INT64_MAX && b.guard_min_true_count >= INT64_MIN) {
      e["guard_min_true_count"] = static_cast<int64_t>(b.guard_min_true_count);
    } else {
      e["guard_min_true_count"] = to_string(b.guard_min_true_count);
    }
    doc.push_back(std::move(e));
  }
  return doc.dump(2) + "\n";
}

BugManifest load_manifest(const std::filesystem::path& path) {
  try {
    return parse_manifest(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(e.field(), path.string() + ": " + e.what());
  }
}

i128 truncate_to_int32(i128 v) {
  const uint32_t low = static_cast<uint32_t>(static_cast<unsigned __int128>(v) & 0xffffffffU);
  return static_cast<int32_t>(low);
}

Diagnostics launch_arithmetic(i128 true_count, bool truncate, bool floor_grid, int64_t block) {
  if (block < 1) throw ConfigError("block size must be >= 1");
  Diagnostics d;
  d.true_count = true_count;
  d.block = block;
  d.host_count = truncate ? truncate_to_int32(true_count) : true_count;
  if (d.host_count > 0) d.grid = floor_grid ? d.host_count / block : ceil_div(d.host_count, block);
  return d;
}

Verdict judge(const Diagnostics& d) {
  Verdict v;
  v.diag = d;
  if (d.host_count <= 0 || d.grid <= 0) {
    v.kind = VerdictKind::kInvalidLaunchConfig;
  } else if (d.capacity() < d.true_count) {
    v.kind = VerdictKind::kOobWrite;
    v.oob = OobKind::kUndersizedGrid;
  }
  return v;
}

i128 true_element_count(const TestCase& tc) {
  const ShapeOutcome shape = output_shape(tc.kind, tc.params);
  const auto* ok = std::get_if<ShapeResult>(&shape);
  if (ok == nullptr) return 0;
  i128 n = 1;
  for (int64_t d : ok->dims) {
    if (n > kSaturate / (d > 0 ? d : 1)) return kSaturate;
    n *= d;
  }
  return n;
}

LaunchConfig launch_config(const TestCase& tc, const BugManifest& manifest, int64_t block) {
  const i128 total = true_element_count(tc);
  LaunchConfig lc;
  bool truncate = false;
  bool floor_grid = false;
  for (const auto& bug : manifest.bugs) {
    if (!bug.matches(tc.kind) || total < bug.guard_min_true_count) continue;
    if (bug.pattern == BugPattern::kTrunc32ElementCount && !truncate) {
      truncate = true;
      lc.applied.push_back(bug.pattern);
    } else if (bug.pattern == BugPattern::kFloorGrid && !floor_grid) {
      floor_grid = true;
      lc.applied.push_back(bug.pattern);
    }
  }
  lc.diag = launch_arithmetic(total, truncate, floor_grid, block);
  return lc;
}

Verdict execute(const TestCase& tc, const BugManifest& manifest, int64_t block) {
  const auto violations = validate(tc);
  if (!violations.empty()) {
    Verdict v;
    v.kind = VerdictKind::kPreconditionReject;
    v.detail = violations.front().rule;
    v.diag.block = block;
    return v;
  }
  const LaunchConfig lc = launch_config(tc, manifest, block);
  Verdict v = judge(lc.diag);
  if (v.kind != VerdictKind::kPass && !lc.applied.empty()) {
    // Attribute to the pattern that broke the arithmetic: truncation when the
    // host count differs, otherwise the grid rounding.
    const bool truncated = lc.diag.host_count != lc.diag.true_count;
    for (BugPattern p : lc.applied) {
      if ((p == BugPattern::kTrunc32ElementCount) == truncated) v.pattern = p;
    }
    if (!v.pattern) v.pattern = lc.applied.front();
  }
  return v;
}

}  // namespace opfuzz
