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

#include "opfuzz/verdict.hpp"

#include <array>
#include <set>

#include "json.hpp"
#include "opfuzz/error.hpp"

namespace opfuzz {

using json = nlohmann::json;

namespace {

constexpr std::array<std::string_view, 9> kKinds = {
    "Pass",         "OobWrite",  "InvalidLaunchConfig", "PreconditionReject", "SanitizerError",
    "ApiException", "HostCrash", "OutOfMemory",         "TimedOut"};
constexpr std::array<std::string_view, 2> kOob = {"UndersizedGrid", "NegativeCount"};
constexpr std::array<std::string_view, 2> kPatterns = {"Trunc32ElementCount", "FloorGrid"};
constexpr std::array<std::string_view, 6> kSanitizer = {
    "InvalidGlobalWrite", "InvalidGlobalRead", "InvalidSharedRead",
    "MisalignedWrite",    "LaunchFailure",     "ApiError"};
constexpr std::array<std::string_view, 6> kClasses = {
    "None", "SilentMemoryCorruption", "GpuLevelException", "CpuSideAssert", "OutOfMemory",
    "TimedOut"};

template <typename E, size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  for (size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  return std::nullopt;
}

std::string sanitize(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-' || c == '.';
    out += ok ? c : '-';
  }
  if (out.size() > 64) out.resize(64);
  return out;
}

std::string str_field(const json& doc, const char* name, bool required) {
  auto it = doc.find(name);
  if (it == doc.end() || it->is_null()) {
    if (required) throw ParseError(name, "missing");
    return {};
  }
  if (!it->is_string()) throw ParseError(name, "expected a string");
  return it->get<std::string>();
}

i128 count_field(const json& diag, const char* name) {
  auto it = diag.find(name);
  if (it == diag.end()) return 0;
  const std::string field = std::string("diagnostics.") + name;
  if (it->is_number_integer()) return it->get<int64_t>();
  if (!it->is_string()) throw ParseError(field, "expected a decimal string");
  auto v = parse_i128(it->get<std::string>());
  if (!v) throw ParseError(field, "malformed integer");
  return *v;
}

}  // namespace

std::string_view to_string(VerdictKind k) { return kKinds[static_cast<size_t>(k)]; }
std::string_view to_string(OobKind k) { return kOob[static_cast<size_t>(k)]; }
std::string_view to_string(BugPattern p) { return kPatterns[static_cast<size_t>(p)]; }
std::string_view to_string(SanitizerKind k) { return kSanitizer[static_cast<size_t>(k)]; }
std::string_view to_string(BugClass c) { return kClasses[static_cast<size_t>(c)]; }

std::optional<VerdictKind> parse_verdict_kind(std::string_view s) {
  return lookup<VerdictKind>(kKinds, s);
}
std::optional<OobKind> parse_oob_kind(std::string_view s) { return lookup<OobKind>(kOob, s); }
std::optional<BugPattern> parse_bug_pattern(std::string_view s) {
  return lookup<BugPattern>(kPatterns, s);
}
std::optional<SanitizerKind> parse_sanitizer_kind(std::string_view s) {
  return lookup<SanitizerKind>(kSanitizer, s);
}
std::optional<BugClass> parse_bug_class(std::string_view s) {
  return lookup<BugClass>(kClasses, s);
}

bool is_bug(BugClass c) {
  return c == BugClass::kSilentMemoryCorruption || c == BugClass::kGpuLevelException ||
         c == BugClass::kCpuSideAssert;
}

BugClass classify(const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::kPass: return BugClass::kNone;
    case VerdictKind::kOobWrite: return BugClass::kSilentMemoryCorruption;
    case VerdictKind::kInvalidLaunchConfig: return BugClass::kGpuLevelException;
    case VerdictKind::kPreconditionReject: return BugClass::kCpuSideAssert;
    case VerdictKind::kSanitizerError:
      switch (v.sanitizer.value_or(SanitizerKind::kApiError)) {
        case SanitizerKind::kInvalidGlobalWrite:
        case SanitizerKind::kInvalidGlobalRead:
        case SanitizerKind::kInvalidSharedRead:
        case SanitizerKind::kMisalignedWrite: return BugClass::kSilentMemoryCorruption;
        case SanitizerKind::kLaunchFailure:
        case SanitizerKind::kApiError: return BugClass::kGpuLevelException;
      }
      return BugClass::kGpuLevelException;
    case VerdictKind::kApiException:
    case VerdictKind::kHostCrash: return BugClass::kCpuSideAssert;
    case VerdictKind::kOutOfMemory: return BugClass::kOutOfMemory;
    case VerdictKind::kTimedOut: return BugClass::kTimedOut;
  }
  return BugClass::kNone;
}

std::string dedup_signature(OperatorKind kind, const Verdict& v) {
  std::string sig = kind.name() + "__" + std::string(to_string(v.kind));
  if (v.oob) sig += "__" + std::string(to_string(*v.oob));
  if (v.pattern) sig += "__" + std::string(to_string(*v.pattern));
  if (v.sanitizer) sig += "__" + std::string(to_string(*v.sanitizer));
  if (!v.frame.empty()) sig += "__" + sanitize(v.frame);
  if (v.kind == VerdictKind::kApiException && !v.detail.empty()) sig += "__" + sanitize(v.detail);
  return sig;
}

std::string verdict_to_json(const Verdict& v) {
  json doc = json::object();
  doc["kind"] = to_string(v.kind);
  doc["bug_class"] = to_string(classify(v));
  if (v.oob) doc["oob_kind"] = to_string(*v.oob);
  if (v.pattern) doc["pattern"] = to_string(*v.pattern);
  if (v.sanitizer) doc["sanitizer_kind"] = to_string(*v.sanitizer);
  if (!v.frame.empty()) doc["frame"] = v.frame;
  if (!v.detail.empty()) doc["detail"] = v.detail;
  if (v.diag.block != 0) {
    doc["diagnostics"] = {{"true_count", to_string(v.diag.true_count)},
                          {"host_count", to_string(v.diag.host_count)},
                          {"block", v.diag.block},
                          {"grid", to_string(v.diag.grid)},
                          {"capacity", to_string(v.diag.capacity())},
                          {"slack", to_string(v.diag.slack())}};
  }
  return doc.dump(2) + "\n";
}

Verdict verdict_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("", "expected a JSON object");
  static const std::set<std::string> kFields = {"kind",   "bug_class", "oob_kind",
                                                "pattern", "sanitizer_kind", "frame",
                                                "detail", "diagnostics"};
  for (const auto& [key, value] : doc.items()) {
    if (kFields.count(key) == 0) throw ParseError(key, "unknown field");
  }
  Verdict v;
  const std::string kind = str_field(doc, "kind", true);
  const auto k = parse_verdict_kind(kind);
  if (!k) throw ParseError("kind", "unknown verdict kind '" + kind + "'");
  v.kind = *k;
  if (auto s = str_field(doc, "oob_kind", false); !s.empty()) {
    v.oob = parse_oob_kind(s);
    if (!v.oob) throw ParseError("oob_kind", "unknown value '" + s + "'");
  }
  if (auto s = str_field(doc, "pattern", false); !s.empty()) {
    v.pattern = parse_bug_pattern(s);
    if (!v.pattern) throw ParseError("pattern", "unknown value '" + s + "'");
  }
  if (auto s = str_field(doc, "sanitizer_kind", false); !s.empty()) {
    v.sanitizer = parse_sanitizer_kind(s);
    if (!v.sanitizer) throw ParseError("sanitizer_kind", "unknown value '" + s + "'");
  }
  v.frame = str_field(doc, "frame", false);
  v.detail = str_field(doc, "detail", false);
  if (auto it = doc.find("diagnostics"); it != doc.end()) {
    if (!it->is_object()) throw ParseError("diagnostics", "expected an object");
    v.diag.true_count = count_field(*it, "true_count");
    v.diag.host_count = count_field(*it, "host_count");
    v.diag.block = static_cast<int64_t>(count_field(*it, "block"));
    v.diag.grid = count_field(*it, "grid");
  }
  if (auto s = str_field(doc, "bug_class", false); !s.empty()) {
    const auto c = parse_bug_class(s);
    if (!c) throw ParseError("bug_class", "unknown value '" + s + "'");
    if (*c != classify(v)) throw ParseError("bug_class", "inconsistent with kind");
  }
  return v;
}

}  // namespace opfuzz
