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

#include "opfuzz/testcase.hpp"

#include <openssl/sha.h>

#include <array>
#include <set>

#include "json.hpp"
#include "opfuzz/error.hpp"

namespace opfuzz {

using json = nlohmann::json;

namespace {

constexpr std::array<std::string_view, 5> kDTypeNames = {"f16", "f32", "f64", "i32", "i64"};

json params_json(const Params& params) {
  json out = json::object();
  for (const auto& [key, value] : params) {
    if (const auto* s = std::get_if<int64_t>(&value)) {
      out[key] = *s;
    } else {
      out[key] = std::get<std::vector<int64_t>>(value);
    }
  }
  return out;
}

const json& field(const json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) throw ParseError(name, "missing");
  return *it;
}

int64_t as_int(const json& v, const std::string& name) {
  if (!v.is_number_integer()) throw ParseError(name, "expected an integer");
  if (v.is_number_unsigned() && v.get<uint64_t>() > static_cast<uint64_t>(INT64_MAX)) {
    throw ParseError(name, "integer out of range");
  }
  return v.get<int64_t>();
}

uint64_t as_uint(const json& v, const std::string& name) {
  if (v.is_number_unsigned()) return v.get<uint64_t>();
  if (v.is_number_integer() && v.get<int64_t>() >= 0) return static_cast<uint64_t>(v.get<int64_t>());
  throw ParseError(name, "expected a non-negative integer");
}

std::string as_string(const json& v, const std::string& name) {
  if (!v.is_string()) throw ParseError(name, "expected a string");
  return v.get<std::string>();
}

Params parse_params(const json& v) {
  if (!v.is_object()) throw ParseError("params", "expected an object");
  Params out;
  for (const auto& [key, value] : v.items()) {
    const std::string name = "params." + key;
    if (value.is_array()) {
      std::vector<int64_t> arr;
      for (const auto& e : value) arr.push_back(as_int(e, name));
      out.emplace(key, std::move(arr));
    } else {
      out.emplace(key, as_int(value, name));
    }
  }
  return out;
}

bool is_hex_id(const std::string& s) {
  if (s.size() != 32) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(DType d) { return kDTypeNames[static_cast<size_t>(d)]; }

std::optional<DType> parse_dtype(std::string_view s) {
  for (size_t i = 0; i < kDTypeNames.size(); ++i) {
    if (kDTypeNames[i] == s) return static_cast<DType>(i);
  }
  return std::nullopt;
}

std::string compute_id(OperatorKind kind, const Params& params, DType dtype) {
  json canon = {{"family", to_string(kind.family)},
                {"rank", is_spatial(kind.family) ? json(kind.rank) : json(nullptr)},
                {"params", params_json(params)},
                {"dtype", to_string(dtype)}};
  const std::string bytes = canon.dump();
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  for (int i = 0; i < 16; ++i) {
    id += kHex[digest[i] >> 4];
    id += kHex[digest[i] & 0xf];
  }
  return id;
}

TestCase make_testcase(OperatorKind kind, Params params, DType dtype, uint64_t seed,
                       uint64_t iteration) {
  TestCase tc;
  tc.id = compute_id(kind, params, dtype);
  tc.kind = kind;
  tc.params = std::move(params);
  tc.dtype = dtype;
  tc.seed = seed;
  tc.iteration = iteration;
  return tc;
}

std::string to_json(const TestCase& tc) {
  json doc = json::object();
  doc["version"] = kTestCaseVersion;
  doc["id"] = tc.id;
  doc["family"] = to_string(tc.kind.family);
  doc["rank"] = is_spatial(tc.kind.family) ? json(tc.kind.rank) : json(nullptr);
  doc["params"] = params_json(tc.params);
  doc["dtype"] = to_string(tc.dtype);
  doc["seed"] = tc.seed;
  doc["iteration"] = tc.iteration;
  doc["generator_version"] = tc.generator_version;
  return doc.dump(2) + "\n";
}

TestCase from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("", "expected a JSON object");
  static const std::set<std::string> kFields = {"version", "id",        "family",
                                                "rank",    "params",    "dtype",
                                                "seed",    "iteration", "generator_version"};
  for (const auto& [key, value] : doc.items()) {
    if (kFields.count(key) == 0) throw ParseError(key, "unknown field");
  }
  const int64_t version = as_int(field(doc, "version"), "version");
  if (version != kTestCaseVersion) {
    throw UnsupportedVersionError("version", "unsupported test case version " +
                                                 std::to_string(version));
  }
  TestCase tc;
  tc.id = as_string(field(doc, "id"), "id");
  if (!is_hex_id(tc.id)) throw ParseError("id", "expected 32 lowercase hex digits");
  const std::string family = as_string(field(doc, "family"), "family");
  const auto fam = parse_family(family);
  if (!fam) throw ParseError("family", "unknown operator family '" + family + "'");
  const json& rank = field(doc, "rank");
  if (is_spatial(*fam)) {
    const int64_t r = as_int(rank, "rank");
    if (!supports_rank(*fam, static_cast<int>(r))) {
      throw ParseError("rank", "unsupported rank for " + family);
    }
    tc.kind = {*fam, static_cast<int>(r)};
  } else {
    if (!rank.is_null()) throw ParseError("rank", "must be null for " + family);
    tc.kind = {*fam, 0};
  }
  tc.params = parse_params(field(doc, "params"));
  const std::string dtype = as_string(field(doc, "dtype"), "dtype");
  const auto dt = parse_dtype(dtype);
  if (!dt) throw ParseError("dtype", "unknown dtype '" + dtype + "'");
  tc.dtype = *dt;
  tc.seed = as_uint(field(doc, "seed"), "seed");
  tc.iteration = as_uint(field(doc, "iteration"), "iteration");
  tc.generator_version = as_string(field(doc, "generator_version"), "generator_version");
  return tc;
}

std::vector<Violation> validate(const TestCase& tc) { return validate(tc.kind, tc.params); }

std::vector<Violation> validate(OperatorKind kind, const Params& params) {
  if (!supports_rank(kind.family, kind.rank)) {
    throw StructuralError("validate: unsupported operator " + kind.name());
  }
  const OperatorModel om = build_model(kind, ModelConfig::permissive());
  std::vector<Violation> out;
  const Assignment a = om.from_params(params, out);
  if (!out.empty()) return out;

  for (const auto& v : om.model.vars()) {
    if (v.role == VarRole::kAuxiliary) continue;
    const int64_t x = a.at(v.name);
    if (x < v.lo || x > v.hi) {
      out.push_back({"domain of " + v.name, std::to_string(x) + " outside [" +
                                                std::to_string(v.lo) + ", " +
                                                std::to_string(v.hi) + "]"});
    }
  }
  std::set<std::string> reported;
  for (const auto& c : om.model.constraints()) {
    if (satisfies(a, c)) continue;
    const std::string rule = c.label.empty() ? c.to_string() : c.label;
    if (reported.insert(rule).second) out.push_back({rule, c.to_string()});
  }
  if (!out.empty()) return out;

  const ShapeOutcome shape = output_shape(kind, params);
  if (const auto* bad = std::get_if<InvalidShape>(&shape)) {
    out.push_back({"reference shape oracle", bad->rule});
    return out;
  }
  const auto& expected = std::get<ShapeResult>(shape).dims;
  const auto& got = array_param(params, "out_dims");
  if (got != expected) {
    std::string detail = "out_dims disagree with the reference shape [";
    for (size_t i = 0; i < expected.size(); ++i) {
      detail += (i ? ", " : "") + std::to_string(expected[i]);
    }
    out.push_back({"output shape", detail + "]"});
  }
  return out;
}

}  // namespace opfuzz
