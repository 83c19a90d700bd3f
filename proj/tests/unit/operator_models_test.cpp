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

#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "opfuzz/error.hpp"
#include "opfuzz/explorer.hpp"
#include "opfuzz/operators.hpp"
#include "opfuzz/solver.hpp"
#include "opfuzz/testcase.hpp"

namespace opfuzz {
namespace {

OperatorKind op(const char* name) {
  auto k = parse_operator(name);
  if (!k) throw ConfigError(name);
  return *k;
}

void pin(OperatorModel& om, const std::string& var, int64_t value) {
  om.model.add(IntExpr::var(var) == value, "pin " + var);
}

std::vector<int64_t> shape_of(const ShapeOutcome& o) {
  if (const auto* r = std::get_if<ShapeResult>(&o)) return r->dims;
  return {};
}

std::string rule_of(const ShapeOutcome& o) {
  if (const auto* r = std::get_if<InvalidShape>(&o)) return r->rule;
  return "";
}

Params conv2d_128_params() {
  return {{"dims", std::vector<int64_t>{1, 3, 128, 128}},
          {"inch", int64_t{3}},
          {"outch", int64_t{8}},
          {"ksize", std::vector<int64_t>{5, 5}},
          {"stride", std::vector<int64_t>{1, 1}},
          {"pad", std::vector<int64_t>{1, 1}},
          {"dil", std::vector<int64_t>{1, 1}},
          {"groups", int64_t{1}},
          {"out_dims", std::vector<int64_t>{1, 8, 126, 126}}};
}

// --- names ---------------------------------------------------------------

TEST(OperatorKindTest, NamesRoundTrip) {
  for (const OperatorKind& k : all_operator_kinds()) {
    auto back = parse_operator(k.name());
    ASSERT_TRUE(back) << k.name();
    EXPECT_EQ(*back, k);
  }
  EXPECT_EQ(op("Conv2d").family, OperatorFamily::kConv);
  EXPECT_EQ(op("Conv2d").rank, 2);
  EXPECT_FALSE(parse_operator("Conv4d"));
  EXPECT_FALSE(parse_operator("MatMul2d"));
  EXPECT_FALSE(parse_operator("Nope"));
}

TEST(OperatorKindTest, EveryFamilyHasAKind) {
  std::set<OperatorFamily> seen;
  for (const OperatorKind& k : all_operator_kinds()) seen.insert(k.family);
  EXPECT_EQ(seen.size(), all_families().size());
  EXPECT_EQ(all_families().size(), 18u);
}

TEST(BuildModelTest, RejectsBadConfig) {
  ModelConfig cfg;
  cfg.dim = {10, 5};
  EXPECT_THROW(build_model(op("Conv2d"), cfg), ConfigError);
  cfg = {};
  cfg.max_elements = 0;
  EXPECT_THROW(build_model(op("Conv2d"), cfg), ConfigError);
  EXPECT_THROW(build_model({OperatorFamily::kConv, 4}), ConfigError);
}

// --- solved examples -----------------------------------------------------

TEST(ConvModelTest, PinnedConv2d128SolvesTo126) {
  OperatorModel om = build_model(op("Conv2d"));
  for (int i = 0; i < 2; ++i) {
    const std::string a = std::to_string(i);
    pin(om, "H_in" + a, 128);
    pin(om, "K" + a, 5);
    pin(om, "P" + a, 1);
    pin(om, "D" + a, 1);
    pin(om, "S" + a, 1);
  }
  for (uint64_t seed = 0; seed < 10; ++seed) {
    SolveResult r = solve(om.model, seed);
    ASSERT_TRUE(r.sat());
    EXPECT_EQ(r.assignment.at("H_out0"), 126);
    EXPECT_EQ(r.assignment.at("H_out1"), 126);
  }
}

TEST(ConvModelTest, IdentityWindowKeepsSize) {
  OperatorModel om = build_model(op("Conv1d"));
  pin(om, "K0", 1);
  pin(om, "S0", 1);
  pin(om, "P0", 0);
  pin(om, "D0", 1);
  for (uint64_t seed = 0; seed < 30; ++seed) {
    SolveResult r = solve(om.model, seed);
    ASSERT_TRUE(r.sat());
    EXPECT_EQ(r.assignment.at("H_out0"), r.assignment.at("H_in0"));
  }
}

TEST(PoolModelTest, MaxPool1dWindowStarts) {
  OperatorModel om = build_model(op("MaxPool1d"));
  pin(om, "H_in0", 7);
  pin(om, "K0", 2);
  pin(om, "S0", 2);
  pin(om, "P0", 0);
  pin(om, "D0", 1);
  SolveResult r = solve(om.model, 5);
  ASSERT_TRUE(r.sat());
  EXPECT_EQ(r.assignment.at("H_out0"), 3);
}

TEST(ConvTransposeModelTest, AdmitsLargeStrideScenario) {
  ModelConfig cfg;
  cfg.dim.hi = 40000;
  OperatorModel om = build_model(op("ConvTranspose2d"), cfg);
  pin(om, "H_in0", 40000);
  pin(om, "H_in1", 2);
  pin(om, "S0", 200);
  pin(om, "S1", 200);
  SolveResult r = solve(om.model, 1);
  ASSERT_TRUE(r.sat());
  EXPECT_TRUE(validate(om.kind, om.to_params(r.assignment)).empty());
}

TEST(ModelBoundsTest, SolutionsRespectConfigAndCap) {
  ModelConfig cfg;
  cfg.max_elements = 100'000;
  for (const OperatorKind& k : all_operator_kinds()) {
    OperatorModel om = build_model(k, cfg);
    Explorer ex(om.model, 11);
    for (int i = 0; i < 20; ++i) {
      auto a = ex.next();
      ASSERT_TRUE(a) << k.name();
      for (const VarDecl& d : om.model.vars()) {
        EXPECT_GE(a->at(d.name), d.lo) << k.name() << " " << d.name;
        EXPECT_LE(a->at(d.name), d.hi) << k.name() << " " << d.name;
      }
      const Params p = om.to_params(*a);
      for (const char* key : {"dims", "dims_b", "out_dims"}) {
        if (!p.contains(key)) continue;
        i128 n = 1;
        for (int64_t d : array_param(p, key)) n *= d;
        if (k.family == OperatorFamily::kConcat && std::string(key) == "dims") continue;
        EXPECT_LE(n, 100'000) << k.name() << " " << key;
      }
    }
  }
}

// --- reference oracle ----------------------------------------------------

TEST(OutputShapeTest, Conv2d128) {
  EXPECT_EQ(shape_of(output_shape(op("Conv2d"), conv2d_128_params())),
            (std::vector<int64_t>{1, 8, 126, 126}));
}

TEST(OutputShapeTest, MatMul) {
  Params p{{"dims", std::vector<int64_t>{2, 3}}, {"dims_b", std::vector<int64_t>{3, 4}}};
  EXPECT_EQ(shape_of(output_shape(op("MatMul"), p)), (std::vector<int64_t>{2, 4}));
  p["dims_b"] = std::vector<int64_t>{5, 4};
  EXPECT_NE(rule_of(output_shape(op("MatMul"), p)).find("inner dimensions"), std::string::npos);
}

TEST(OutputShapeTest, Broadcast) {
  Params p{{"dims", std::vector<int64_t>{3, 1, 5}},
           {"dims_b", std::vector<int64_t>{1, 4, 5}},
           {"opcode", int64_t{0}}};
  EXPECT_EQ(shape_of(output_shape(op("ElemBinary"), p)), (std::vector<int64_t>{3, 4, 5}));
  p["dims_b"] = std::vector<int64_t>{2, 4, 5};
  EXPECT_NE(rule_of(output_shape(op("ElemBinary"), p)).find("broadcast"), std::string::npos);
}

TEST(OutputShapeTest, LargeStrideTransposedConv) {
  Params p{{"dims", std::vector<int64_t>{1, 10, 40000, 2}},
           {"inch", int64_t{10}},
           {"outch", int64_t{16}},
           {"ksize", std::vector<int64_t>{3, 3}},
           {"stride", std::vector<int64_t>{200, 200}},
           {"pad", std::vector<int64_t>{0, 0}},
           {"dil", std::vector<int64_t>{1, 1}},
           {"outpad", std::vector<int64_t>{0, 0}},
           {"groups", int64_t{1}}};
  EXPECT_EQ(shape_of(output_shape(op("ConvTranspose2d"), p)),
            (std::vector<int64_t>{1, 16, 7'999'803, 203}));
}

TEST(OutputShapeTest, ReflectionPadNeedsPadBelowSize) {
  Params p{{"dims", std::vector<int64_t>{1, 1, 4}}, {"pad", std::vector<int64_t>{4, 0}}};
  EXPECT_NE(rule_of(output_shape(op("ReflectionPad1d"), p)).find("reflection padding"),
            std::string::npos);
  p["pad"] = std::vector<int64_t>{3, 3};
  EXPECT_EQ(shape_of(output_shape(op("ReflectionPad1d"), p)), (std::vector<int64_t>{1, 1, 10}));
}

TEST(OutputShapeTest, MissingParameterIsStructural) {
  Params p = conv2d_128_params();
  p.erase("stride");
  EXPECT_THROW(output_shape(op("Conv2d"), p), StructuralError);
}

// Window placements enumerated explicitly: starts at multiples of S over the
// padded input, each window's last tap D(K-1) must stay inside it.
int64_t brute_force_windows(int64_t h, int64_t k, int64_t s, int64_t p, int64_t d) {
  int64_t n = 0;
  for (int64_t start = 0; start + d * (k - 1) <= h + 2 * p - 1; start += s) ++n;
  return n;
}

Params window_params(OperatorFamily fam, int64_t h, int64_t k, int64_t s, int64_t p,
                     int64_t d) {
  Params out{{"dims", std::vector<int64_t>{1, 2, h}},
             {"ksize", std::vector<int64_t>{k}},
             {"stride", std::vector<int64_t>{s}}};
  if (fam == OperatorFamily::kConv) {
    out["inch"] = int64_t{2};
    out["outch"] = int64_t{2};
    out["groups"] = int64_t{1};
  }
  if (fam != OperatorFamily::kLPPool) out["pad"] = std::vector<int64_t>{p};
  if (fam == OperatorFamily::kConv || fam == OperatorFamily::kMaxPool) {
    out["dil"] = std::vector<int64_t>{d};
  }
  if (fam == OperatorFamily::kLPPool) out["norm"] = int64_t{2};
  return out;
}

TEST(OutputShapePropertyTest, MatchesBruteForceWindowCount) {
  struct Case {
    OperatorFamily fam;
    bool pad;
    bool dil;
  };
  const Case cases[] = {{OperatorFamily::kConv, true, true},
                        {OperatorFamily::kMaxPool, true, true},
                        {OperatorFamily::kAvgPool, true, false},
                        {OperatorFamily::kLPPool, false, false}};
  int compared = 0;
  for (const Case& c : cases) {
    const OperatorKind kind{c.fam, 1};
    for (int64_t h = 1; h <= 8; ++h) {
      for (int64_t k = 1; k <= 8; ++k) {
        for (int64_t s = 1; s <= 8; ++s) {
          for (int64_t p = 0; p <= (c.pad ? 8 : 0); ++p) {
            for (int64_t d = 1; d <= (c.dil ? 8 : 1); ++d) {
              const ShapeOutcome o = output_shape(kind, window_params(c.fam, h, k, s, p, d));
              const auto dims = shape_of(o);
              if (dims.empty()) continue;  // a validity rule fired
              EXPECT_EQ(dims.back(), brute_force_windows(h, k, s, p, d))
                  << kind.name() << " h=" << h << " k=" << k << " s=" << s << " p=" << p
                  << " d=" << d;
              ++compared;
            }
          }
        }
      }
    }
  }
  EXPECT_GT(compared, 5000);
}

TEST(OutputShapePropertyTest, PaddingIsMonotone) {
  for (int64_t h = 1; h <= 12; ++h) {
    for (int64_t k = 1; k <= 6; ++k) {
      for (int64_t s = 1; s <= 5; ++s) {
        for (int64_t d = 1; d <= 3; ++d) {
          int64_t prev = -1;
          for (int64_t p = 0; p <= 6; ++p) {
            // Conv floor arithmetic without the validity rules on top.
            const int64_t num = h + 2 * p - d * (k - 1) - 1;
            const int64_t out = num >= 0 ? num / s + 1 : 0;
            const auto dims = shape_of(
                output_shape({OperatorFamily::kConv, 1},
                             window_params(OperatorFamily::kConv, h, k, s, p, d)));
            if (!dims.empty()) {
              EXPECT_EQ(dims.back(), out);
            }
            if (prev >= 0) {
              EXPECT_GE(out - prev, 0);
              EXPECT_LE(out - prev, (2 + s - 1) / s);
            }
            prev = out;
          }
        }
      }
    }
  }
}

// --- validate ------------------------------------------------------------

TEST(ValidateTest, Conv2d128IsValid) { EXPECT_TRUE(validate(op("Conv2d"), conv2d_128_params()).empty()); }

TEST(ValidateTest, WrongOutputNamesCoreRelation) {
  Params p = conv2d_128_params();
  p["out_dims"] = std::vector<int64_t>{1, 8, 125, 126};
  const auto v = validate(op("Conv2d"), p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, "core relation (axis 0)");
}

TEST(ValidateTest, ReflectionPadAtSize) {
  Params p{{"dims", std::vector<int64_t>{1, 2, 5}},
           {"pad", std::vector<int64_t>{5, 1}},
           {"out_dims", std::vector<int64_t>{1, 2, 11}}};
  const auto v = validate(op("ReflectionPad1d"), p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, "pl < H_in (axis 0)");
}

TEST(ValidateTest, MissingAndUnknownParameters) {
  Params p = conv2d_128_params();
  p.erase("dil");
  p["bogus"] = int64_t{1};
  const auto v = validate(op("Conv2d"), p);
  EXPECT_GE(v.size(), 2u);
}

TEST(ValidateTest, GroupsMustDivideChannels) {
  Params p = conv2d_128_params();
  p["groups"] = int64_t{2};
  const auto v = validate(op("Conv2d"), p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, "groups divide in_channels");
}

TEST(ValidatePropertyTest, ExplorerOutputAgreesWithOracle) {
  for (const OperatorKind& k : all_operator_kinds()) {
    OperatorModel om = build_model(k);
    Explorer ex(om.model, 3);
    for (int i = 0; i < 40; ++i) {
      auto a = ex.next();
      ASSERT_TRUE(a) << k.name();
      const Params p = om.to_params(*a);
      const auto v = validate(k, p);
      EXPECT_TRUE(v.empty()) << k.name() << ": " << (v.empty() ? "" : v[0].rule);
      EXPECT_EQ(shape_of(output_shape(k, p)), array_param(p, "out_dims")) << k.name();
    }
  }
}

TEST(ParamsRoundTripTest, FromParamsInvertsToParams) {
  for (const OperatorKind& k : all_operator_kinds()) {
    OperatorModel om = build_model(k);
    SolveResult r = solve(om.model, 17);
    ASSERT_TRUE(r.sat()) << k.name();
    std::vector<Violation> problems;
    const Assignment back = om.from_params(om.to_params(r.assignment), problems);
    EXPECT_TRUE(problems.empty()) << k.name();
    EXPECT_EQ(back, r.assignment) << k.name();
  }
}

}  // namespace
}  // namespace opfuzz
