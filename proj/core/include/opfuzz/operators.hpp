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

#ifndef OPFUZZ_OPERATORS_HPP_
#define OPFUZZ_OPERATORS_HPP_

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "opfuzz/expr.hpp"

namespace opfuzz {

enum class OperatorFamily {
  kConv,
  kConvTranspose,
  kMaxPool,
  kAvgPool,
  kLPPool,
  kFractionalMaxPool,
  kAdaptiveAvgPool,
  kAdaptiveMaxPool,
  kReflectionPad,
  kReplicationPad,
  kConstantPad,
  kCircularPad,
  kZeroPad,
  kElemUnary,
  kElemBinary,
  kMatMul,
  kBMM,
  kConcat,
};

std::string_view to_string(OperatorFamily f);
std::optional<OperatorFamily> parse_family(std::string_view name);
const std::vector<OperatorFamily>& all_families();

// Conv/pool/pad families take a spatial rank; the rest ignore it.
bool is_spatial(OperatorFamily f);
bool supports_rank(OperatorFamily f, int rank);

// A family instantiated at a rank (rank 0 for non-spatial families).
struct OperatorKind {
  OperatorFamily family = OperatorFamily::kConv;
  int rank = 0;

  // "Conv2d", "FractionalMaxPool3d", "MatMul".
  std::string name() const;
  auto operator<=>(const OperatorKind&) const = default;
};

// Parses "Conv2d", "ElemUnary", ...; nullopt when unknown or unsupported.
std::optional<OperatorKind> parse_operator(std::string_view name);
std::vector<OperatorKind> all_operator_kinds();

// Elementwise, concat and batched-matmul operands are fixed at this rank.
inline constexpr int kTensorRank = 3;
inline constexpr int kMaxConcatParts = 4;
inline constexpr int64_t kMaxLpNorm = 6;

const std::vector<std::string>& unary_opcodes();
const std::vector<std::string>& binary_opcodes();

struct Bounds {
  int64_t lo = 0;
  int64_t hi = 0;
};

struct ModelConfig {
  Bounds dim{1, 512};
  Bounds chan{1, 64};
  Bounds batch{1, 8};
  Bounds ksize{1, 11};
  Bounds stride{1, 256};
  Bounds pad{0, 8};
  Bounds dil{1, 4};
  // Cap on input and output element counts; none when unset.
  std::optional<int64_t> max_elements;
  // Require the convolution arithmetic to divide exactly instead of flooring.
  bool exact_division = false;

  // Throws ConfigError when any lo > hi or max_elements < 1.
  void check() const;
  // Wide bounds used when re-validating test cases of unknown provenance.
  static ModelConfig permissive();
};

using ParamValue = std::variant<int64_t, std::vector<int64_t>>;
// Generic, framework-agnostic parameter vocabulary: inch, outch, ksize,
// stride, pad, dil, groups, outpad, dims, dims_b, axis, parts, norm, opcode,
// out_dims.
using Params = std::map<std::string, ParamValue, std::less<>>;

int64_t scalar_param(const Params& p, std::string_view key);
const std::vector<int64_t>& array_param(const Params& p, std::string_view key);

// How one generic parameter is read out of model variables.
struct ParamSlot {
  std::string key;
  std::vector<std::string> vars;
  bool scalar = false;
};

struct Violation {
  std::string rule;
  std::string detail;
};

struct OperatorModel {
  OperatorKind kind;
  Model model;
  std::vector<ParamSlot> layout;
  // Auxiliary variables recomputed from the others when a model is loaded
  // back from generic parameters.
  std::vector<std::pair<std::string, std::function<int64_t(const Assignment&)>>> derive;

  Params to_params(const Assignment& a) const;
  // Inverse of to_params. Missing/extra/inconsistent parameters are appended
  // to `problems`; auxiliaries are derived only when the rest is complete.
  Assignment from_params(const Params& p, std::vector<Violation>& problems) const;
};

// Throws ConfigError for an unsupported family/rank or invalid config.
OperatorModel build_model(OperatorKind kind, const ModelConfig& config = {});

struct ShapeResult {
  std::vector<int64_t> dims;  // full output shape
  bool operator==(const ShapeResult&) const = default;
};

struct InvalidShape {
  std::string rule;
};

using ShapeOutcome = std::variant<ShapeResult, InvalidShape>;

// Closed-form output shape straight from the documented formulas, with floor
// division. Independent of the constraint models above. Throws
// StructuralError when a required parameter is missing.
ShapeOutcome output_shape(OperatorKind kind, const Params& params);

}  // namespace opfuzz

#endif  // OPFUZZ_OPERATORS_HPP_
