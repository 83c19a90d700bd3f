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

#include <limits>

#include "opfuzz/error.hpp"
#include "opfuzz/operators.hpp"

namespace opfuzz {

namespace {

// Framework-documentation shape rules, evaluated directly. Nothing here
// touches the constraint models; validation uses this as the second opinion.

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

struct Checked {
  std::vector<int64_t> dims;
  std::string invalid;

  void push(i128 v, const std::string& what) {
    if (!invalid.empty()) return;
    if (v < 1) {
      invalid = what + " must be >= 1";
    } else if (v > std::numeric_limits<int64_t>::max()) {
      invalid = what + " overflows int64";
    } else {
      dims.push_back(static_cast<int64_t>(v));
    }
  }
  void fail(const std::string& rule) {
    if (invalid.empty()) invalid = rule;
  }
  ShapeOutcome done() {
    if (!invalid.empty()) return InvalidShape{invalid};
    return ShapeResult{std::move(dims)};
  }
};

const std::vector<int64_t>& arr(const Params& p, std::string_view key, size_t n) {
  const auto& v = array_param(p, key);
  if (v.size() != n) {
    throw StructuralError("parameter '" + std::string(key) + "' must have " + std::to_string(n) +
                          " entries");
  }
  return v;
}

std::string axis(int i) { return " (axis " + std::to_string(i) + ")"; }

void require_positive_input(const std::vector<int64_t>& dims, Checked& out) {
  for (size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 1) out.fail("input dim " + std::to_string(i) + " must be >= 1");
  }
}

ShapeOutcome conv_like(OperatorKind kind, const Params& p) {
  const int r = kind.rank;
  const auto& dims = arr(p, "dims", r + 2);
  const auto& k = arr(p, "ksize", r);
  const auto& s = arr(p, "stride", r);
  const bool transposed = kind.family == OperatorFamily::kConvTranspose;
  const auto& pad = arr(p, "pad", r);
  const auto& dil = arr(p, "dil", r);
  const int64_t g = scalar_param(p, "groups");
  const int64_t cin = scalar_param(p, "inch");
  const int64_t cout = scalar_param(p, "outch");
  Checked out;
  require_positive_input(dims, out);
  if (cin != dims[1]) out.fail("inch must equal dims[1]");
  if (g < 1) out.fail("groups must be >= 1");
  if (cout < 1) out.fail("out_channels must be >= 1");
  if (g >= 1 && cin % g != 0) out.fail("in_channels must be divisible by groups");
  if (g >= 1 && cout % g != 0) out.fail("out_channels must be divisible by groups");
  out.push(dims[0], "batch");
  out.push(cout, "out_channels");
  for (int i = 0; i < r; ++i) {
    if (k[i] < 1 || s[i] < 1 || dil[i] < 1 || pad[i] < 0) {
      out.fail("kernel/stride/dilation must be >= 1 and padding >= 0" + axis(i));
      continue;
    }
    const i128 h = dims[2 + i];
    const i128 eff = static_cast<i128>(dil[i]) * (k[i] - 1) + 1;
    if (transposed) {
      const auto& op = arr(p, "outpad", r);
      if (op[i] < 0 || op[i] >= s[i]) out.fail("output_padding must be in [0, stride)" + axis(i));
      out.push((h - 1) * s[i] - 2 * static_cast<i128>(pad[i]) + eff - 1 + op[i] + 1,
               "output size" + axis(i));
    } else {
      if (h <= k[i]) out.fail("input size must exceed kernel size" + axis(i));
      if (h + 2 * static_cast<i128>(pad[i]) < eff) {
        out.fail("padded input smaller than dilated kernel" + axis(i));
      }
      out.push(floor_div(h + 2 * static_cast<i128>(pad[i]) - eff, s[i]) + 1, "output size" + axis(i));
    }
  }
  return out.done();
}

ShapeOutcome window_pool(OperatorKind kind, const Params& p) {
  const int r = kind.rank;
  const auto& dims = arr(p, "dims", r + 2);
  const auto& k = arr(p, "ksize", r);
  const auto& s = arr(p, "stride", r);
  const bool has_pad = kind.family != OperatorFamily::kLPPool;
  const bool has_dil = kind.family == OperatorFamily::kMaxPool;
  Checked out;
  require_positive_input(dims, out);
  if (kind.family == OperatorFamily::kLPPool) {
    const int64_t norm = scalar_param(p, "norm");
    if (norm < 1) out.fail("norm_type must be >= 1");
  }
  out.push(dims[0], "batch");
  out.push(dims[1], "channels");
  for (int i = 0; i < r; ++i) {
    const i128 pad = has_pad ? arr(p, "pad", r)[i] : 0;
    const i128 dil = has_dil ? arr(p, "dil", r)[i] : 1;
    if (k[i] < 1 || s[i] < 1 || dil < 1 || pad < 0) {
      out.fail("kernel/stride/dilation must be >= 1 and padding >= 0" + axis(i));
      continue;
    }
    if (2 * pad > k[i]) out.fail("padding must be at most half the kernel size" + axis(i));
    const i128 eff = dil * (k[i] - 1) + 1;
    const i128 h = dims[2 + i];
    if (h + 2 * pad < eff) out.fail("padded input smaller than window" + axis(i));
    out.push(floor_div(h + 2 * pad - eff, s[i]) + 1, "output size" + axis(i));
  }
  return out.done();
}

ShapeOutcome sized_pool(OperatorKind kind, const Params& p) {
  const int r = kind.rank;
  const auto& dims = arr(p, "dims", r + 2);
  const auto& req = arr(p, "out_dims", r + 2);
  Checked out;
  require_positive_input(dims, out);
  if (req[0] != dims[0] || req[1] != dims[1]) out.fail("batch and channels pass through");
  out.push(dims[0], "batch");
  out.push(dims[1], "channels");
  const bool fractional = kind.family == OperatorFamily::kFractionalMaxPool;
  for (int i = 0; i < r; ++i) {
    const int64_t h = dims[2 + i];
    const int64_t o = req[2 + i];
    if (fractional) {
      const int64_t k = arr(p, "ksize", r)[i];
      if (k < 1) out.fail("kernel size must be >= 1" + axis(i));
      if (o >= h) out.fail("output size must be smaller than input" + axis(i));
      if (static_cast<i128>(o) + k - 1 > h) {
        out.fail("output_size + kernel_size - 1 must not exceed input" + axis(i));
      }
    }
    out.push(o, "output size" + axis(i));
  }
  return out.done();
}

ShapeOutcome pad(OperatorKind kind, const Params& p) {
  const int r = kind.rank;
  const auto& dims = arr(p, "dims", r + 2);
  const auto& pads = arr(p, "pad", 2 * r);
  Checked out;
  require_positive_input(dims, out);
  out.push(dims[0], "batch");
  out.push(dims[1], "channels");
  for (int i = 0; i < r; ++i) {
    const int64_t h = dims[2 + i];
    const int64_t l = pads[2 * i];
    const int64_t rr = pads[2 * i + 1];
    if (l < 0 || rr < 0) out.fail("padding must be >= 0" + axis(i));
    if (kind.family == OperatorFamily::kReflectionPad && (l >= h || rr >= h)) {
      out.fail("reflection padding must be smaller than the input" + axis(i));
    }
    if (kind.family == OperatorFamily::kCircularPad && (l > h || rr > h)) {
      out.fail("circular padding must not exceed the input" + axis(i));
    }
    out.push(static_cast<i128>(h) + l + rr, "output size" + axis(i));
  }
  return out.done();
}

ShapeOutcome elementwise(OperatorKind kind, const Params& p) {
  const auto& a = arr(p, "dims", kTensorRank);
  const int64_t opcode = scalar_param(p, "opcode");
  Checked out;
  require_positive_input(a, out);
  if (kind.family == OperatorFamily::kElemUnary) {
    if (opcode < 0 || opcode >= static_cast<int64_t>(unary_opcodes().size())) out.fail("unknown opcode");
    for (int i = 0; i < kTensorRank; ++i) out.push(a[i], "output size" + axis(i));
    return out.done();
  }
  const auto& b = arr(p, "dims_b", kTensorRank);
  require_positive_input(b, out);
  if (opcode < 0 || opcode >= static_cast<int64_t>(binary_opcodes().size())) out.fail("unknown opcode");
  for (int i = 0; i < kTensorRank; ++i) {
    if (a[i] == b[i] || b[i] == 1) {
      out.push(a[i], "output size" + axis(i));
    } else if (a[i] == 1) {
      out.push(b[i], "output size" + axis(i));
    } else {
      out.fail("shapes are not broadcastable" + axis(i));
    }
  }
  return out.done();
}

ShapeOutcome matmul(OperatorKind kind, const Params& p) {
  const size_t n = kind.family == OperatorFamily::kBMM ? 3 : 2;
  const auto& a = arr(p, "dims", n);
  const auto& b = arr(p, "dims_b", n);
  Checked out;
  require_positive_input(a, out);
  require_positive_input(b, out);
  if (a[n - 1] != b[n - 2]) out.fail("inner dimensions must match");
  if (n == 3) {
    if (a[0] != b[0]) out.fail("batch dimensions must match");
    out.push(a[0], "batch");
  }
  out.push(a[n - 2], "rows");
  out.push(b[n - 1], "cols");
  return out.done();
}

ShapeOutcome concat_shape(const Params& p) {
  const auto& d = arr(p, "dims", kTensorRank);
  const auto& parts = arr(p, "parts", kMaxConcatParts);
  const int64_t axis_idx = scalar_param(p, "axis");
  Checked out;
  if (axis_idx < 0 || axis_idx >= kTensorRank) {
    out.fail("axis out of range");
    return out.done();
  }
  i128 total = 0;
  int count = 0;
  bool gap = false;
  for (int j = 0; j < kMaxConcatParts; ++j) {
    if (parts[j] < 0) out.fail("part sizes must be >= 0");
    if (parts[j] == 0) {
      gap = true;
    } else {
      if (gap) out.fail("absent parts must be trailing");
      ++count;
    }
    total += parts[j];
  }
  if (count < 2 || parts[0] == 0 || parts[1] == 0) out.fail("at least two tensors are concatenated");
  for (int k = 0; k < kTensorRank; ++k) {
    if (k == axis_idx) {
      if (d[k] != 1) out.fail("base dim on the concat axis must be 1");
      out.push(total, "output size" + axis(k));
    } else {
      out.push(d[k], "output size" + axis(k));
    }
  }
  return out.done();
}

}  // namespace

ShapeOutcome output_shape(OperatorKind kind, const Params& params) {
  if (!supports_rank(kind.family, kind.rank)) {
    throw StructuralError("output_shape: unsupported operator " + kind.name());
  }
  switch (kind.family) {
    case OperatorFamily::kConv:
    case OperatorFamily::kConvTranspose: return conv_like(kind, params);
    case OperatorFamily::kMaxPool:
    case OperatorFamily::kAvgPool:
    case OperatorFamily::kLPPool: return window_pool(kind, params);
    case OperatorFamily::kFractionalMaxPool:
    case OperatorFamily::kAdaptiveAvgPool:
    case OperatorFamily::kAdaptiveMaxPool: return sized_pool(kind, params);
    case OperatorFamily::kReflectionPad:
    case OperatorFamily::kReplicationPad:
    case OperatorFamily::kConstantPad:
    case OperatorFamily::kCircularPad:
    case OperatorFamily::kZeroPad: return pad(kind, params);
    case OperatorFamily::kElemUnary:
    case OperatorFamily::kElemBinary: return elementwise(kind, params);
    case OperatorFamily::kMatMul:
    case OperatorFamily::kBMM: return matmul(kind, params);
    case OperatorFamily::kConcat: return concat_shape(params);
  }
  throw StructuralError("output_shape: unknown family");
}

}  // namespace opfuzz
