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

#include "opfuzz/operators.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "opfuzz/error.hpp"

namespace opfuzz {

namespace {

struct FamilyInfo {
  OperatorFamily family;
  std::string_view name;
  int min_rank;  // 0 for non-spatial
  int max_rank;
};

constexpr std::array<FamilyInfo, 18> kFamilies = {{
    {OperatorFamily::kConv, "Conv", 1, 3},
    {OperatorFamily::kConvTranspose, "ConvTranspose", 1, 3},
    {OperatorFamily::kMaxPool, "MaxPool", 1, 3},
    {OperatorFamily::kAvgPool, "AvgPool", 1, 3},
    {OperatorFamily::kLPPool, "LPPool", 1, 3},
    {OperatorFamily::kFractionalMaxPool, "FractionalMaxPool", 2, 3},
    {OperatorFamily::kAdaptiveAvgPool, "AdaptiveAvgPool", 1, 3},
    {OperatorFamily::kAdaptiveMaxPool, "AdaptiveMaxPool", 1, 3},
    {OperatorFamily::kReflectionPad, "ReflectionPad", 1, 3},
    {OperatorFamily::kReplicationPad, "ReplicationPad", 1, 3},
    {OperatorFamily::kConstantPad, "ConstantPad", 1, 3},
    {OperatorFamily::kCircularPad, "CircularPad", 1, 3},
    {OperatorFamily::kZeroPad, "ZeroPad", 1, 3},
    {OperatorFamily::kElemUnary, "ElemUnary", 0, 0},
    {OperatorFamily::kElemBinary, "ElemBinary", 0, 0},
    {OperatorFamily::kMatMul, "MatMul", 0, 0},
    {OperatorFamily::kBMM, "BMM", 0, 0},
    {OperatorFamily::kConcat, "Concat", 0, 0},
}};

const FamilyInfo& info(OperatorFamily f) {
  for (const auto& i : kFamilies) {
    if (i.family == f) return i;
  }
  throw StructuralError("unknown operator family");
}

std::string ax(std::string_view base, int i) {
  return std::string(base) + std::to_string(i);
}

void check_bounds(const Bounds& b, const char* what) {
  if (b.lo > b.hi) throw ConfigError(std::string("model config: ") + what + " lo > hi");
}

// Accumulates variables, labelled rules and the parameter layout for one
// operator model.
class Builder {
 public:
  Builder(OperatorKind kind, const ModelConfig& cfg) : cfg_(cfg) { om_.kind = kind; }

  IntExpr var(const std::string& name, Bounds b, VarRole role) {
    return om_.model.add_var(name, b.lo, b.hi, role);
  }
  void rule(Constraint c, const std::string& label) { om_.model.add(std::move(c), label); }
  void slot(std::string key, std::vector<std::string> vars, bool scalar = false) {
    om_.layout.push_back({std::move(key), std::move(vars), scalar});
  }
  void derive(std::string name, std::function<int64_t(const Assignment&)> fn) {
    om_.derive.emplace_back(std::move(name), std::move(fn));
  }
  void cap(const std::vector<IntExpr>& dims, const std::string& label) {
    if (cfg_.max_elements) rule(product(dims) <= IntExpr(*cfg_.max_elements), label);
  }

  const ModelConfig& cfg() const { return cfg_; }
  int rank() const { return om_.kind.rank; }
  OperatorFamily family() const { return om_.kind.family; }
  OperatorModel finish() { return std::move(om_); }

 private:
  const ModelConfig& cfg_;
  OperatorModel om_;
};

struct Spatial {
  IntExpr n = 0;
  IntExpr c = 0;
  std::vector<IntExpr> in;
  std::vector<IntExpr> out;
  std::vector<std::string> in_names;
  std::vector<std::string> out_names;
};

// N, C_in and the input/output spatial extents shared by conv, pool and pad
// families. Output extents get `out_bounds` and `out_role`.
Spatial spatial_vars(Builder& b, Bounds out_bounds, VarRole out_role) {
  Spatial s;
  s.n = b.var("N", b.cfg().batch, VarRole::kInputDim);
  s.c = b.var("C_in", b.cfg().chan, VarRole::kInputDim);
  for (int i = 0; i < b.rank(); ++i) {
    s.in.push_back(b.var(ax("H_in", i), b.cfg().dim, VarRole::kInputDim));
    s.in_names.push_back(ax("H_in", i));
  }
  for (int i = 0; i < b.rank(); ++i) {
    s.out.push_back(b.var(ax("H_out", i), out_bounds, out_role));
    s.out_names.push_back(ax("H_out", i));
  }
  return s;
}

std::vector<std::string> names(std::string_view base, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(ax(base, i));
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<IntExpr> with_nc(IntExpr n, IntExpr c, const std::vector<IntExpr>& dims) {
  std::vector<IntExpr> out{std::move(n), std::move(c)};
  out.insert(out.end(), dims.begin(), dims.end());
  return out;
}

int64_t get(const Assignment& a, const std::string& name) { return a.at(name); }

// H_in + 2P - D(K-1) - 1 == S(H_out - 1) + r with 0 <= r < S, the floor form
// of H_out = (H_in + 2P - D(K-1) - 1) / S + 1.
void floor_window_axis(Builder& b, int i, const IntExpr& h_in, const IntExpr& h_out,
                       const IntExpr& k, const IntExpr& s, const IntExpr& p,
                       const IntExpr& d) {
  const Bounds rem = b.cfg().exact_division ? Bounds{0, 0} : Bounds{0, b.cfg().stride.hi - 1};
  const std::string r_name = ax("r", i);
  IntExpr r = b.var(r_name, rem, VarRole::kAuxiliary);
  const std::string core = "core relation (axis " + std::to_string(i) + ")";
  const IntExpr numerator = h_in + 2 * p - d * (k - 1) - 1;
  b.rule(numerator == s * (h_out - 1) + r, core);
  b.rule(r >= 0, core);
  b.rule(r < s, core);
  b.rule(h_in + 2 * p >= d * (k - 1) + 1, "window fits (axis " + std::to_string(i) + ")");
  b.derive(r_name, [h_in, h_out, k, s, p, d](const Assignment& a) {
    return static_cast<int64_t>(eval(a, h_in + 2 * p - d * (k - 1) - 1 - s * (h_out - 1)));
  });
}

void groups(Builder& b, const IntExpr& c_in, const IntExpr& c_out) {
  IntExpr g = b.var("G", {1, b.cfg().chan.hi}, VarRole::kParam);
  IntExpr q_in = b.var("q_in", {1, b.cfg().chan.hi}, VarRole::kAuxiliary);
  IntExpr q_out = b.var("q_out", {1, b.cfg().chan.hi}, VarRole::kAuxiliary);
  b.rule(c_in == g * q_in, "groups divide in_channels");
  b.rule(c_out == g * q_out, "groups divide out_channels");
  auto quot = [](const std::string& num) {
    return [num](const Assignment& a) {
      const int64_t g = get(a, "G");
      return g > 0 ? get(a, num) / g : 0;
    };
  };
  b.derive("q_in", quot("C_in"));
  b.derive("q_out", quot("C_out"));
}

struct WindowVars {
  std::vector<IntExpr> k, s, p, d;
};

WindowVars window_vars(Builder& b, bool with_pad, bool with_dil) {
  WindowVars w;
  for (int i = 0; i < b.rank(); ++i) {
    w.k.push_back(b.var(ax("K", i), b.cfg().ksize, VarRole::kParam));
    w.s.push_back(b.var(ax("S", i), b.cfg().stride, VarRole::kParam));
    w.p.push_back(with_pad ? b.var(ax("P", i), b.cfg().pad, VarRole::kParam) : IntExpr(0));
    w.d.push_back(with_dil ? b.var(ax("D", i), b.cfg().dil, VarRole::kParam) : IntExpr(1));
  }
  return w;
}

OperatorModel build_conv(Builder& b) {
  const ModelConfig& cfg = b.cfg();
  Spatial s = spatial_vars(b, {1, cfg.dim.hi + 2 * cfg.pad.hi}, VarRole::kOutputDim);
  IntExpr c_out = b.var("C_out", cfg.chan, VarRole::kParam);
  WindowVars w = window_vars(b, true, true);
  for (int i = 0; i < b.rank(); ++i) {
    floor_window_axis(b, i, s.in[i], s.out[i], w.k[i], w.s[i], w.p[i], w.d[i]);
    b.rule(s.in[i] > w.k[i], "H_in > K (axis " + std::to_string(i) + ")");
  }
  groups(b, s.c, c_out);
  b.cap(with_nc(s.n, s.c, s.in), "input elements <= max_elements");
  b.cap(with_nc(s.n, c_out, s.out), "output elements <= max_elements");
  const int r = b.rank();
  b.slot("dims", concat({"N", "C_in"}, s.in_names));
  b.slot("inch", {"C_in"}, true);
  b.slot("outch", {"C_out"}, true);
  b.slot("ksize", names("K", r));
  b.slot("stride", names("S", r));
  b.slot("pad", names("P", r));
  b.slot("dil", names("D", r));
  b.slot("groups", {"G"}, true);
  b.slot("out_dims", concat({"N", "C_out"}, s.out_names));
  return b.finish();
}

OperatorModel build_conv_transpose(Builder& b) {
  const ModelConfig& cfg = b.cfg();
  const int64_t out_hi = (cfg.dim.hi - 1) * cfg.stride.hi + cfg.dil.hi * (cfg.ksize.hi - 1) +
                         (cfg.stride.hi - 1) + 1;
  Spatial s = spatial_vars(b, {1, std::max<int64_t>(1, out_hi)}, VarRole::kOutputDim);
  IntExpr c_out = b.var("C_out", cfg.chan, VarRole::kParam);
  WindowVars w = window_vars(b, true, true);
  std::vector<IntExpr> op;
  for (int i = 0; i < b.rank(); ++i) {
    op.push_back(b.var(ax("OP", i), {0, cfg.stride.hi - 1}, VarRole::kParam));
  }
  for (int i = 0; i < b.rank(); ++i) {
    const std::string a = " (axis " + std::to_string(i) + ")";
    b.rule(s.out[i] == (s.in[i] - 1) * w.s[i] - 2 * w.p[i] + w.d[i] * (w.k[i] - 1) + op[i] + 1,
           "core relation" + a);
    b.rule(op[i] < w.s[i], "output_padding < stride" + a);
    b.rule(s.out[i] >= 1, "output positive" + a);
  }
  groups(b, s.c, c_out);
  b.cap(with_nc(s.n, s.c, s.in), "input elements <= max_elements");
  b.cap(with_nc(s.n, c_out, s.out), "output elements <= max_elements");
  const int r = b.rank();
  b.slot("dims", concat({"N", "C_in"}, s.in_names));
  b.slot("inch", {"C_in"}, true);
  b.slot("outch", {"C_out"}, true);
  b.slot("ksize", names("K", r));
  b.slot("stride", names("S", r));
  b.slot("pad", names("P", r));
  b.slot("dil", names("D", r));
  b.slot("outpad", names("OP", r));
  b.slot("groups", {"G"}, true);
  b.slot("out_dims", concat({"N", "C_out"}, s.out_names));
  return b.finish();
}

OperatorModel build_window_pool(Builder& b) {
  const ModelConfig& cfg = b.cfg();
  const OperatorFamily fam = b.family();
  const bool with_pad = fam != OperatorFamily::kLPPool;
  const bool with_dil = fam == OperatorFamily::kMaxPool;
  Spatial s = spatial_vars(b, {1, cfg.dim.hi + 2 * cfg.pad.hi}, VarRole::kOutputDim);
  WindowVars w = window_vars(b, with_pad, with_dil);
  for (int i = 0; i < b.rank(); ++i) {
    floor_window_axis(b, i, s.in[i], s.out[i], w.k[i], w.s[i], w.p[i], w.d[i]);
    if (with_pad) b.rule(2 * w.p[i] <= w.k[i], "2P <= K (axis " + std::to_string(i) + ")");
  }
  if (fam == OperatorFamily::kLPPool) b.var("norm", {1, kMaxLpNorm}, VarRole::kParam);
  b.cap(with_nc(s.n, s.c, s.in), "input elements <= max_elements");
  b.cap(with_nc(s.n, s.c, s.out), "output elements <= max_elements");
  const int r = b.rank();
  b.slot("dims", concat({"N", "C_in"}, s.in_names));
  b.slot("ksize", names("K", r));
  b.slot("stride", names("S", r));
  if (with_pad) b.slot("pad", names("P", r));
  if (with_dil) b.slot("dil", names("D", r));
  if (fam == OperatorFamily::kLPPool) b.slot("norm", {"norm"}, true);
  b.slot("out_dims", concat({"N", "C_in"}, s.out_names));
  return b.finish();
}

OperatorModel build_adaptive_pool(Builder& b) {
  const ModelConfig& cfg = b.cfg();
  // The requested output size is an API argument, hence a parameter.
  Spatial s = spatial_vars(b, cfg.dim, VarRole::kParam);
  b.cap(with_nc(s.n, s.c, s.in), "input elements <= max_elements");
  b.cap(with_nc(s.n, s.c, s.out), "output elements <= max_elements");
  b.slot("dims", concat({"N", "C_in"}, s.in_names));
  b.slot("out_dims", concat({"N", "C_in"}, s.out_names));
  return b.finish();
}

OperatorModel build_fractional_pool(Builder& b) {
  const ModelConfig& cfg = b.cfg();
  Spatial s = spatial_vars(b, {1, std::max<int64_t>(1, cfg.dim.hi - 1)}, VarRole::kParam);
  for (int i = 0; i < b.rank(); ++i) {
    const std::string a = " (axis " + std::to_string(i) + ")";
    IntExpr k = b.var(ax("K", i), cfg.ksize, VarRole::kParam);
    b.rule(s.out[i] < s.in[i], "output smaller than input" + a);
    b.rule(k <= s.in[i] - s.out[i] + 1, "kernel fits (K <= H_in - H_out + 1)" + a);
  }
  b.cap(with_nc(s.n, s.c, s.in), "input elements <= max_elements");
  b.cap(with_nc(s.n, s.c, s.out), "output elements <= max_elements");
  b.slot("dims", concat({"N", "C_in"}, s.in_names));
  b.slot("ksize", names("K", b.rank()));
  b.slot("out_dims", concat({"N", "C_in"}, s.out_names));
  return b.finish();
}

OperatorModel build_pad(Builder& b) {
  const ModelConfig& cfg = b.cfg();
  const OperatorFamily fam = b.family();
  Spatial s = spatial_vars(b, {1, cfg.dim.hi + 2 * cfg.pad.hi}, VarRole::kOutputDim);
  std::vector<std::string> pad_names;
  for (int i = 0; i < b.rank(); ++i) {
    const std::string a = " (axis " + std::to_string(i) + ")";
    IntExpr pl = b.var(ax("pl", i), cfg.pad, VarRole::kParam);
    IntExpr pr = b.var(ax("pr", i), cfg.pad, VarRole::kParam);
    pad_names.push_back(ax("pl", i));
    pad_names.push_back(ax("pr", i));
    b.rule(s.out[i] == s.in[i] + pl + pr, "padded size" + a);
    if (fam == OperatorFamily::kReflectionPad) {
      b.rule(pl < s.in[i], "pl < H_in" + a);
      b.rule(pr < s.in[i], "pr < H_in" + a);
    } else if (fam == OperatorFamily::kCircularPad) {
      b.rule(pl <= s.in[i], "pl <= H_in" + a);
      b.rule(pr <= s.in[i], "pr <= H_in" + a);
    }
  }
  b.cap(with_nc(s.n, s.c, s.in), "input elements <= max_elements");
  b.cap(with_nc(s.n, s.c, s.out), "output elements <= max_elements");
  b.slot("dims", concat({"N", "C_in"}, s.in_names));
  b.slot("pad", pad_names);
  b.slot("out_dims", concat({"N", "C_in"}, s.out_names));
  return b.finish();
}

std::vector<IntExpr> dim_vars(Builder& b, std::string_view base, Bounds bounds, VarRole role) {
  std::vector<IntExpr> out;
  for (int i = 0; i < kTensorRank; ++i) out.push_back(b.var(ax(base, i), bounds, role));
  return out;
}

OperatorModel build_elem_unary(Builder& b) {
  const ModelConfig& cfg = b.cfg();
  auto d = dim_vars(b, "d", cfg.dim, VarRole::kInputDim);
  auto o = dim_vars(b, "o", cfg.dim, VarRole::kOutputDim);
  b.var("opcode", {0, static_cast<int64_t>(unary_opcodes().size()) - 1}, VarRole::kParam);
  for (int i = 0; i < kTensorRank; ++i) {
    b.rule(o[i] == d[i], "output equals input (axis " + std::to_string(i) + ")");
  }
  b.cap(d, "input elements <= max_elements");
  b.slot("dims", names("d", kTensorRank));
  b.slot("opcode", {"opcode"}, true);
  b.slot("out_dims", names("o", kTensorRank));
  return b.finish();
}

OperatorModel build_elem_binary(Builder& b) {
  const ModelConfig& cfg = b.cfg();
  auto x = dim_vars(b, "a", cfg.dim, VarRole::kInputDim);
  auto y = dim_vars(b, "b", cfg.dim, VarRole::kInputDim);
  auto o = dim_vars(b, "o", cfg.dim, VarRole::kOutputDim);
  b.var("opcode", {0, static_cast<int64_t>(binary_opcodes().size()) - 1}, VarRole::kParam);
  for (int i = 0; i < kTensorRank; ++i) {
    const std::string a = " (axis " + std::to_string(i) + ")";
    // (a == b) or (a == 1) or (b == 1)
    b.rule((x[i] - y[i]) * (x[i] - 1) * (y[i] - 1) == 0, "broadcast compatible" + a);
    b.rule(o[i] >= x[i], "output is max" + a);
    b.rule(o[i] >= y[i], "output is max" + a);
    b.rule((o[i] - x[i]) * (o[i] - y[i]) == 0, "output is max" + a);
  }
  b.cap(x, "input elements <= max_elements");
  b.cap(y, "input elements <= max_elements");
  b.cap(o, "output elements <= max_elements");
  b.slot("dims", names("a", kTensorRank));
  b.slot("dims_b", names("b", kTensorRank));
  b.slot("opcode", {"opcode"}, true);
  b.slot("out_dims", names("o", kTensorRank));
  return b.finish();
}

OperatorModel build_matmul(Builder& b) {
  const ModelConfig& cfg = b.cfg();
  const bool batched = b.family() == OperatorFamily::kBMM;
  IntExpr bt = 1, bt_b = 1, o_bt = 1;
  if (batched) {
    bt = b.var("batch", cfg.batch, VarRole::kInputDim);
    bt_b = b.var("batch_b", cfg.batch, VarRole::kInputDim);
  }
  IntExpr rows = b.var("rows", cfg.dim, VarRole::kInputDim);
  IntExpr inner = b.var("inner", cfg.dim, VarRole::kInputDim);
  IntExpr inner_b = b.var("inner_b", cfg.dim, VarRole::kInputDim);
  IntExpr cols = b.var("cols", cfg.dim, VarRole::kInputDim);
  if (batched) o_bt = b.var("o_batch", cfg.batch, VarRole::kOutputDim);
  IntExpr o_rows = b.var("o_rows", cfg.dim, VarRole::kOutputDim);
  IntExpr o_cols = b.var("o_cols", cfg.dim, VarRole::kOutputDim);
  b.rule(inner == inner_b, "inner dims match");
  if (batched) {
    b.rule(bt == bt_b, "batch dims match");
    b.rule(o_bt == bt, "output batch");
  }
  b.rule(o_rows == rows, "output rows");
  b.rule(o_cols == cols, "output cols");
  b.cap({bt, rows, inner}, "input elements <= max_elements");
  b.cap({bt, inner_b, cols}, "input elements <= max_elements");
  b.cap({bt, rows, cols}, "output elements <= max_elements");
  if (batched) {
    b.slot("dims", {"batch", "rows", "inner"});
    b.slot("dims_b", {"batch_b", "inner_b", "cols"});
    b.slot("out_dims", {"o_batch", "o_rows", "o_cols"});
  } else {
    b.slot("dims", {"rows", "inner"});
    b.slot("dims_b", {"inner_b", "cols"});
    b.slot("out_dims", {"o_rows", "o_cols"});
  }
  return b.finish();
}

OperatorModel build_concat(Builder& b) {
  const ModelConfig& cfg = b.cfg();
  auto d = dim_vars(b, "d", cfg.dim, VarRole::kInputDim);
  IntExpr axis = b.var("axis", {0, kTensorRank - 1}, VarRole::kParam);
  std::vector<IntExpr> parts;
  for (int j = 0; j < kMaxConcatParts; ++j) {
    // The first two tensors always exist; later ones are absent when 0.
    parts.push_back(b.var(ax("L", j), {j < 2 ? cfg.dim.lo : 0, cfg.dim.hi}, VarRole::kInputDim));
  }
  auto o = dim_vars(b, "o", {1, kMaxConcatParts * cfg.dim.hi}, VarRole::kOutputDim);
  std::vector<IntExpr> present;
  for (int j = 2; j < kMaxConcatParts; ++j) {
    const std::string u = ax("u", j);
    IntExpr uj = b.var(u, {0, 1}, VarRole::kAuxiliary);
    present.push_back(uj);
    const std::string label = "part present iff nonzero (part " + std::to_string(j) + ")";
    b.rule(parts[j] >= uj, label);
    b.rule(parts[j] <= IntExpr(cfg.dim.hi) * uj, label);
    b.derive(u, [name = ax("L", j)](const Assignment& a) -> int64_t {
      return get(a, name) > 0 ? 1 : 0;
    });
  }
  for (size_t j = 1; j < present.size(); ++j) {
    b.rule(present[j] <= present[j - 1], "tensors are contiguous");
  }
  std::vector<IntExpr> onehot;
  for (int k = 0; k < kTensorRank; ++k) {
    const std::string e = ax("e", k);
    onehot.push_back(b.var(e, {0, 1}, VarRole::kAuxiliary));
    b.derive(e, [k](const Assignment& a) -> int64_t { return get(a, "axis") == k ? 1 : 0; });
  }
  b.rule(sum(onehot) == 1, "axis one-hot");
  std::vector<IntExpr> weighted;
  for (int k = 1; k < kTensorRank; ++k) weighted.push_back(IntExpr(k) * onehot[k]);
  b.rule(axis == sum(weighted), "axis one-hot");
  const IntExpr total = sum(parts);
  for (int k = 0; k < kTensorRank; ++k) {
    const std::string a = " (axis " + std::to_string(k) + ")";
    b.rule(o[k] - d[k] == onehot[k] * (total - d[k]), "output dims" + a);
    b.rule(onehot[k] * (d[k] - 1) == 0, "concat axis base dim is 1" + a);
  }
  b.cap(o, "output elements <= max_elements");
  b.slot("dims", names("d", kTensorRank));
  b.slot("axis", {"axis"}, true);
  b.slot("parts", names("L", kMaxConcatParts));
  b.slot("out_dims", names("o", kTensorRank));
  return b.finish();
}

}  // namespace

std::string_view to_string(OperatorFamily f) { return info(f).name; }

std::optional<OperatorFamily> parse_family(std::string_view name) {
  for (const auto& i : kFamilies) {
    if (i.name == name) return i.family;
  }
  return std::nullopt;
}

const std::vector<OperatorFamily>& all_families() {
  static const std::vector<OperatorFamily> kAll = [] {
    std::vector<OperatorFamily> v;
    for (const auto& i : kFamilies) v.push_back(i.family);
    return v;
  }();
  return kAll;
}

bool is_spatial(OperatorFamily f) { return info(f).max_rank > 0; }

bool supports_rank(OperatorFamily f, int rank) {
  const auto& i = info(f);
  if (i.max_rank == 0) return rank == 0;
  return rank >= i.min_rank && rank <= i.max_rank;
}

std::string OperatorKind::name() const {
  std::string n(to_string(family));
  if (is_spatial(family)) n += std::to_string(rank) + "d";
  return n;
}

std::optional<OperatorKind> parse_operator(std::string_view name) {
  if (auto f = parse_family(name); f && !is_spatial(*f)) return OperatorKind{*f, 0};
  if (name.size() >= 3 && name.back() == 'd') {
    const char digit = name[name.size() - 2];
    if (digit >= '1' && digit <= '3') {
      auto f = parse_family(name.substr(0, name.size() - 2));
      const int rank = digit - '0';
      if (f && supports_rank(*f, rank)) return OperatorKind{*f, rank};
    }
  }
  return std::nullopt;
}

std::vector<OperatorKind> all_operator_kinds() {
  std::vector<OperatorKind> out;
  for (const auto& i : kFamilies) {
    if (i.max_rank == 0) {
      out.push_back({i.family, 0});
    } else {
      for (int r = i.min_rank; r <= i.max_rank; ++r) out.push_back({i.family, r});
    }
  }
  return out;
}

const std::vector<std::string>& unary_opcodes() {
  static const std::vector<std::string> kOps = {"relu", "elu", "gelu", "sigmoid", "tanh", "abs",
                                                "sin",  "cos", "sqrt", "exp",     "log"};
  return kOps;
}

const std::vector<std::string>& binary_opcodes() {
  static const std::vector<std::string> kOps = {"add", "sub",       "mul",       "div",
                                                "pow", "remainder", "logaddexp", "atan2"};
  return kOps;
}

void ModelConfig::check() const {
  check_bounds(dim, "dim");
  check_bounds(chan, "chan");
  check_bounds(batch, "batch");
  check_bounds(ksize, "ksize");
  check_bounds(stride, "stride");
  check_bounds(pad, "pad");
  check_bounds(dil, "dil");
  if (dim.lo < 1 || chan.lo < 1 || batch.lo < 1 || ksize.lo < 1 || stride.lo < 1 || dil.lo < 1 ||
      pad.lo < 0) {
    throw ConfigError("model config: dims, channels, batch, ksize, stride and dil must be >= 1, pad >= 0");
  }
  if (max_elements && *max_elements < 1) throw ConfigError("model config: max_elements must be >= 1");
}

ModelConfig ModelConfig::permissive() {
  constexpr int64_t kDim = (int64_t{1} << 31) - 1;
  constexpr int64_t kParam = int64_t{1} << 20;
  ModelConfig c;
  c.dim = {1, kDim};
  c.chan = {1, kDim};
  c.batch = {1, kDim};
  c.ksize = {1, kParam};
  c.stride = {1, kParam};
  c.pad = {0, kParam};
  c.dil = {1, kParam};
  return c;
}

int64_t scalar_param(const Params& p, std::string_view key) {
  auto it = p.find(key);
  if (it == p.end() || !std::holds_alternative<int64_t>(it->second)) {
    throw StructuralError("missing scalar parameter '" + std::string(key) + "'");
  }
  return std::get<int64_t>(it->second);
}

const std::vector<int64_t>& array_param(const Params& p, std::string_view key) {
  auto it = p.find(key);
  if (it == p.end() || !std::holds_alternative<std::vector<int64_t>>(it->second)) {
    throw StructuralError("missing array parameter '" + std::string(key) + "'");
  }
  return std::get<std::vector<int64_t>>(it->second);
}

Params OperatorModel::to_params(const Assignment& a) const {
  Params out;
  for (const auto& s : layout) {
    if (s.scalar) {
      out.emplace(s.key, a.at(s.vars.front()));
    } else {
      std::vector<int64_t> v;
      v.reserve(s.vars.size());
      for (const auto& name : s.vars) v.push_back(a.at(name));
      out.emplace(s.key, std::move(v));
    }
  }
  return out;
}

Assignment OperatorModel::from_params(const Params& p, std::vector<Violation>& problems) const {
  Assignment a;
  const size_t before = problems.size();
  std::set<std::string, std::less<>> known;
  for (const auto& s : layout) {
    known.insert(s.key);
    auto it = p.find(s.key);
    if (it == p.end()) {
      problems.push_back({"missing parameter", "'" + s.key + "' is required by " + kind.name()});
      continue;
    }
    std::vector<int64_t> values;
    if (s.scalar) {
      if (!std::holds_alternative<int64_t>(it->second)) {
        problems.push_back({"malformed parameter", "'" + s.key + "' must be an integer"});
        continue;
      }
      values.push_back(std::get<int64_t>(it->second));
    } else {
      if (!std::holds_alternative<std::vector<int64_t>>(it->second) ||
          std::get<std::vector<int64_t>>(it->second).size() != s.vars.size()) {
        problems.push_back({"malformed parameter", "'" + s.key + "' must be an array of " +
                                                       std::to_string(s.vars.size()) + " integers"});
        continue;
      }
      values = std::get<std::vector<int64_t>>(it->second);
    }
    for (size_t i = 0; i < s.vars.size(); ++i) {
      auto [pos, inserted] = a.emplace(s.vars[i], values[i]);
      if (!inserted && pos->second != values[i]) {
        problems.push_back({"inconsistent parameter",
                            "'" + s.key + "' disagrees with another parameter on " + s.vars[i]});
      }
    }
  }
  for (const auto& [key, value] : p) {
    if (known.count(key) == 0) {
      problems.push_back({"unexpected parameter", "'" + key + "' is not used by " + kind.name()});
    }
  }
  if (problems.size() == before) {
    for (const auto& [name, fn] : derive) a[name] = fn(a);
  }
  return a;
}

OperatorModel build_model(OperatorKind kind, const ModelConfig& config) {
  config.check();
  if (!supports_rank(kind.family, kind.rank)) {
    throw ConfigError("unsupported operator: " + std::string(to_string(kind.family)) + " at rank " +
                      std::to_string(kind.rank));
  }
  Builder b(kind, config);
  switch (kind.family) {
    case OperatorFamily::kConv: return build_conv(b);
    case OperatorFamily::kConvTranspose: return build_conv_transpose(b);
    case OperatorFamily::kMaxPool:
    case OperatorFamily::kAvgPool:
    case OperatorFamily::kLPPool: return build_window_pool(b);
    case OperatorFamily::kFractionalMaxPool: return build_fractional_pool(b);
    case OperatorFamily::kAdaptiveAvgPool:
    case OperatorFamily::kAdaptiveMaxPool: return build_adaptive_pool(b);
    case OperatorFamily::kReflectionPad:
    case OperatorFamily::kReplicationPad:
    case OperatorFamily::kConstantPad:
    case OperatorFamily::kCircularPad:
    case OperatorFamily::kZeroPad: return build_pad(b);
    case OperatorFamily::kElemUnary: return build_elem_unary(b);
    case OperatorFamily::kElemBinary: return build_elem_binary(b);
    case OperatorFamily::kMatMul:
    case OperatorFamily::kBMM: return build_matmul(b);
    case OperatorFamily::kConcat: return build_concat(b);
  }
  throw ConfigError("unsupported operator family");
}

}  // namespace opfuzz
