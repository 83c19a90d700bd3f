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

#include "opfuzz/materialize.hpp"

#include <sstream>

#include "opfuzz/error.hpp"

namespace opfuzz {

namespace {

using F = OperatorFamily;
using Shape = std::vector<int64_t>;

std::string tuple(const Shape& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s + (v.size() == 1 ? ",)" : ")");
}

std::string list(const Shape& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s + "]";
}

std::string kwarg(const std::string& name, const std::string& value) { return name + "=" + value; }

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (size_t i = 0; i < parts.size(); ++i) s += (i ? ", " : "") + parts[i];
  return s;
}

// NC(spatial) -> N(spatial)C.
Shape channels_last(const Shape& s) {
  Shape out{s[0]};
  out.insert(out.end(), s.begin() + 2, s.end());
  out.push_back(s[1]);
  return out;
}

// Generic pad pairs are ordered first spatial axis first; PyTorch and Paddle
// want the last axis first.
Shape last_axis_first(const Shape& pairs) {
  Shape out;
  for (size_t i = pairs.size(); i >= 2; i -= 2) {
    out.push_back(pairs[i - 2]);
    out.push_back(pairs[i - 1]);
  }
  return out;
}

uint32_t data_seed(const TestCase& tc) {
  return static_cast<uint32_t>(std::stoul(tc.id.substr(0, 8), nullptr, 16));
}

bool is_float(DType d) { return d == DType::kF16 || d == DType::kF32 || d == DType::kF64; }

std::string dtype_name(DType d) {
  switch (d) {
    case DType::kF16: return "float16";
    case DType::kF32: return "float32";
    case DType::kF64: return "float64";
    case DType::kI32: return "int32";
    case DType::kI64: return "int64";
  }
  return "float32";
}

// Python source accumulated line by line.
class Py {
 public:
  Py& line(const std::string& s = {}) {
    text_ << s << "\n";
    return *this;
  }
  std::string str() const { return text_.str(); }

 private:
  std::ostringstream text_;
};

struct Call {
  std::vector<Shape> inputs;        // framework layout
  std::vector<std::string> body;    // statements computing y from x0..xn
  Shape expected;                   // framework layout
};

const std::string& opcode_name(const TestCase& tc, bool binary) {
  const auto& table = binary ? binary_opcodes() : unary_opcodes();
  const int64_t op = scalar_param(tc.params, "opcode");
  if (op < 0 || op >= static_cast<int64_t>(table.size())) {
    throw StructuralError("opcode out of range");
  }
  return table[static_cast<size_t>(op)];
}

std::vector<Shape> concat_inputs(const TestCase& tc) {
  const auto& d = array_param(tc.params, "dims");
  const auto& parts = array_param(tc.params, "parts");
  const int64_t axis = scalar_param(tc.params, "axis");
  std::vector<Shape> out;
  for (int64_t len : parts) {
    if (len == 0) continue;
    Shape s = d;
    s[static_cast<size_t>(axis)] = len;
    out.push_back(s);
  }
  return out;
}

std::string names(size_t n) {
  std::vector<std::string> v;
  for (size_t i = 0; i < n; ++i) v.push_back("x" + std::to_string(i));
  return join(v);
}

// ---------------------------------------------------------------- PyTorch

// Rank-1 modules take plain ints (LPPool1d rejects 1-tuples).
std::string targ(const Shape& v) { return v.size() == 1 ? std::to_string(v[0]) : tuple(v); }

std::string torch_unary(const std::string& op) {
  if (op == "elu" || op == "gelu") return "torch.nn.functional." + op;
  return "torch." + op;
}

Call torch_call(const TestCase& tc) {
  const auto& p = tc.params;
  const F fam = tc.kind.family;
  const std::string rank = std::to_string(tc.kind.rank) + "d";
  Call c;
  c.expected = array_param(p, "out_dims");
  auto module = [&](const std::string& cls, const std::vector<std::string>& args) {
    c.body.push_back("op = torch.nn." + cls + rank + "(" + join(args) + ")");
    c.body.push_back("op = op.to(device=DEVICE, dtype=DTYPE)");
    c.body.push_back("y = op(x0)");
  };
  switch (fam) {
    case F::kConv:
    case F::kConvTranspose: {
      c.inputs = {array_param(p, "dims")};
      std::vector<std::string> args = {
          kwarg("in_channels", std::to_string(scalar_param(p, "inch"))),
          kwarg("out_channels", std::to_string(scalar_param(p, "outch"))),
          kwarg("kernel_size", targ(array_param(p, "ksize"))),
          kwarg("stride", targ(array_param(p, "stride"))),
          kwarg("padding", targ(array_param(p, "pad")))};
      if (fam == F::kConvTranspose) {
        args.push_back(kwarg("output_padding", targ(array_param(p, "outpad"))));
      }
      args.push_back(kwarg("dilation", targ(array_param(p, "dil"))));
      args.push_back(kwarg("groups", std::to_string(scalar_param(p, "groups"))));
      module(fam == F::kConv ? "Conv" : "ConvTranspose", args);
      break;
    }
    case F::kMaxPool:
      c.inputs = {array_param(p, "dims")};
      module("MaxPool", {kwarg("kernel_size", targ(array_param(p, "ksize"))),
                         kwarg("stride", targ(array_param(p, "stride"))),
                         kwarg("padding", targ(array_param(p, "pad"))),
                         kwarg("dilation", targ(array_param(p, "dil")))});
      break;
    case F::kAvgPool:
      c.inputs = {array_param(p, "dims")};
      module("AvgPool", {kwarg("kernel_size", targ(array_param(p, "ksize"))),
                         kwarg("stride", targ(array_param(p, "stride"))),
                         kwarg("padding", targ(array_param(p, "pad")))});
      break;
    case F::kLPPool:
      c.inputs = {array_param(p, "dims")};
      module("LPPool", {kwarg("norm_type", std::to_string(scalar_param(p, "norm"))),
                        kwarg("kernel_size", targ(array_param(p, "ksize"))),
                        kwarg("stride", targ(array_param(p, "stride")))});
      break;
    case F::kFractionalMaxPool: {
      c.inputs = {array_param(p, "dims")};
      const Shape& out = c.expected;
      module("FractionalMaxPool", {kwarg("kernel_size", targ(array_param(p, "ksize"))),
                                   kwarg("output_size", targ(Shape(out.begin() + 2, out.end())))});
      break;
    }
    case F::kAdaptiveAvgPool:
    case F::kAdaptiveMaxPool: {
      c.inputs = {array_param(p, "dims")};
      const Shape& out = c.expected;
      module(fam == F::kAdaptiveAvgPool ? "AdaptiveAvgPool" : "AdaptiveMaxPool",
             {kwarg("output_size", targ(Shape(out.begin() + 2, out.end())))});
      break;
    }
    case F::kReflectionPad:
    case F::kReplicationPad:
    case F::kConstantPad:
    case F::kCircularPad:
    case F::kZeroPad: {
      c.inputs = {array_param(p, "dims")};
      std::vector<std::string> args = {
          kwarg("padding", targ(last_axis_first(array_param(p, "pad"))))};
      if (fam == F::kConstantPad) args.push_back(kwarg("value", "0.0"));
      module(std::string(to_string(fam)), args);
      break;
    }
    case F::kElemUnary:
      c.inputs = {array_param(p, "dims")};
      c.body.push_back("y = " + torch_unary(opcode_name(tc, false)) + "(x0)");
      break;
    case F::kElemBinary:
      c.inputs = {array_param(p, "dims"), array_param(p, "dims_b")};
      c.body.push_back("y = torch." + opcode_name(tc, true) + "(x0, x1)");
      break;
    case F::kMatMul:
    case F::kBMM:
      c.inputs = {array_param(p, "dims"), array_param(p, "dims_b")};
      c.body.push_back(std::string("y = torch.") + (fam == F::kBMM ? "bmm" : "matmul") +
                       "(x0, x1)");
      break;
    case F::kConcat:
      c.inputs = concat_inputs(tc);
      c.body.push_back("y = torch.cat([" + names(c.inputs.size()) +
                       "], dim=" + std::to_string(scalar_param(p, "axis")) + ")");
      break;
  }
  return c;
}

// ------------------------------------------------------------- TensorFlow

std::string tf_unary(const std::string& op) {
  if (op == "relu" || op == "elu" || op == "gelu") return "tf.nn." + op;
  return "tf.math." + op;
}

std::string tf_binary(const std::string& op) {
  if (op == "sub") return "tf.math.subtract";
  if (op == "mul") return "tf.math.multiply";
  if (op == "div") return "tf.math.divide";
  if (op == "remainder") return "tf.math.floormod";
  if (op == "logaddexp") return "tf.experimental.numpy.logaddexp";
  return "tf.math." + op;
}

std::string tf_paddings(const Shape& pairs) {
  std::string s = "[[0, 0]";
  for (size_t i = 0; i + 1 < pairs.size(); i += 2) {
    s += ", [" + std::to_string(pairs[i]) + ", " + std::to_string(pairs[i + 1]) + "]";
  }
  return s + ", [0, 0]]";
}

Shape symmetric_pairs(const Shape& pad) {
  Shape out;
  for (int64_t v : pad) {
    out.push_back(v);
    out.push_back(v);
  }
  return out;
}

bool any_nonzero(const Shape& v) {
  for (int64_t x : v) {
    if (x != 0) return true;
  }
  return false;
}

std::variant<Call, UnsupportedOnTarget> tf_call(const TestCase& tc) {
  const auto& p = tc.params;
  const F fam = tc.kind.family;
  const int r = tc.kind.rank;
  const std::string rank = std::to_string(r) + "D";
  Call c;
  if (is_spatial(fam)) {
    c.inputs = {channels_last(array_param(p, "dims"))};
    c.expected = channels_last(array_param(p, "out_dims"));
  } else {
    c.expected = array_param(p, "out_dims");
  }
  switch (fam) {
    case F::kConv: {
      const Shape& pad = array_param(p, "pad");
      if (any_nonzero(pad)) {
        c.body.push_back("x0 = tf.pad(x0, " + tf_paddings(symmetric_pairs(pad)) + ")");
      }
      c.body.push_back("op = tf.keras.layers.Conv" + rank + "(" +
                       join({kwarg("filters", std::to_string(scalar_param(p, "outch"))),
                             kwarg("kernel_size", tuple(array_param(p, "ksize"))),
                             kwarg("strides", tuple(array_param(p, "stride"))),
                             kwarg("padding", "\"valid\""),
                             kwarg("dilation_rate", tuple(array_param(p, "dil"))),
                             kwarg("groups", std::to_string(scalar_param(p, "groups"))),
                             kwarg("dtype", "DTYPE")}) +
                       ")");
      c.body.push_back("y = op(x0)");
      break;
    }
    case F::kConvTranspose: {
      if (scalar_param(p, "groups") != 1) {
        return UnsupportedOnTarget{"TensorFlow transposed convolution has no groups"};
      }
      c.body.push_back("op = tf.keras.layers.Conv" + rank + "Transpose(" +
                       join({kwarg("filters", std::to_string(scalar_param(p, "outch"))),
                             kwarg("kernel_size", tuple(array_param(p, "ksize"))),
                             kwarg("strides", tuple(array_param(p, "stride"))),
                             kwarg("padding", "\"valid\""),
                             kwarg("output_padding", tuple(array_param(p, "outpad"))),
                             kwarg("dilation_rate", tuple(array_param(p, "dil"))),
                             kwarg("dtype", "DTYPE")}) +
                       ")");
      c.body.push_back("y = op(x0)");
      const Shape& pad = array_param(p, "pad");
      if (any_nonzero(pad)) {
        // Numeric padding of a transposed convolution crops the output.
        std::string crop = "y = y[:";
        for (int i = 0; i < r; ++i) {
          const std::string pi = std::to_string(pad[i]);
          crop += ", " + pi + ":y.shape[" + std::to_string(i + 1) + "] - " + pi;
        }
        c.body.push_back(crop + ", :]");
      }
      break;
    }
    case F::kMaxPool:
    case F::kAvgPool: {
      const bool max = fam == F::kMaxPool;
      const Shape& pad = array_param(p, "pad");
      if (any_nonzero(pad)) {
        c.body.push_back("x0 = tf.pad(x0, " + tf_paddings(symmetric_pairs(pad)) +
                         (max ? ", constant_values=PAD_MIN" : "") + ")");
      }
      std::vector<std::string> args = {"x0", kwarg("window_shape", tuple(array_param(p, "ksize"))),
                                       kwarg("pooling_type", max ? "\"MAX\"" : "\"AVG\""),
                                       kwarg("strides", tuple(array_param(p, "stride"))),
                                       kwarg("padding", "\"VALID\"")};
      if (max) args.push_back(kwarg("dilations", tuple(array_param(p, "dil"))));
      c.body.push_back("y = tf.nn.pool(" + join(args) + ")");
      break;
    }
    case F::kReflectionPad:
    case F::kConstantPad:
    case F::kZeroPad:
      c.body.push_back("y = tf.pad(x0, " + tf_paddings(array_param(p, "pad")) + ", mode=\"" +
                       (fam == F::kReflectionPad ? "REFLECT" : "CONSTANT") + "\")");
      break;
    case F::kElemUnary:
      c.inputs = {array_param(p, "dims")};
      c.body.push_back("y = " + tf_unary(opcode_name(tc, false)) + "(x0)");
      break;
    case F::kElemBinary:
      c.inputs = {array_param(p, "dims"), array_param(p, "dims_b")};
      c.body.push_back("y = " + tf_binary(opcode_name(tc, true)) + "(x0, x1)");
      break;
    case F::kMatMul:
    case F::kBMM:
      c.inputs = {array_param(p, "dims"), array_param(p, "dims_b")};
      c.body.push_back("y = tf.linalg.matmul(x0, x1)");
      break;
    case F::kConcat:
      c.inputs = concat_inputs(tc);
      c.body.push_back("y = tf.concat([" + names(c.inputs.size()) +
                       "], axis=" + std::to_string(scalar_param(p, "axis")) + ")");
      break;
    default:
      return UnsupportedOnTarget{*family_unsupported(fam, Framework::kTensorFlow)};
  }
  return c;
}

// ----------------------------------------------------------- PaddlePaddle

std::string paddle_unary(const std::string& op) {
  if (op == "relu" || op == "elu" || op == "gelu" || op == "sigmoid") {
    return "paddle.nn.functional." + op;
  }
  return "paddle." + op;
}

std::string paddle_binary(const std::string& op) {
  if (op == "sub") return "paddle.subtract";
  if (op == "mul") return "paddle.multiply";
  if (op == "div") return "paddle.divide";
  return "paddle." + op;
}

std::variant<Call, UnsupportedOnTarget> paddle_call(const TestCase& tc) {
  const auto& p = tc.params;
  const F fam = tc.kind.family;
  const std::string rank = std::to_string(tc.kind.rank) + "D";
  Call c;
  c.expected = array_param(p, "out_dims");
  auto module = [&](const std::string& cls, const std::vector<std::string>& args) {
    c.inputs = {array_param(p, "dims")};
    c.body.push_back("op = paddle.nn." + cls + "(" + join(args) + ")");
    c.body.push_back("y = op(x0)");
  };
  const Shape& out = c.expected;
  switch (fam) {
    case F::kConv:
    case F::kConvTranspose: {
      std::vector<std::string> args = {
          kwarg("in_channels", std::to_string(scalar_param(p, "inch"))),
          kwarg("out_channels", std::to_string(scalar_param(p, "outch"))),
          kwarg("kernel_size", list(array_param(p, "ksize"))),
          kwarg("stride", list(array_param(p, "stride"))),
          kwarg("padding", list(array_param(p, "pad")))};
      if (fam == F::kConvTranspose) {
        args.push_back(kwarg("output_padding", list(array_param(p, "outpad"))));
      }
      args.push_back(kwarg("dilation", list(array_param(p, "dil"))));
      args.push_back(kwarg("groups", std::to_string(scalar_param(p, "groups"))));
      module("Conv" + rank + (fam == F::kConv ? "" : "Transpose"), args);
      break;
    }
    case F::kMaxPool:
      for (int64_t d : array_param(p, "dil")) {
        if (d != 1) return UnsupportedOnTarget{"PaddlePaddle max pooling has no dilation"};
      }
      module("MaxPool" + rank, {kwarg("kernel_size", list(array_param(p, "ksize"))),
                                kwarg("stride", list(array_param(p, "stride"))),
                                kwarg("padding", list(array_param(p, "pad")))});
      break;
    case F::kAvgPool:
      module("AvgPool" + rank, {kwarg("kernel_size", list(array_param(p, "ksize"))),
                                kwarg("stride", list(array_param(p, "stride"))),
                                kwarg("padding", list(array_param(p, "pad"))),
                                kwarg("exclusive", "False")});
      break;
    case F::kFractionalMaxPool:
      module("FractionalMaxPool" + rank,
             {kwarg("output_size", list(Shape(out.begin() + 2, out.end()))),
              kwarg("kernel_size", list(array_param(p, "ksize")))});
      break;
    case F::kAdaptiveAvgPool:
    case F::kAdaptiveMaxPool:
      module((fam == F::kAdaptiveAvgPool ? "AdaptiveAvgPool" : "AdaptiveMaxPool") + rank,
             {kwarg("output_size", list(Shape(out.begin() + 2, out.end())))});
      break;
    case F::kReflectionPad:
    case F::kReplicationPad:
    case F::kConstantPad:
    case F::kCircularPad:
    case F::kZeroPad: {
      std::string mode = "constant";
      if (fam == F::kReflectionPad) mode = "reflect";
      if (fam == F::kReplicationPad) mode = "replicate";
      if (fam == F::kCircularPad) mode = "circular";
      std::vector<std::string> args = {
          kwarg("padding", list(last_axis_first(array_param(p, "pad")))),
          kwarg("mode", "\"" + mode + "\"")};
      if (mode == "constant") args.push_back(kwarg("value", "0.0"));
      module("Pad" + rank, args);
      break;
    }
    case F::kElemUnary:
      c.inputs = {array_param(p, "dims")};
      c.body.push_back("y = " + paddle_unary(opcode_name(tc, false)) + "(x0)");
      break;
    case F::kElemBinary:
      c.inputs = {array_param(p, "dims"), array_param(p, "dims_b")};
      c.body.push_back("y = " + paddle_binary(opcode_name(tc, true)) + "(x0, x1)");
      break;
    case F::kMatMul:
    case F::kBMM:
      c.inputs = {array_param(p, "dims"), array_param(p, "dims_b")};
      c.body.push_back(std::string("y = paddle.") + (fam == F::kBMM ? "bmm" : "matmul") +
                       "(x0, x1)");
      break;
    case F::kConcat:
      c.inputs = concat_inputs(tc);
      c.body.push_back("y = paddle.concat([" + names(c.inputs.size()) +
                       "], axis=" + std::to_string(scalar_param(p, "axis")) + ")");
      break;
    default:
      return UnsupportedOnTarget{*family_unsupported(fam, Framework::kPaddlePaddle)};
  }
  return c;
}

// ---------------------------------------------------------------- scripts

void header(Py& py, const TestCase& tc, Framework target) {
  py.line("# opfuzz test case " + tc.id)
      .line("# " + tc.kind.name() + ", dtype " + std::string(to_string(tc.dtype)) + ", " +
            std::string(to_string(target)) + ", generated by " + tc.generator_version)
      .line("import os")
      .line("import sys")
      .line()
      .line("import numpy as np");
}

void inputs(Py& py, const Call& c) {
  for (size_t i = 0; i < c.inputs.size(); ++i) {
    py.line("    x" + std::to_string(i) + " = make(" + tuple(c.inputs[i]) + ")");
  }
}

void footer(Py& py, const std::string& sync) {
  py.line()
      .line()
      .line("def main():")
      .line("    try:")
      .line("        y = run()")
      .line("        " + sync)
      .line("    except Exception as e:  # noqa: BLE001")
      // CPU allocators raise plain RuntimeError; the message is the only hint.
      .line("        msg = str(e).lower()")
      .line("        if \"out of memory\" in msg or \"can't allocate\" in msg:")
      .line("            print(\"OOM\")")
      .line("            return 1")
      .line("        print(\"EXCEPTION:\" + type(e).__name__)")
      .line("        return 1")
      .line("    if tuple(y.shape) != EXPECTED:")
      .line("        print(\"EXCEPTION:ShapeMismatch\")")
      .line("        return 1")
      .line("    print(\"OK\")")
      .line("    return 0")
      .line()
      .line()
      .line("if __name__ == \"__main__\":")
      .line("    sys.exit(main())");
}

void make_helper(Py& py, const std::string& convert) {
  py.line()
      .line()
      .line("def make(shape):")
      .line("    if IS_FLOAT:")
      .line("        data = RNG.random(shape)")
      .line("    else:")
      .line("        data = RNG.integers(0, 8, shape)")
      .line("    return " + convert);
}

std::string torch_script(const TestCase& tc, const Call& c) {
  Py py;
  header(py, tc, Framework::kPyTorch);
  const std::string seed = std::to_string(data_seed(tc));
  py.line("import torch")
      .line()
      .line("DEVICE = os.environ.get(\"OPFUZZ_DEVICE\", \"cuda\")")
      .line("DTYPE = torch." + dtype_name(tc.dtype))
      .line(std::string("IS_FLOAT = ") + (is_float(tc.dtype) ? "True" : "False"))
      .line("EXPECTED = " + tuple(c.expected))
      .line("SEED = " + seed)
      .line("RNG = np.random.default_rng(SEED)")
      .line("torch.manual_seed(SEED)");
  make_helper(py, "torch.from_numpy(data).to(device=DEVICE, dtype=DTYPE)");
  py.line().line().line("def run():");
  inputs(py, c);
  for (const auto& s : c.body) py.line("    " + s);
  py.line("    return y");
  footer(py, "if DEVICE.startswith(\"cuda\"):\n            torch.cuda.synchronize()");
  return py.str();
}

std::string tf_script(const TestCase& tc, const Call& c) {
  Py py;
  header(py, tc, Framework::kTensorFlow);
  const std::string seed = std::to_string(data_seed(tc));
  py.line("import tensorflow as tf")
      .line()
      .line("DEVICE = os.environ.get(\"OPFUZZ_DEVICE\", \"/GPU:0\")")
      .line("DTYPE = \"" + dtype_name(tc.dtype) + "\"")
      .line(std::string("IS_FLOAT = ") + (is_float(tc.dtype) ? "True" : "False"))
      .line("PAD_MIN = float(\"-inf\") if IS_FLOAT else tf.as_dtype(DTYPE).min")
      .line("EXPECTED = " + tuple(c.expected))
      .line("SEED = " + seed)
      .line("RNG = np.random.default_rng(SEED)")
      .line("tf.random.set_seed(SEED)");
  make_helper(py, "tf.constant(data, dtype=DTYPE)");
  py.line().line().line("def run():").line("    with tf.device(DEVICE):");
  for (size_t i = 0; i < c.inputs.size(); ++i) {
    py.line("        x" + std::to_string(i) + " = make(" + tuple(c.inputs[i]) + ")");
  }
  for (const auto& s : c.body) py.line("        " + s);
  py.line("    return y");
  footer(py, "tf.test.experimental.sync_devices()");
  return py.str();
}

std::string paddle_script(const TestCase& tc, const Call& c) {
  Py py;
  header(py, tc, Framework::kPaddlePaddle);
  const std::string seed = std::to_string(data_seed(tc));
  py.line("import paddle")
      .line()
      .line("DEVICE = os.environ.get(\"OPFUZZ_DEVICE\", \"gpu\")")
      .line("DTYPE = \"" + dtype_name(tc.dtype) + "\"")
      .line(std::string("IS_FLOAT = ") + (is_float(tc.dtype) ? "True" : "False"))
      .line("EXPECTED = " + tuple(c.expected))
      .line("SEED = " + seed)
      .line("RNG = np.random.default_rng(SEED)")
      .line("paddle.set_device(DEVICE)")
      .line("paddle.seed(SEED)")
      .line("if IS_FLOAT:")
      .line("    paddle.set_default_dtype(DTYPE)");
  make_helper(py, "paddle.to_tensor(data, dtype=DTYPE)");
  py.line().line().line("def run():");
  inputs(py, c);
  for (const auto& s : c.body) py.line("    " + s);
  py.line("    return y");
  footer(py, "if DEVICE.startswith(\"gpu\"):\n            paddle.device.synchronize()");
  return py.str();
}

}  // namespace

std::string_view to_string(Framework f) {
  switch (f) {
    case Framework::kPyTorch: return "pytorch";
    case Framework::kTensorFlow: return "tensorflow";
    case Framework::kPaddlePaddle: return "paddle";
  }
  return "?";
}

std::optional<Framework> parse_framework(std::string_view s) {
  if (s == "pytorch" || s == "torch") return Framework::kPyTorch;
  if (s == "tensorflow" || s == "tf") return Framework::kTensorFlow;
  if (s == "paddle" || s == "paddlepaddle") return Framework::kPaddlePaddle;
  return std::nullopt;
}

const std::vector<Framework>& all_frameworks() {
  static const std::vector<Framework> kAll = {Framework::kPyTorch, Framework::kTensorFlow,
                                              Framework::kPaddlePaddle};
  return kAll;
}

std::optional<std::string> family_unsupported(OperatorFamily family, Framework target) {
  if (target == Framework::kTensorFlow) {
    switch (family) {
      case F::kLPPool: return "TensorFlow has no LP pooling op";
      case F::kFractionalMaxPool: return "TensorFlow fractional pooling takes ratios, not sizes";
      case F::kAdaptiveAvgPool:
      case F::kAdaptiveMaxPool: return "TensorFlow has no adaptive pooling op";
      case F::kReplicationPad: return "tf.pad has no replicate mode";
      case F::kCircularPad: return "tf.pad has no circular mode";
      default: return std::nullopt;
    }
  }
  if (target == Framework::kPaddlePaddle && family == F::kLPPool) {
    return "PaddlePaddle has no LP pooling layer";
  }
  return std::nullopt;
}

MaterializeResult materialize(const TestCase& tc, Framework target) {
  if (auto why = family_unsupported(tc.kind.family, target)) return UnsupportedOnTarget{*why};
  MaterializedScript out;
  out.target = target;
  Call call;
  if (target == Framework::kPyTorch) {
    call = torch_call(tc);
  } else {
    auto r = target == Framework::kTensorFlow ? tf_call(tc) : paddle_call(tc);
    if (auto* u = std::get_if<UnsupportedOnTarget>(&r)) return *u;
    call = std::get<Call>(std::move(r));
  }
  switch (target) {
    case Framework::kPyTorch: out.source = torch_script(tc, call); break;
    case Framework::kTensorFlow: out.source = tf_script(tc, call); break;
    case Framework::kPaddlePaddle: out.source = paddle_script(tc, call); break;
  }
  out.input_shapes = call.inputs;
  out.output_shape = call.expected;
  return out;
}

std::string script_filename(const TestCase& tc, Framework target) {
  return tc.id + "_" + std::string(to_string(target)) + ".py";
}

}  // namespace opfuzz
