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

// Generic parameter vocabulary -> framework API argument names.
//
// Names follow the public API documentation of PyTorch 2.x (torch.nn),
// TensorFlow 2.x (tf.keras.layers, tf.nn, tf.pad) and PaddlePaddle 2.6
// (paddle.nn). Shape parameters name the tensor argument that carries them;
// out_dims names the API argument when the output size is requested
// explicitly, otherwise the result tensor.

#include <array>

#include "opfuzz/error.hpp"
#include "opfuzz/materialize.hpp"

namespace opfuzz {

namespace {

using F = OperatorFamily;

enum Group : unsigned {
  kConvG = 1u << 0,
  kConvTG = 1u << 1,
  kMaxG = 1u << 2,
  kAvgG = 1u << 3,
  kLpG = 1u << 4,
  kFracG = 1u << 5,
  kAdaptG = 1u << 6,
  kPadG = 1u << 7,
  kUnaryG = 1u << 8,
  kBinaryG = 1u << 9,
  kMatG = 1u << 10,
  kBmmG = 1u << 11,
  kCatG = 1u << 12,
};

unsigned group_of(F f) {
  switch (f) {
    case F::kConv: return kConvG;
    case F::kConvTranspose: return kConvTG;
    case F::kMaxPool: return kMaxG;
    case F::kAvgPool: return kAvgG;
    case F::kLPPool: return kLpG;
    case F::kFractionalMaxPool: return kFracG;
    case F::kAdaptiveAvgPool:
    case F::kAdaptiveMaxPool: return kAdaptG;
    case F::kReflectionPad:
    case F::kReplicationPad:
    case F::kConstantPad:
    case F::kCircularPad:
    case F::kZeroPad: return kPadG;
    case F::kElemUnary: return kUnaryG;
    case F::kElemBinary: return kBinaryG;
    case F::kMatMul: return kMatG;
    case F::kBMM: return kBmmG;
    case F::kConcat: return kCatG;
  }
  return 0;
}

struct Row {
  unsigned groups;
  std::string_view generic;
  std::string_view torch;
  std::string_view tf;
  std::string_view paddle;
};

constexpr unsigned kConvLike = kConvG | kConvTG;
constexpr unsigned kWindow = kMaxG | kAvgG | kLpG;
constexpr unsigned kSpatial = kConvLike | kWindow | kFracG | kAdaptG | kPadG;

constexpr std::array<Row, 25> kTable = {{
    {kSpatial | kUnaryG, "dims", "input", "inputs", "x"},
    {kBinaryG, "dims", "input", "x", "x"},
    {kBinaryG, "dims_b", "other", "y", "y"},
    {kMatG, "dims", "input", "a", "x"},
    {kMatG, "dims_b", "other", "b", "y"},
    {kBmmG, "dims", "input", "a", "x"},
    {kBmmG, "dims_b", "mat2", "b", "y"},
    {kCatG, "dims", "tensors", "values", "x"},
    {kConvLike, "inch", "in_channels", "input_shape[-1]", "in_channels"},
    {kConvLike, "outch", "out_channels", "filters", "out_channels"},
    {kConvLike, "ksize", "kernel_size", "kernel_size", "kernel_size"},
    {kWindow, "ksize", "kernel_size", "window_shape", "kernel_size"},
    {kFracG, "ksize", "kernel_size", "ksize", "kernel_size"},
    {kConvLike | kWindow, "stride", "stride", "strides", "stride"},
    {kConvLike | kWindow, "pad", "padding", "paddings", "padding"},
    {kPadG, "pad", "padding", "paddings", "padding"},
    {kConvLike, "dil", "dilation", "dilation_rate", "dilation"},
    {kMaxG, "dil", "dilation", "dilations", "dilation"},
    {kConvLike, "groups", "groups", "groups", "groups"},
    {kConvTG, "outpad", "output_padding", "output_padding", "output_padding"},
    {kLpG, "norm", "norm_type", "norm_type", "norm_type"},
    {kUnaryG | kBinaryG, "opcode", "function", "function", "function"},
    {kCatG, "axis", "dim", "axis", "axis"},
    {kCatG, "parts", "tensors", "values", "x"},
    {kFracG | kAdaptG, "out_dims", "output_size", "output_size", "output_size"},
}};

}  // namespace

std::string map_param(std::string_view generic, OperatorFamily family, Framework target) {
  const unsigned g = group_of(family);
  for (const auto& row : kTable) {
    if ((row.groups & g) == 0 || row.generic != generic) continue;
    switch (target) {
      case Framework::kPyTorch: return std::string(row.torch);
      case Framework::kTensorFlow: return std::string(row.tf);
      case Framework::kPaddlePaddle: return std::string(row.paddle);
    }
  }
  // Output dims without an explicit API argument are the result tensor.
  if (generic == "out_dims") return "output";
  throw StructuralError("no framework name for parameter '" + std::string(generic) + "' of " +
                        std::string(to_string(family)));
}

}  // namespace opfuzz
