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

#ifndef OPFUZZ_MATERIALIZE_HPP_
#define OPFUZZ_MATERIALIZE_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "opfuzz/testcase.hpp"

namespace opfuzz {

enum class Framework { kPyTorch, kTensorFlow, kPaddlePaddle };

std::string_view to_string(Framework f);
// Accepts "pytorch"/"torch", "tensorflow"/"tf", "paddle"/"paddlepaddle".
std::optional<Framework> parse_framework(std::string_view s);
const std::vector<Framework>& all_frameworks();

// Framework-side name of a generic parameter. Throws StructuralError when the
// family does not use `generic`.
std::string map_param(std::string_view generic, OperatorFamily family, Framework target);

// Empty when `target` can express `family` at all. Parameter-dependent gaps
// (e.g. grouped transposed convolution on TensorFlow) surface at materialize.
std::optional<std::string> family_unsupported(OperatorFamily family, Framework target);

struct MaterializedScript {
  Framework target = Framework::kPyTorch;
  std::string source;
  // In the framework's own layout (TensorFlow is channels-last).
  std::vector<std::vector<int64_t>> input_shapes;
  std::vector<int64_t> output_shape;
};

struct UnsupportedOnTarget {
  std::string reason;
};

using MaterializeResult = std::variant<MaterializedScript, UnsupportedOnTarget>;

// A Python script running the single operator on the GPU device (overridable
// through the OPFUZZ_DEVICE environment variable). It prints "OK" or
// "EXCEPTION:<type>" and exits 0 only on OK. Byte-deterministic.
MaterializeResult materialize(const TestCase& tc, Framework target);

// Suggested file name: "{id}_{framework}.py".
std::string script_filename(const TestCase& tc, Framework target);

}  // namespace opfuzz

#endif  // OPFUZZ_MATERIALIZE_HPP_
