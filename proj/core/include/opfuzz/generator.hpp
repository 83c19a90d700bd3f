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

#ifndef OPFUZZ_GENERATOR_HPP_
#define OPFUZZ_GENERATOR_HPP_

#include <cstdint>
#include <optional>

#include "opfuzz/explorer.hpp"
#include "opfuzz/operators.hpp"
#include "opfuzz/testcase.hpp"

namespace opfuzz {

// An operator model driven by an explorer, emitting test cases.
class TestCaseGenerator {
 public:
  TestCaseGenerator(OperatorKind kind, uint64_t seed, const ModelConfig& config = {},
                    const ExplorePolicy& policy = {}, DType dtype = DType::kF32);

  // nullopt once the explorer is exhausted.
  std::optional<TestCase> next();

  const OperatorModel& model() const { return model_; }
  const Explorer& explorer() const { return explorer_; }
  uint64_t seed() const { return seed_; }

 private:
  OperatorModel model_;
  Explorer explorer_;
  uint64_t seed_;
  DType dtype_;
};

}  // namespace opfuzz

#endif  // OPFUZZ_GENERATOR_HPP_
