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

#include "opfuzz/generator.hpp"

namespace opfuzz {

TestCaseGenerator::TestCaseGenerator(OperatorKind kind, uint64_t seed, const ModelConfig& config,
                                     const ExplorePolicy& policy, DType dtype)
    : model_(build_model(kind, config)),
      explorer_(model_.model, seed, policy),
      seed_(seed),
      dtype_(dtype) {}

std::optional<TestCase> TestCaseGenerator::next() {
  auto a = explorer_.next();
  if (!a) return std::nullopt;
  return make_testcase(model_.kind, model_.to_params(*a), dtype_, seed_, explorer_.emitted() - 1);
}

}  // namespace opfuzz
