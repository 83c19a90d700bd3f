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

#include <benchmark/benchmark.h>

#include "opfuzz/explorer.hpp"
#include "opfuzz/generator.hpp"
#include "opfuzz/operators.hpp"

namespace opfuzz {
namespace {

void BM_ExplorerNext(benchmark::State& state) {
  const auto kinds = all_operator_kinds();
  const OperatorKind kind = kinds[static_cast<size_t>(state.range(0))];
  Explorer ex(build_model(kind).model, 1);
  for (auto _ : state) {
    auto a = ex.next();
    if (!a) {
      state.SkipWithError("explorer exhausted");
      break;
    }
    benchmark::DoNotOptimize(a);
  }
  state.SetLabel(kind.name());
}
BENCHMARK(BM_ExplorerNext)->DenseRange(0, static_cast<int>(all_operator_kinds().size()) - 1);

void BM_GenerateAndValidate(benchmark::State& state) {
  TestCaseGenerator gen({OperatorFamily::kConv, 2}, 1);
  for (auto _ : state) {
    auto tc = gen.next();
    benchmark::DoNotOptimize(validate(*tc));
  }
}
BENCHMARK(BM_GenerateAndValidate);

}  // namespace
}  // namespace opfuzz
