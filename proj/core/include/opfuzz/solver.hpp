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

#ifndef OPFUZZ_SOLVER_HPP_
#define OPFUZZ_SOLVER_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "opfuzz/expr.hpp"

namespace opfuzz {

// Bounded-integer constraint solver: interval (bounds) propagation to a
// fixpoint, then depth-first search that picks each decision value uniformly
// from the propagated interval and splits the remainder into the two
// sub-intervals on failure. Complete on finite domains given enough budget.

inline constexpr uint64_t kDefaultNodeBudget = 100'000;

struct Interval {
  int64_t lo = 0;
  int64_t hi = 0;

  bool fixed() const { return lo == hi; }
  bool contains(int64_t v) const { return lo <= v && v <= hi; }
  bool operator==(const Interval&) const = default;
};

using Domains = std::map<std::string, Interval, std::less<>>;

enum class SolveStatus { kSat, kUnsat, kUnknown };

std::string_view to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::kUnknown;
  Assignment assignment;  // populated iff kSat
  uint64_t nodes = 0;     // search nodes spent

  bool sat() const { return status == SolveStatus::kSat; }
  bool operator==(const SolveResult&) const = default;
};

struct SolveOptions {
  uint64_t seed = 0;
  uint64_t node_budget = kDefaultNodeBudget;
  // Optional leaf filter over complete tuples (values in model declaration
  // order). A rejected tuple is treated like a violated constraint.
  std::function<bool(std::span<const int64_t>)> reject;
};

// Refines every domain to a sound superset of the solution set, or returns
// nullopt when propagation alone proves the model unsatisfiable.
std::optional<Domains> propagate(const Model& model);

SolveResult solve(const Model& model, uint64_t seed,
                  uint64_t node_budget = kDefaultNodeBudget);
SolveResult solve(const Model& model, const SolveOptions& options);
// Same as above with additional constraints appended to the model's own.
SolveResult solve(const Model& model, std::span<const Constraint> extra,
                  const SolveOptions& options);

}  // namespace opfuzz

#endif  // OPFUZZ_SOLVER_HPP_
