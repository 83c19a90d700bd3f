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

#ifndef OPFUZZ_EXPLORER_HPP_
#define OPFUZZ_EXPLORER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "opfuzz/expr.hpp"
#include "opfuzz/random.hpp"
#include "opfuzz/solver.hpp"

namespace opfuzz {

enum class RestartPolicy {
  kDropVar,    // drop exclusions of the most-constrained variable first
  kFullReset,  // clear everything immediately
};

struct ExplorePolicy {
  uint32_t bucket_count = 64;
  // Oldest exclusion pair on a variable is dropped once it has this many.
  uint32_t max_exclusions_per_var = 16;
  RestartPolicy restart = RestartPolicy::kDropVar;
  uint64_t node_budget = kDefaultNodeBudget;

  // Throws ConfigError.
  void check() const;
};

// One exclusion step: Ne(var, value) plus HashBucketNe(var, value).
struct Exclusion {
  std::string var;
  int64_t value = 0;
  bool operator==(const Exclusion&) const = default;
};

// Re-solves a model under accumulating exclusion and hash-bucket constraints,
// emitting pairwise-distinct assignments until the model is exhausted.
class Explorer {
 public:
  Explorer(Model model, uint64_t seed, ExplorePolicy policy = {});

  // Next fresh assignment, or nullopt once exhausted.
  std::optional<Assignment> next();

  // Applies the restart policy once. Returns false when nothing is left to
  // relax (the state is then exhausted).
  bool restart();

  const Model& model() const { return model_; }
  const ExplorePolicy& policy() const { return policy_; }
  // Exclusions currently in force, in insertion order.
  const std::vector<Exclusion>& exclusions() const { return exclusions_; }
  // The constraint form of exclusions().
  std::vector<Constraint> exclusion_constraints() const;

  bool exhausted() const { return exhausted_; }
  uint64_t emitted() const { return emitted_; }
  uint64_t restarts() const { return restarts_; }
  uint64_t full_resets() const { return full_resets_; }
  uint64_t solves() const { return solves_; }

 private:
  struct TupleHash {
    size_t operator()(const std::vector<int64_t>& t) const;
  };

  void exclude(const std::string& var, int64_t value);
  void full_reset();

  Model model_;
  ExplorePolicy policy_;
  uint64_t seed_;
  Rng rng_;
  std::vector<size_t> candidates_;  // decision variables eligible for exclusion
  std::vector<Exclusion> exclusions_;
  std::unordered_set<std::vector<int64_t>, TupleHash> seen_;
  std::optional<Assignment> current_;
  bool reset_since_emit_ = false;
  bool exhausted_ = false;
  uint64_t emitted_ = 0;
  uint64_t restarts_ = 0;
  uint64_t full_resets_ = 0;
  uint64_t solves_ = 0;
};

}  // namespace opfuzz

#endif  // OPFUZZ_EXPLORER_HPP_
