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

#include "opfuzz/explorer.hpp"

#include <algorithm>
#include <map>

#include "opfuzz/error.hpp"

namespace opfuzz {

void ExplorePolicy::check() const {
  if (bucket_count < 2) throw ConfigError("explore policy: bucket_count must be >= 2");
  if (max_exclusions_per_var < 1) {
    throw ConfigError("explore policy: max_exclusions_per_var must be >= 1");
  }
  if (node_budget < 1) throw ConfigError("explore policy: node_budget must be >= 1");
}

size_t Explorer::TupleHash::operator()(const std::vector<int64_t>& t) const {
  uint64_t h = 0x243f6a8885a308d3ULL;
  for (int64_t v : t) h = splitmix64(h ^ static_cast<uint64_t>(v));
  return static_cast<size_t>(h);
}

Explorer::Explorer(Model model, uint64_t seed, ExplorePolicy policy)
    : model_(std::move(model)), policy_(policy), seed_(seed), rng_(splitmix64(seed)) {
  policy_.check();
  model_.check_well_formed();
  const auto& vars = model_.vars();
  for (size_t i = 0; i < vars.size(); ++i) {
    const bool decision = vars[i].role == VarRole::kParam || vars[i].role == VarRole::kInputDim;
    if (decision && vars[i].lo < vars[i].hi) candidates_.push_back(i);
  }
}

std::vector<Constraint> Explorer::exclusion_constraints() const {
  std::vector<Constraint> out;
  out.reserve(2 * exclusions_.size());
  for (const auto& e : exclusions_) {
    Constraint ne = IntExpr::var(e.var) != IntExpr(e.value);
    ne.label = "exclude " + e.var;
    out.push_back(std::move(ne));
    out.push_back(hash_bucket_ne(e.var, e.value, policy_.bucket_count));
  }
  return out;
}

void Explorer::exclude(const std::string& var, int64_t value) {
  const auto on_var = std::count_if(exclusions_.begin(), exclusions_.end(),
                                    [&](const Exclusion& e) { return e.var == var; });
  if (on_var >= static_cast<long>(policy_.max_exclusions_per_var)) {
    auto oldest = std::find_if(exclusions_.begin(), exclusions_.end(),
                               [&](const Exclusion& e) { return e.var == var; });
    exclusions_.erase(oldest);
  }
  exclusions_.push_back({var, value});
}

void Explorer::full_reset() {
  exclusions_.clear();
  ++full_resets_;
  rng_.seed(splitmix64(seed_ ^ splitmix64(full_resets_)));
  reset_since_emit_ = true;
}

bool Explorer::restart() {
  if (exhausted_) return false;
  ++restarts_;
  if (policy_.restart == RestartPolicy::kDropVar && !exclusions_.empty()) {
    // Most-constrained variable; ties go to the one excluded first.
    std::map<std::string, int> count;
    for (const auto& e : exclusions_) ++count[e.var];
    const std::string* worst = nullptr;
    int best = 0;
    for (const auto& e : exclusions_) {
      if (count[e.var] > best) {
        best = count[e.var];
        worst = &e.var;
      }
    }
    const std::string drop = *worst;
    std::erase_if(exclusions_, [&](const Exclusion& e) { return e.var == drop; });
    return true;
  }
  if (reset_since_emit_ && exclusions_.empty()) {
    exhausted_ = true;
    return false;
  }
  full_reset();
  return true;
}

std::optional<Assignment> Explorer::next() {
  if (exhausted_) return std::nullopt;
  if (current_ && !candidates_.empty()) {
    const auto& decl = model_.vars()[candidates_[uniform_below(rng_, candidates_.size())]];
    exclude(decl.name, current_->at(decl.name));
  }
  SolveOptions opts;
  opts.node_budget = policy_.node_budget;
  opts.reject = [this](std::span<const int64_t> t) {
    return seen_.count(std::vector<int64_t>(t.begin(), t.end())) > 0;
  };
  while (true) {
    opts.seed = rng_();
    const auto extra = exclusion_constraints();
    ++solves_;
    SolveResult r = solve(model_, extra, opts);
    if (r.sat()) {
      std::vector<int64_t> tuple;
      tuple.reserve(model_.vars().size());
      for (const auto& v : model_.vars()) tuple.push_back(r.assignment.at(v.name));
      seen_.insert(std::move(tuple));
      current_ = r.assignment;
      reset_since_emit_ = false;
      ++emitted_;
      return std::move(r.assignment);
    }
    if (!restart()) return std::nullopt;
  }
}

}  // namespace opfuzz
