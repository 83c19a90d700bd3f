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

#include "opfuzz/solver.hpp"

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "opfuzz/error.hpp"
#include "opfuzz/hash.hpp"
#include "opfuzz/random.hpp"

namespace opfuzz {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kSat: return "sat";
    case SolveStatus::kUnsat: return "unsat";
    case SolveStatus::kUnknown: return "unknown";
  }
  return "?";
}

namespace {

// Magnitude past which interval bounds are treated as unbounded. Real
// bounds stay far below this; saturated intervals are never used to narrow.
constexpr i128 kInf = static_cast<i128>(1) << 120;

struct Iv {
  i128 lo;
  i128 hi;
  bool empty() const { return lo > hi; }
  bool saturated() const { return lo <= -kInf || hi >= kInf; }
};

i128 clamp(i128 v) { return v > kInf ? kInf : (v < -kInf ? -kInf : v); }

i128 sat_mul(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) {
    return ((a < 0) != (b < 0)) ? -kInf : kInf;
  }
  return clamp(r);
}

Iv add(Iv a, Iv b) { return {clamp(a.lo + b.lo), clamp(a.hi + b.hi)}; }
Iv sub(Iv a, Iv b) { return {clamp(a.lo - b.hi), clamp(a.hi - b.lo)}; }
Iv neg(Iv a) { return {-a.hi, -a.lo}; }
Iv mul(Iv a, Iv b) {
  const i128 c[4] = {sat_mul(a.lo, b.lo), sat_mul(a.lo, b.hi),
                     sat_mul(a.hi, b.lo), sat_mul(a.hi, b.hi)};
  return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}
Iv meet(Iv a, Iv b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
i128 ceil_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
  return q;
}

enum class Quot { kNoInfo, kEmpty, kInterval };

// Integer x with x*y in z for some y in ys.
Quot quotient(Iv z, Iv ys, Iv& out) {
  const bool z_has_zero = z.lo <= 0 && 0 <= z.hi;
  const bool y_has_zero = ys.lo <= 0 && 0 <= ys.hi;
  if (z_has_zero && y_has_zero) return Quot::kNoInfo;
  if (z.saturated() || ys.saturated()) return Quot::kNoInfo;
  Iv parts[2];
  int n = 0;
  if (ys.hi >= 1) parts[n++] = {std::max<i128>(ys.lo, 1), ys.hi};
  if (ys.lo <= -1) parts[n++] = {ys.lo, std::min<i128>(ys.hi, -1)};
  if (n == 0) return Quot::kEmpty;  // y == 0 but z excludes 0
  out = {kInf, -kInf};
  for (int p = 0; p < n; ++p) {
    for (i128 zv : {z.lo, z.hi}) {
      for (i128 yv : {parts[p].lo, parts[p].hi}) {
        out.lo = std::min(out.lo, ceil_div(zv, yv));
        out.hi = std::max(out.hi, floor_div(zv, yv));
      }
    }
  }
  return out.empty() ? Quot::kEmpty : Quot::kInterval;
}

struct CNode {
  IntExpr::Kind kind;
  int a = -1;
  int b = -1;
  int var = -1;
  i128 value = 0;
};

struct CCon {
  bool hash = false;
  RelOp op = RelOp::kEq;
  int lhs = -1;
  int rhs = -1;
  std::vector<int> postorder;  // every node of both trees, children first
  // HashBucketNe
  int var = -1;
  uint32_t bucket_count = 0;
  uint32_t excluded_bucket = 0;
};

class Compiled {
 public:
  Compiled(const Model& model, std::span<const Constraint> extra) {
    model.check_well_formed();
    const auto& vars = model.vars();
    for (size_t i = 0; i < vars.size(); ++i) {
      init_.push_back({vars[i].lo, vars[i].hi});
      roles_.push_back(vars[i].role);
    }
    watchers_.resize(vars.size());
    for (const auto& c : model.constraints()) add_constraint(model, c);
    for (const auto& c : extra) add_constraint(model, c);
    fwd_.resize(nodes_.size());
  }

  size_t num_vars() const { return init_.size(); }
  const std::vector<Iv>& initial() const { return init_; }
  VarRole role(size_t i) const { return roles_[i]; }

  // Propagates to fixpoint starting from the constraints watching `seed_var`
  // (all constraints when seed_var < 0). Returns false on conflict.
  bool propagate(std::vector<Iv>& dom, int seed_var) {
    dom_ = &dom;
    std::vector<int> queue;
    std::vector<char> queued(cons_.size(), 0);
    auto enqueue_var = [&](int v) {
      for (int c : watchers_[v]) {
        if (!queued[c]) {
          queued[c] = 1;
          queue.push_back(c);
        }
      }
    };
    if (seed_var < 0) {
      for (size_t c = 0; c < cons_.size(); ++c) {
        queued[c] = 1;
        queue.push_back(static_cast<int>(c));
      }
    } else {
      enqueue_var(seed_var);
    }
    // Cap on revisions: stopping early is sound (domains only ever shrink),
    // it just leaves some pruning to the search.
    size_t budget = 64 * cons_.size() + 4096;
    size_t head = 0;
    while (head < queue.size() && budget-- > 0) {
      const int c = queue[head++];
      queued[c] = 0;
      changed_.clear();
      if (!revise(cons_[c])) return false;
      for (int v : changed_) enqueue_var(v);
      if (head > 4096 && head * 2 > queue.size()) {
        queue.erase(queue.begin(), queue.begin() + static_cast<long>(head));
        head = 0;
      }
    }
    return true;
  }

  // Exact check of every constraint once all domains are singletons.
  bool holds(std::vector<Iv>& dom) {
    dom_ = &dom;
    for (const auto& c : cons_) {
      if (c.hash) {
        if (bucket(static_cast<int64_t>(dom[c.var].lo), c.bucket_count) ==
            c.excluded_bucket) {
          return false;
        }
        continue;
      }
      forward(c);
      const i128 l = fwd_[c.lhs].lo;
      const i128 r = fwd_[c.rhs].lo;
      if (fwd_[c.lhs].saturated() || fwd_[c.rhs].saturated()) return false;
      bool ok = false;
      switch (c.op) {
        case RelOp::kEq: ok = l == r; break;
        case RelOp::kNe: ok = l != r; break;
        case RelOp::kLt: ok = l < r; break;
        case RelOp::kLe: ok = l <= r; break;
        case RelOp::kGt: ok = l > r; break;
        case RelOp::kGe: ok = l >= r; break;
      }
      if (!ok) return false;
    }
    return true;
  }

 private:
  void add_constraint(const Model& model, const Constraint& c) {
    CCon cc;
    const int id = static_cast<int>(cons_.size());
    if (const auto* h = std::get_if<HashBucketNe>(&c.body)) {
      cc.hash = true;
      cc.var = static_cast<int>(*model.index_of(h->var));
      cc.bucket_count = h->bucket_count;
      cc.excluded_bucket = bucket(h->excluded, h->bucket_count);
      watchers_[cc.var].push_back(id);
    } else {
      const auto& r = std::get<Relation>(c.body);
      cc.op = r.op;
      std::unordered_map<const IntExpr::Node*, int> local;
      cc.lhs = intern(model, r.lhs.node(), cc.postorder, local);
      cc.rhs = intern(model, r.rhs.node(), cc.postorder, local);
      std::vector<int> seen;
      for (int n : cc.postorder) {
        const int v = nodes_[n].var;
        if (v >= 0 && std::find(seen.begin(), seen.end(), v) == seen.end()) {
          seen.push_back(v);
          watchers_[v].push_back(id);
        }
      }
    }
    cons_.push_back(std::move(cc));
  }

  int intern(const Model& model, const IntExpr::Node& n, std::vector<int>& post,
             std::unordered_map<const IntExpr::Node*, int>& local) {
    if (auto it = local.find(&n); it != local.end()) return it->second;
    CNode cn;
    cn.kind = n.kind;
    switch (n.kind) {
      case IntExpr::Kind::kConst:
        cn.value = n.value;
        break;
      case IntExpr::Kind::kVar:
        cn.var = static_cast<int>(*model.index_of(n.name));
        break;
      case IntExpr::Kind::kNeg:
        cn.a = intern(model, *n.lhs, post, local);
        break;
      default:
        cn.a = intern(model, *n.lhs, post, local);
        cn.b = intern(model, *n.rhs, post, local);
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(cn);
    post.push_back(id);
    local.emplace(&n, id);
    return id;
  }

  void forward(const CCon& c) {
    for (int id : c.postorder) {
      const CNode& n = nodes_[id];
      switch (n.kind) {
        case IntExpr::Kind::kConst: fwd_[id] = {n.value, n.value}; break;
        case IntExpr::Kind::kVar: fwd_[id] = (*dom_)[n.var]; break;
        case IntExpr::Kind::kAdd: fwd_[id] = add(fwd_[n.a], fwd_[n.b]); break;
        case IntExpr::Kind::kSub: fwd_[id] = sub(fwd_[n.a], fwd_[n.b]); break;
        case IntExpr::Kind::kMul: fwd_[id] = mul(fwd_[n.a], fwd_[n.b]); break;
        case IntExpr::Kind::kNeg: fwd_[id] = neg(fwd_[n.a]); break;
      }
    }
  }

  // Narrows node `id` to `target`, pushing the consequence down to its
  // operands. Returns false on an empty intersection.
  bool project(int id, Iv target) {
    const Iv cur = fwd_[id];
    const Iv next = meet(cur, target);
    if (next.empty()) return false;
    if (next.lo == cur.lo && next.hi == cur.hi) return true;
    fwd_[id] = next;
    const CNode& n = nodes_[id];
    switch (n.kind) {
      case IntExpr::Kind::kConst:
        return true;
      case IntExpr::Kind::kVar: {
        Iv& d = (*dom_)[n.var];
        const Iv nd = meet(d, next);
        if (nd.empty()) return false;
        if (nd.lo != d.lo || nd.hi != d.hi) {
          d = nd;
          changed_.push_back(n.var);
        }
        return true;
      }
      case IntExpr::Kind::kNeg:
        return project(n.a, neg(next));
      case IntExpr::Kind::kAdd:
        if (next.saturated()) return true;
        return project(n.a, sub(next, fwd_[n.b])) &&
               project(n.b, sub(next, fwd_[n.a]));
      case IntExpr::Kind::kSub:
        if (next.saturated()) return true;
        return project(n.a, add(next, fwd_[n.b])) &&
               project(n.b, sub(fwd_[n.a], next));
      case IntExpr::Kind::kMul: {
        Iv q;
        switch (quotient(next, fwd_[n.b], q)) {
          case Quot::kEmpty: return false;
          case Quot::kInterval:
            if (!project(n.a, q)) return false;
            break;
          case Quot::kNoInfo: break;
        }
        switch (quotient(next, fwd_[n.a], q)) {
          case Quot::kEmpty: return false;
          case Quot::kInterval: return project(n.b, q);
          case Quot::kNoInfo: return true;
        }
        return true;
      }
    }
    return true;
  }

  bool revise_hash(const CCon& c) {
    Iv& d = (*dom_)[c.var];
    const Iv before = d;
    auto excluded = [&](i128 v) {
      return bucket(static_cast<int64_t>(v), c.bucket_count) == c.excluded_bucket;
    };
    for (int k = 0; k < 64 && d.lo <= d.hi && excluded(d.lo); ++k) ++d.lo;
    for (int k = 0; k < 64 && d.lo <= d.hi && excluded(d.hi); ++k) --d.hi;
    if (d.empty()) return false;
    if (d.lo != before.lo || d.hi != before.hi) changed_.push_back(c.var);
    return true;
  }

  bool revise(const CCon& c) {
    if (c.hash) return revise_hash(c);
    forward(c);
    const Iv l = fwd_[c.lhs];
    const Iv r = fwd_[c.rhs];
    switch (c.op) {
      case RelOp::kEq: {
        const Iv t = meet(l, r);
        return !t.empty() && project(c.lhs, t) && project(c.rhs, t);
      }
      case RelOp::kLe:
        return project(c.lhs, {l.lo, r.hi}) && project(c.rhs, {l.lo, r.hi});
      case RelOp::kLt:
        return project(c.lhs, {l.lo, r.hi - 1}) && project(c.rhs, {l.lo + 1, r.hi});
      case RelOp::kGe:
        return project(c.rhs, {r.lo, l.hi}) && project(c.lhs, {r.lo, l.hi});
      case RelOp::kGt:
        return project(c.rhs, {r.lo, l.hi - 1}) && project(c.lhs, {r.lo + 1, l.hi});
      case RelOp::kNe: {
        const bool lf = l.lo == l.hi;
        const bool rf = r.lo == r.hi;
        if (lf && rf) return l.lo != r.lo;
        if (rf) {
          if (l.lo == r.lo) return project(c.lhs, {l.lo + 1, l.hi});
          if (l.hi == r.lo) return project(c.lhs, {l.lo, l.hi - 1});
        } else if (lf) {
          if (r.lo == l.lo) return project(c.rhs, {r.lo + 1, r.hi});
          if (r.hi == l.lo) return project(c.rhs, {r.lo, r.hi - 1});
        }
        return true;
      }
    }
    return true;
  }

  std::vector<Iv> init_;
  std::vector<VarRole> roles_;
  std::vector<CNode> nodes_;
  std::vector<CCon> cons_;
  std::vector<std::vector<int>> watchers_;
  std::vector<Iv> fwd_;
  std::vector<int> changed_;
  std::vector<Iv>* dom_ = nullptr;
};

int role_rank(VarRole r) {
  switch (r) {
    case VarRole::kInputDim:
    case VarRole::kParam: return 0;
    case VarRole::kOutputDim: return 1;
    case VarRole::kAuxiliary: return 2;
  }
  return 3;
}

struct Frame {
  std::vector<Iv> dom;
  int changed;
};

}  // namespace

std::optional<Domains> propagate(const Model& model) {
  Compiled cm(model, {});
  std::vector<Iv> dom = cm.initial();
  if (!cm.propagate(dom, -1)) return std::nullopt;
  Domains out;
  for (size_t i = 0; i < dom.size(); ++i) {
    out.emplace(model.vars()[i].name,
                Interval{static_cast<int64_t>(dom[i].lo), static_cast<int64_t>(dom[i].hi)});
  }
  return out;
}

SolveResult solve(const Model& model, uint64_t seed, uint64_t node_budget) {
  SolveOptions opts;
  opts.seed = seed;
  opts.node_budget = node_budget;
  return solve(model, {}, opts);
}

SolveResult solve(const Model& model, const SolveOptions& options) {
  return solve(model, {}, options);
}

SolveResult solve(const Model& model, std::span<const Constraint> extra,
                  const SolveOptions& options) {
  if (options.node_budget < 1) throw ConfigError("node_budget must be >= 1");
  Compiled cm(model, extra);
  Rng rng(options.seed);

  // Decision order: inputs and parameters first (shuffled), so derived
  // outputs and auxiliaries are mostly fixed by propagation.
  std::vector<int> order(cm.num_vars());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[uniform_below(rng, i)]);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return role_rank(cm.role(a)) < role_rank(cm.role(b));
  });

  SolveResult result;
  std::vector<Frame> stack;
  stack.push_back({cm.initial(), -1});
  std::vector<int64_t> tuple(cm.num_vars());

  while (!stack.empty()) {
    if (result.nodes >= options.node_budget) {
      result.status = SolveStatus::kUnknown;
      return result;
    }
    Frame f = std::move(stack.back());
    stack.pop_back();
    ++result.nodes;
    if (!cm.propagate(f.dom, f.changed)) continue;

    int pick = -1;
    for (int v : order) {
      if (f.dom[v].lo < f.dom[v].hi) {
        pick = v;
        break;
      }
    }
    if (pick < 0) {
      if (!cm.holds(f.dom)) continue;
      for (size_t i = 0; i < tuple.size(); ++i) tuple[i] = static_cast<int64_t>(f.dom[i].lo);
      if (options.reject && options.reject(tuple)) continue;
      result.status = SolveStatus::kSat;
      for (size_t i = 0; i < tuple.size(); ++i) {
        result.assignment.emplace(model.vars()[i].name, tuple[i]);
      }
      return result;
    }

    const Iv d = f.dom[pick];
    const i128 v = uniform_range(rng, static_cast<int64_t>(d.lo), static_cast<int64_t>(d.hi));
    const bool below_first = (rng() & 1U) != 0;
    auto push_side = [&](bool below) {
      if (below && v > d.lo) {
        Frame c{f.dom, pick};
        c.dom[pick] = {d.lo, v - 1};
        stack.push_back(std::move(c));
      } else if (!below && v < d.hi) {
        Frame c{f.dom, pick};
        c.dom[pick] = {v + 1, d.hi};
        stack.push_back(std::move(c));
      }
    };
    // Stack order: the side explored last is pushed first.
    push_side(!below_first);
    push_side(below_first);
    f.dom[pick] = {v, v};
    stack.push_back({std::move(f.dom), pick});
  }
  result.status = SolveStatus::kUnsat;
  return result;
}

}  // namespace opfuzz
