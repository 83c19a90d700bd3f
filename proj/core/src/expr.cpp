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

#include "opfuzz/expr.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "opfuzz/error.hpp"
#include "opfuzz/hash.hpp"

namespace opfuzz {

std::string_view to_string(VarRole role) {
  switch (role) {
    case VarRole::kInputDim: return "InputDim";
    case VarRole::kParam: return "Param";
    case VarRole::kOutputDim: return "OutputDim";
    case VarRole::kAuxiliary: return "Auxiliary";
  }
  return "?";
}

std::string_view to_string(RelOp op) {
  switch (op) {
    case RelOp::kEq: return "==";
    case RelOp::kNe: return "!=";
    case RelOp::kLt: return "<";
    case RelOp::kLe: return "<=";
    case RelOp::kGt: return ">";
    case RelOp::kGe: return ">=";
  }
  return "?";
}

namespace {

using NodePtr = std::shared_ptr<const IntExpr::Node>;

NodePtr make_node(IntExpr::Kind kind, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<IntExpr::Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

void collect_vars(const IntExpr::Node& n, std::vector<std::string>& out,
                  std::set<std::string>& seen) {
  switch (n.kind) {
    case IntExpr::Kind::kConst:
      return;
    case IntExpr::Kind::kVar:
      if (seen.insert(n.name).second) out.push_back(n.name);
      return;
    case IntExpr::Kind::kNeg:
      collect_vars(*n.lhs, out, seen);
      return;
    default:
      collect_vars(*n.lhs, out, seen);
      collect_vars(*n.rhs, out, seen);
  }
}

void print(const IntExpr::Node& n, std::ostream& os) {
  switch (n.kind) {
    case IntExpr::Kind::kConst: os << opfuzz::to_string(n.value); return;
    case IntExpr::Kind::kVar: os << n.name; return;
    case IntExpr::Kind::kNeg:
      os << "-(";
      print(*n.lhs, os);
      os << ")";
      return;
    case IntExpr::Kind::kAdd:
    case IntExpr::Kind::kSub:
    case IntExpr::Kind::kMul: {
      const char* sym = n.kind == IntExpr::Kind::kAdd   ? " + "
                        : n.kind == IntExpr::Kind::kSub ? " - "
                                                        : "*";
      os << "(";
      print(*n.lhs, os);
      os << sym;
      print(*n.rhs, os);
      os << ")";
      return;
    }
  }
}

i128 eval_node(const Assignment& a, const IntExpr::Node& n) {
  switch (n.kind) {
    case IntExpr::Kind::kConst: return n.value;
    case IntExpr::Kind::kVar: {
      auto it = a.find(n.name);
      if (it == a.end()) {
        throw StructuralError("eval: variable '" + n.name + "' is unassigned");
      }
      return it->second;
    }
    case IntExpr::Kind::kAdd: return eval_node(a, *n.lhs) + eval_node(a, *n.rhs);
    case IntExpr::Kind::kSub: return eval_node(a, *n.lhs) - eval_node(a, *n.rhs);
    case IntExpr::Kind::kMul: return eval_node(a, *n.lhs) * eval_node(a, *n.rhs);
    case IntExpr::Kind::kNeg: return -eval_node(a, *n.lhs);
  }
  return 0;
}

Constraint rel(RelOp op, const IntExpr& a, const IntExpr& b) {
  return Constraint{Relation{op, a, b}, {}};
}

}  // namespace

IntExpr::IntExpr(int64_t value) : IntExpr(constant(value)) {}

IntExpr IntExpr::constant(i128 value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kConst;
  n->value = value;
  return IntExpr(std::move(n));
}

IntExpr IntExpr::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kVar;
  n->name = std::move(name);
  return IntExpr(std::move(n));
}

std::vector<std::string> IntExpr::vars() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_vars(*node_, out, seen);
  return out;
}

std::string IntExpr::to_string() const {
  std::ostringstream os;
  print(*node_, os);
  return os.str();
}

IntExpr operator+(const IntExpr& a, const IntExpr& b) {
  return IntExpr(make_node(IntExpr::Kind::kAdd, a.node_, b.node_));
}
IntExpr operator-(const IntExpr& a, const IntExpr& b) {
  return IntExpr(make_node(IntExpr::Kind::kSub, a.node_, b.node_));
}
IntExpr operator*(const IntExpr& a, const IntExpr& b) {
  return IntExpr(make_node(IntExpr::Kind::kMul, a.node_, b.node_));
}
IntExpr operator-(const IntExpr& a) {
  return IntExpr(make_node(IntExpr::Kind::kNeg, a.node_, nullptr));
}

IntExpr sum(const std::vector<IntExpr>& terms) {
  if (terms.empty()) return IntExpr(0);
  IntExpr acc = terms.front();
  for (size_t i = 1; i < terms.size(); ++i) acc = acc + terms[i];
  return acc;
}

IntExpr product(const std::vector<IntExpr>& factors) {
  if (factors.empty()) return IntExpr(1);
  IntExpr acc = factors.front();
  for (size_t i = 1; i < factors.size(); ++i) acc = acc * factors[i];
  return acc;
}

Constraint operator==(const IntExpr& a, const IntExpr& b) { return rel(RelOp::kEq, a, b); }
Constraint operator!=(const IntExpr& a, const IntExpr& b) { return rel(RelOp::kNe, a, b); }
Constraint operator<(const IntExpr& a, const IntExpr& b) { return rel(RelOp::kLt, a, b); }
Constraint operator<=(const IntExpr& a, const IntExpr& b) { return rel(RelOp::kLe, a, b); }
Constraint operator>(const IntExpr& a, const IntExpr& b) { return rel(RelOp::kGt, a, b); }
Constraint operator>=(const IntExpr& a, const IntExpr& b) { return rel(RelOp::kGe, a, b); }

Constraint hash_bucket_ne(std::string var, int64_t excluded,
                          uint32_t bucket_count) {
  if (bucket_count < 2) throw ConfigError("bucket_count must be >= 2");
  return Constraint{HashBucketNe{std::move(var), excluded, bucket_count}, {}};
}

std::vector<std::string> Constraint::vars() const {
  if (const auto* r = std::get_if<Relation>(&body)) {
    auto out = r->lhs.vars();
    std::set<std::string> seen(out.begin(), out.end());
    for (auto& v : r->rhs.vars()) {
      if (seen.insert(v).second) out.push_back(v);
    }
    return out;
  }
  return {std::get<HashBucketNe>(body).var};
}

std::string Constraint::to_string() const {
  std::ostringstream os;
  if (const auto* r = std::get_if<Relation>(&body)) {
    os << r->lhs.to_string() << ' ' << opfuzz::to_string(r->op) << ' '
       << r->rhs.to_string();
  } else {
    const auto& h = std::get<HashBucketNe>(body);
    os << "h(" << h.var << ") != h(" << h.excluded << ") [mod "
       << h.bucket_count << "]";
  }
  return os.str();
}

IntExpr Model::add_var(std::string name, int64_t lo, int64_t hi, VarRole role) {
  if (lo > hi) {
    throw ConfigError("variable '" + name + "': lo > hi (" +
                      std::to_string(lo) + " > " + std::to_string(hi) + ")");
  }
  if (lo < 0 && role != VarRole::kAuxiliary) {
    throw ConfigError("variable '" + name + "': negative lower bound");
  }
  if (index_.count(name) != 0) {
    throw ConfigError("variable '" + name + "' declared twice");
  }
  index_.emplace(name, vars_.size());
  vars_.push_back(VarDecl{name, lo, hi, role});
  return IntExpr::var(std::move(name));
}

void Model::add(Constraint c, std::string label) {
  if (!label.empty()) c.label = std::move(label);
  constraints_.push_back(std::move(c));
}

std::optional<size_t> Model::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const VarDecl& Model::var(std::string_view name) const {
  auto idx = index_of(name);
  if (!idx) throw StructuralError("undeclared variable '" + std::string(name) + "'");
  return vars_[*idx];
}

void Model::check_well_formed() const {
  for (const auto& c : constraints_) {
    for (const auto& v : c.vars()) {
      if (!index_of(v)) {
        throw StructuralError("constraint '" + c.to_string() +
                              "' references undeclared variable '" + v + "'");
      }
    }
    if (const auto* h = std::get_if<HashBucketNe>(&c.body);
        h != nullptr && h->bucket_count < 2) {
      throw StructuralError("hash constraint with bucket_count < 2");
    }
  }
}

i128 eval(const Assignment& a, const IntExpr& e) { return eval_node(a, e.node()); }

bool satisfies(const Assignment& a, const Constraint& c) {
  if (const auto* r = std::get_if<Relation>(&c.body)) {
    const i128 l = eval(a, r->lhs);
    const i128 rv = eval(a, r->rhs);
    switch (r->op) {
      case RelOp::kEq: return l == rv;
      case RelOp::kNe: return l != rv;
      case RelOp::kLt: return l < rv;
      case RelOp::kLe: return l <= rv;
      case RelOp::kGt: return l > rv;
      case RelOp::kGe: return l >= rv;
    }
    return false;
  }
  const auto& h = std::get<HashBucketNe>(c.body);
  auto it = a.find(h.var);
  if (it == a.end()) {
    throw StructuralError("hash constraint: variable '" + h.var + "' is unassigned");
  }
  return bucket(it->second, h.bucket_count) != bucket(h.excluded, h.bucket_count);
}

uint32_t bucket(int64_t v, uint32_t bucket_count) {
  if (bucket_count < 2) throw ConfigError("bucket_count must be >= 2");
  return mix32(static_cast<uint32_t>(static_cast<uint64_t>(v))) % bucket_count;
}

bool satisfies(const Assignment& a, const Model& m) {
  for (const auto& v : m.vars()) {
    auto it = a.find(v.name);
    if (it == a.end() || it->second < v.lo || it->second > v.hi) return false;
  }
  for (const auto& c : m.constraints()) {
    if (!satisfies(a, c)) return false;
  }
  return true;
}

}  // namespace opfuzz
