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

#ifndef OPFUZZ_EXPR_HPP_
#define OPFUZZ_EXPR_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "opfuzz/int128.hpp"

namespace opfuzz {

enum class VarRole { kInputDim, kParam, kOutputDim, kAuxiliary };

std::string_view to_string(VarRole role);

// A bounded integer unknown. Bounds are inclusive.
struct VarDecl {
  std::string name;
  int64_t lo = 0;
  int64_t hi = 0;
  VarRole role = VarRole::kParam;

  bool operator==(const VarDecl&) const = default;
};

// Immutable arithmetic expression tree over named variables. Nodes are
// shared, so copying an IntExpr is cheap.
class IntExpr {
 public:
  enum class Kind { kConst, kVar, kAdd, kSub, kMul, kNeg };

  struct Node {
    Kind kind;
    i128 value = 0;       // kConst
    std::string name;     // kVar
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;  // unused by kNeg
  };

  IntExpr(int64_t value);  // NOLINT: constants convert implicitly
  static IntExpr constant(i128 value);
  static IntExpr var(std::string name);

  const Node& node() const { return *node_; }
  const std::shared_ptr<const Node>& ptr() const { return node_; }

  // Names of every variable referenced, in first-occurrence order.
  std::vector<std::string> vars() const;
  std::string to_string() const;

  friend IntExpr operator+(const IntExpr& a, const IntExpr& b);
  friend IntExpr operator-(const IntExpr& a, const IntExpr& b);
  friend IntExpr operator*(const IntExpr& a, const IntExpr& b);
  friend IntExpr operator-(const IntExpr& a);

 private:
  explicit IntExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

IntExpr sum(const std::vector<IntExpr>& terms);
IntExpr product(const std::vector<IntExpr>& factors);

enum class RelOp { kEq, kNe, kLt, kLe, kGt, kGe };

std::string_view to_string(RelOp op);

struct Relation {
  RelOp op;
  IntExpr lhs;
  IntExpr rhs;
};

// Satisfied iff bucket(a[var]) != bucket(excluded).
struct HashBucketNe {
  std::string var;
  int64_t excluded = 0;
  uint32_t bucket_count = 64;
};

struct Constraint {
  std::variant<Relation, HashBucketNe> body;
  // Human-readable rule name reported by validation.
  std::string label;

  std::vector<std::string> vars() const;
  std::string to_string() const;
};

Constraint operator==(const IntExpr& a, const IntExpr& b);
Constraint operator!=(const IntExpr& a, const IntExpr& b);
Constraint operator<(const IntExpr& a, const IntExpr& b);
Constraint operator<=(const IntExpr& a, const IntExpr& b);
Constraint operator>(const IntExpr& a, const IntExpr& b);
Constraint operator>=(const IntExpr& a, const IntExpr& b);

Constraint hash_bucket_ne(std::string var, int64_t excluded,
                          uint32_t bucket_count = 64);

class Model {
 public:
  // Declares a variable and returns an expression referencing it. Throws
  // ConfigError on lo > hi, duplicate names or negative bounds on
  // non-auxiliary variables.
  IntExpr add_var(std::string name, int64_t lo, int64_t hi, VarRole role);
  void add(Constraint c, std::string label = {});

  const std::vector<VarDecl>& vars() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  std::optional<size_t> index_of(std::string_view name) const;
  const VarDecl& var(std::string_view name) const;

  // Throws StructuralError when a constraint references an undeclared var.
  void check_well_formed() const;

 private:
  std::vector<VarDecl> vars_;
  std::vector<Constraint> constraints_;
  std::map<std::string, size_t, std::less<>> index_;
};

// Variable name -> value. Ordered so iteration (and anything derived from
// it, like fingerprints) is deterministic.
using Assignment = std::map<std::string, int64_t, std::less<>>;

// Exact evaluation. Throws StructuralError when a variable is unassigned.
i128 eval(const Assignment& a, const IntExpr& e);
bool satisfies(const Assignment& a, const Constraint& c);
// Every variable assigned within its domain and every constraint true.
bool satisfies(const Assignment& a, const Model& m);

}  // namespace opfuzz

#endif  // OPFUZZ_EXPR_HPP_
