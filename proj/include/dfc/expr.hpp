// Copyright 2026 The dfcompat Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dfc/types.hpp"

namespace dfc {

enum class Op : std::uint8_t {
  Const,
  Input,  // external or fresh input port
  Var,    // internal variable, value at the start of the step
  Sig,    // model-local wire or variable name; gone after substitution
  Not,
  Neg,
  And,
  Or,
  Xor,
  Add,
  Sub,
  Mul,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  Min,
  Max,
  Ite,
};

enum class Sort : std::uint8_t { Bool, Int };

const char* op_name(Op op);
bool is_leaf(Op op);
bool is_commutative(Op op);

/// Immutable expression tree with shared subterms. Copies are cheap.
class Expr {
 public:
  Expr() = default;

  static Expr constant(Value v, Sort sort);
  static Expr boolean(bool b) { return constant(b ? 1 : 0, Sort::Bool); }
  static Expr integer(Value v) { return constant(v, Sort::Int); }
  static Expr input(std::string name, Sort sort);
  static Expr var(std::string name, Sort sort);
  static Expr sig(std::string name, Sort sort);
  static Expr unary(Op op, Expr a);
  static Expr binary(Op op, Expr a, Expr b);
  static Expr ite(Expr cond, Expr then_e, Expr else_e);

  bool valid() const { return node_ != nullptr; }
  Op op() const { return node_->op; }
  Sort sort() const { return node_->sort; }
  Value value() const { return node_->value; }
  const std::string& name() const { return node_->name; }
  std::size_t arity() const { return node_->args.size(); }
  const Expr& arg(std::size_t i) const { return node_->args[i]; }
  const std::vector<Expr>& args() const { return node_->args; }

  bool is_const() const { return op() == Op::Const; }
  bool is_true() const { return is_const() && sort() == Sort::Bool && value() != 0; }
  bool is_false() const { return is_const() && sort() == Sort::Bool && value() == 0; }

  /// Structural total order; equal iff the trees are identical.
  friend int compare(const Expr& a, const Expr& b);
  friend bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }
  friend bool operator<(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

 private:
  struct Node {
    Op op;
    Sort sort;
    Value value = 0;
    std::string name;
    std::vector<Expr> args;
  };
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// Smart constructors with light local simplification (true/false absorption).
Expr make_not(const Expr& e);
Expr make_and(const Expr& a, const Expr& b);
Expr make_or(const Expr& a, const Expr& b);
Expr make_and(const std::vector<Expr>& terms);
Expr make_or(const std::vector<Expr>& terms);
Expr make_eq(const Expr& a, const Expr& b);
Expr make_ite(const Expr& c, const Expr& t, const Expr& e);

/// Lookup for leaf values during evaluation.
using LeafLookup = std::function<Value(Op, const std::string&)>;

/// Evaluation where a 64-bit overflow poisons the result (nullopt). `Ite`
/// only looks at the selected branch; `and`/`or` are decided by a false/true
/// operand regardless of the other one. Everything else is strict.
std::optional<Value> try_evaluate(const Expr& e, const LeafLookup& lookup);
/// As try_evaluate, but throws ArithmeticOverflow on a poisoned result.
Value evaluate(const Expr& e, const LeafLookup& lookup);
Value evaluate(const Expr& e, const Valuation& values);

/// Replaces leaves. `fn` returns a replacement or nullopt to keep the leaf.
Expr substitute(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& fn);

/// Replaces `Input`/`Var` leaves whose name is a key of `values` by constants.
Expr bind(const Expr& e, const Valuation& values);

/// Constant folding, commutative operand ordering, double negation removal,
/// flattening of and/or chains. Idempotent.
Expr normalize(const Expr& e);

struct RefSet {
  std::set<std::string> inputs;
  std::set<std::string> vars;
  std::set<std::string> sigs;
};
void collect_refs(const Expr& e, RefSet& out);
RefSet refs(const Expr& e);

std::size_t node_count(const Expr& e);

std::string to_string(const Expr& e);

}  // namespace dfc
