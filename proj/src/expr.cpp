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

#include "dfc/expr.hpp"

#include <algorithm>
#include <stdexcept>

#include "dfc/arith.hpp"
#include "dfc/error.hpp"

namespace dfc {

const char* op_name(Op op) {
  switch (op) {
    case Op::Const: return "const";
    case Op::Input: return "input";
    case Op::Var: return "var";
    case Op::Sig: return "sig";
    case Op::Not: return "!";
    case Op::Neg: return "-";
    case Op::And: return "&";
    case Op::Or: return "|";
    case Op::Xor: return "^";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Min: return "min";
    case Op::Max: return "max";
    case Op::Ite: return "ite";
  }
  return "?";
}

bool is_leaf(Op op) { return op == Op::Const || op == Op::Input || op == Op::Var || op == Op::Sig; }

bool is_commutative(Op op) {
  switch (op) {
    case Op::And: case Op::Or: case Op::Xor: case Op::Add: case Op::Mul:
    case Op::Eq: case Op::Ne: case Op::Min: case Op::Max:
      return true;
    default:
      return false;
  }
}

Expr Expr::constant(Value v, Sort sort) {
  return Expr(std::make_shared<const Node>(Node{Op::Const, sort, sort == Sort::Bool ? (v != 0) : v, {}, {}}));
}

Expr Expr::input(std::string name, Sort sort) {
  return Expr(std::make_shared<const Node>(Node{Op::Input, sort, 0, std::move(name), {}}));
}

Expr Expr::var(std::string name, Sort sort) {
  return Expr(std::make_shared<const Node>(Node{Op::Var, sort, 0, std::move(name), {}}));
}

Expr Expr::sig(std::string name, Sort sort) {
  return Expr(std::make_shared<const Node>(Node{Op::Sig, sort, 0, std::move(name), {}}));
}

Expr Expr::unary(Op op, Expr a) {
  if (op != Op::Not && op != Op::Neg) throw std::invalid_argument("not a unary operator");
  Sort s = op == Op::Not ? Sort::Bool : Sort::Int;
  return Expr(std::make_shared<const Node>(Node{op, s, 0, {}, {std::move(a)}}));
}

Expr Expr::binary(Op op, Expr a, Expr b) {
  Sort s;
  switch (op) {
    case Op::And: case Op::Or: case Op::Xor: case Op::Eq: case Op::Ne:
    case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge:
      s = Sort::Bool;
      break;
    case Op::Add: case Op::Sub: case Op::Mul: case Op::Min: case Op::Max:
      s = Sort::Int;
      break;
    default:
      throw std::invalid_argument("not a binary operator");
  }
  return Expr(std::make_shared<const Node>(Node{op, s, 0, {}, {std::move(a), std::move(b)}}));
}

Expr Expr::ite(Expr cond, Expr then_e, Expr else_e) {
  Sort s = then_e.sort();
  return Expr(std::make_shared<const Node>(
      Node{Op::Ite, s, 0, {}, {std::move(cond), std::move(then_e), std::move(else_e)}}));
}

int compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return 0;
  if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
  if (a.sort() != b.sort()) return a.sort() < b.sort() ? -1 : 1;
  if (a.value() != b.value()) return a.value() < b.value() ? -1 : 1;
  if (int c = a.name().compare(b.name())) return c < 0 ? -1 : 1;
  if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (int c = compare(a.arg(i), b.arg(i))) return c;
  }
  return 0;
}

Expr make_not(const Expr& e) {
  if (e.is_const()) return Expr::boolean(e.value() == 0);
  if (e.op() == Op::Not) return e.arg(0);
  return Expr::unary(Op::Not, e);
}

Expr make_and(const Expr& a, const Expr& b) {
  if (a.is_false() || b.is_false()) return Expr::boolean(false);
  if (a.is_true()) return b;
  if (b.is_true()) return a;
  return Expr::binary(Op::And, a, b);
}

Expr make_or(const Expr& a, const Expr& b) {
  if (a.is_true() || b.is_true()) return Expr::boolean(true);
  if (a.is_false()) return b;
  if (b.is_false()) return a;
  return Expr::binary(Op::Or, a, b);
}

Expr make_and(const std::vector<Expr>& terms) {
  Expr acc = Expr::boolean(true);
  for (const auto& t : terms) acc = make_and(acc, t);
  return acc;
}

Expr make_or(const std::vector<Expr>& terms) {
  Expr acc = Expr::boolean(false);
  for (const auto& t : terms) acc = make_or(acc, t);
  return acc;
}

Expr make_eq(const Expr& a, const Expr& b) { return Expr::binary(Op::Eq, a, b); }

Expr make_ite(const Expr& c, const Expr& t, const Expr& e) {
  if (c.is_true()) return t;
  if (c.is_false()) return e;
  if (t == e) return t;
  return Expr::ite(c, t, e);
}

namespace {

// Folds a binary operator on constants; nullopt on overflow.
std::optional<Value> fold_binary(Op op, Value a, Value b) {
  switch (op) {
    case Op::And: return (a != 0) && (b != 0);
    case Op::Or: return (a != 0) || (b != 0);
    case Op::Xor: return (a != 0) != (b != 0);
    case Op::Add: return arith::add(a, b);
    case Op::Sub: return arith::sub(a, b);
    case Op::Mul: return arith::mul(a, b);
    case Op::Eq: return a == b;
    case Op::Ne: return a != b;
    case Op::Lt: return a < b;
    case Op::Le: return a <= b;
    case Op::Gt: return a > b;
    case Op::Ge: return a >= b;
    case Op::Min: return std::min(a, b);
    case Op::Max: return std::max(a, b);
    default: throw std::logic_error("fold_binary on non-binary operator");
  }
}

}  // namespace

std::optional<Value> try_evaluate(const Expr& e, const LeafLookup& lookup) {
  switch (e.op()) {
    case Op::Const: return e.value();
    case Op::Input: case Op::Var: case Op::Sig: return lookup(e.op(), e.name());
    case Op::Not: {
      auto a = try_evaluate(e.arg(0), lookup);
      if (!a) return std::nullopt;
      return *a == 0;
    }
    case Op::Neg: {
      auto a = try_evaluate(e.arg(0), lookup);
      if (!a) return std::nullopt;
      return arith::neg(*a);
    }
    case Op::Ite: {
      auto c = try_evaluate(e.arg(0), lookup);
      if (!c) return std::nullopt;
      return try_evaluate(e.arg(*c != 0 ? 1 : 2), lookup);
    }
    case Op::And:
    case Op::Or: {
      // A dominating operand decides the result even if the other overflowed.
      Value dominant = e.op() == Op::And ? 0 : 1;
      auto a = try_evaluate(e.arg(0), lookup);
      if (a && (*a != 0) == (dominant != 0)) return dominant;
      auto b = try_evaluate(e.arg(1), lookup);
      if (b && (*b != 0) == (dominant != 0)) return dominant;
      if (!a || !b) return std::nullopt;
      return 1 - dominant;
    }
    default: {
      auto a = try_evaluate(e.arg(0), lookup);
      auto b = try_evaluate(e.arg(1), lookup);
      if (!a || !b) return std::nullopt;
      return fold_binary(e.op(), *a, *b);
    }
  }
}

Value evaluate(const Expr& e, const LeafLookup& lookup) {
  auto v = try_evaluate(e, lookup);
  if (!v) {
    throw Error(ErrorKind::ArithmeticOverflow, "64-bit overflow while evaluating " + to_string(e));
  }
  return *v;
}

Value evaluate(const Expr& e, const Valuation& values) {
  return evaluate(e, [&](Op, const std::string& name) -> Value {
    auto it = values.find(name);
    if (it == values.end()) throw std::out_of_range("no value for '" + name + "'");
    return it->second;
  });
}

Expr substitute(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& fn) {
  if (is_leaf(e.op())) {
    if (auto r = fn(e)) return *r;
    return e;
  }
  std::vector<Expr> args;
  args.reserve(e.arity());
  bool changed = false;
  for (const auto& a : e.args()) {
    args.push_back(substitute(a, fn));
    changed = changed || !(args.back() == a);
  }
  if (!changed) return e;
  switch (e.op()) {
    case Op::Not: case Op::Neg: return Expr::unary(e.op(), args[0]);
    case Op::Ite: return Expr::ite(args[0], args[1], args[2]);
    default: return Expr::binary(e.op(), args[0], args[1]);
  }
}

Expr bind(const Expr& e, const Valuation& values) {
  return substitute(e, [&](const Expr& leaf) -> std::optional<Expr> {
    if (leaf.op() != Op::Input && leaf.op() != Op::Var) return std::nullopt;
    auto it = values.find(leaf.name());
    if (it == values.end()) return std::nullopt;
    return Expr::constant(it->second, leaf.sort());
  });
}

// ---------------------------------------------------------------------------
// Normalization. Every norm_* helper assumes its operands are normalized.

namespace {

Expr norm_not(const Expr& a);
Expr norm_binary(Op op, const Expr& a, const Expr& b);
Expr norm_ite(const Expr& c, const Expr& t, const Expr& e);

void gather(Op op, const Expr& e, std::vector<Expr>& out) {
  if (e.op() == op) {
    gather(op, e.arg(0), out);
    gather(op, e.arg(1), out);
  } else {
    out.push_back(e);
  }
}

Expr norm_chain(Op op, const Expr& a, const Expr& b) {
  const bool is_and = op == Op::And;
  std::vector<Expr> terms;
  gather(op, a, terms);
  gather(op, b, terms);
  std::vector<Expr> kept;
  for (auto& t : terms) {
    if (t.is_const()) {
      if ((t.value() != 0) != is_and) return Expr::boolean(!is_and);
      continue;
    }
    kept.push_back(t);
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  for (const auto& t : kept) {
    if (t.op() == Op::Not && std::binary_search(kept.begin(), kept.end(), t.arg(0))) {
      return Expr::boolean(!is_and);
    }
  }
  if (kept.empty()) return Expr::boolean(is_and);
  Expr acc = kept[0];
  for (std::size_t i = 1; i < kept.size(); ++i) acc = Expr::binary(op, acc, kept[i]);
  return acc;
}

Expr norm_not(const Expr& a) {
  if (a.is_const()) return Expr::boolean(a.value() == 0);
  if (a.op() == Op::Not) return a.arg(0);
  return Expr::unary(Op::Not, a);
}

Expr norm_binary(Op op, const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) {
    if (auto r = fold_binary(op, a.value(), b.value())) {
      Sort s = (op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Min || op == Op::Max)
                   ? Sort::Int
                   : Sort::Bool;
      return Expr::constant(*r, s);
    }
    return Expr::binary(op, a, b);
  }
  switch (op) {
    case Op::And:
    case Op::Or:
      return norm_chain(op, a, b);
    case Op::Gt:
      return norm_binary(Op::Lt, b, a);
    case Op::Ge:
      return norm_binary(Op::Le, b, a);
    case Op::Sub:
      if (b.is_const() && b.value() == 0) return a;
      return Expr::binary(op, a, b);
    case Op::Eq:
    case Op::Ne:
      if (a.sort() == Sort::Bool && b.sort() == Sort::Bool && (a.is_const() || b.is_const())) {
        const Expr& c = a.is_const() ? a : b;
        const Expr& x = a.is_const() ? b : a;
        bool positive = (c.value() != 0) == (op == Op::Eq);
        return positive ? x : norm_not(x);
      }
      break;
    case Op::Add:
      if (a.is_const() && a.value() == 0) return b;
      if (b.is_const() && b.value() == 0) return a;
      break;
    case Op::Mul:
      if (a.is_const() && a.value() == 1) return b;
      if (b.is_const() && b.value() == 1) return a;
      break;
    default:
      break;
  }
  if (is_commutative(op) && b < a) return Expr::binary(op, b, a);
  return Expr::binary(op, a, b);
}

Expr norm_ite(const Expr& c, const Expr& t, const Expr& e) {
  if (c.is_const()) return c.value() != 0 ? t : e;
  if (t == e) return t;
  if (c.op() == Op::Not) return norm_ite(c.arg(0), e, t);
  if (t.sort() == Sort::Bool && t.is_const() && e.is_const()) {
    return t.value() != 0 ? c : norm_not(c);
  }
  return Expr::ite(c, t, e);
}

}  // namespace

Expr normalize(const Expr& e) {
  switch (e.op()) {
    case Op::Const: case Op::Input: case Op::Var: case Op::Sig:
      return e;
    case Op::Not:
      return norm_not(normalize(e.arg(0)));
    case Op::Neg: {
      Expr a = normalize(e.arg(0));
      if (a.is_const()) {
        if (auto r = arith::neg(a.value())) return Expr::integer(*r);
      }
      return Expr::unary(Op::Neg, a);
    }
    case Op::Ite:
      return norm_ite(normalize(e.arg(0)), normalize(e.arg(1)), normalize(e.arg(2)));
    default:
      return norm_binary(e.op(), normalize(e.arg(0)), normalize(e.arg(1)));
  }
}

void collect_refs(const Expr& e, RefSet& out) {
  switch (e.op()) {
    case Op::Const: return;
    case Op::Input: out.inputs.insert(e.name()); return;
    case Op::Var: out.vars.insert(e.name()); return;
    case Op::Sig: out.sigs.insert(e.name()); return;
    default:
      for (const auto& a : e.args()) collect_refs(a, out);
  }
}

RefSet refs(const Expr& e) {
  RefSet out;
  collect_refs(e, out);
  return out;
}

std::size_t node_count(const Expr& e) {
  std::size_t n = 1;
  for (const auto& a : e.args()) n += node_count(a);
  return n;
}

std::string to_string(const Expr& e) {
  switch (e.op()) {
    case Op::Const:
      if (e.sort() == Sort::Bool) return e.value() ? "true" : "false";
      return std::to_string(e.value());
    case Op::Input: case Op::Var: case Op::Sig:
      return e.name();
    case Op::Not: return "!" + to_string(e.arg(0));
    case Op::Neg: return "-" + to_string(e.arg(0));
    case Op::Min: case Op::Max:
      return std::string(op_name(e.op())) + "(" + to_string(e.arg(0)) + ", " + to_string(e.arg(1)) + ")";
    case Op::Ite:
      return "ite(" + to_string(e.arg(0)) + ", " + to_string(e.arg(1)) + ", " + to_string(e.arg(2)) + ")";
    default:
      return "(" + to_string(e.arg(0)) + " " + op_name(e.op()) + " " + to_string(e.arg(1)) + ")";
  }
}

}  // namespace dfc
