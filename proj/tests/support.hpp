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

#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dfc/cfg.hpp"
#include "dfc/efa.hpp"
#include "dfc/error.hpp"
#include "dfc/interp.hpp"
#include "dfc/model.hpp"
#include "dfc/solver.hpp"
#include "dfc/symbolic.hpp"
#include "dfc/unfold.hpp"

namespace dfc::test {

inline std::string fixture_path(const std::string& name) { return std::string(DFC_FIXTURE_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline FlatModel load_fixture(const std::string& name, const FlattenOptions& o = {}) {
  return flatten_and_validate(parse_model(read_text(fixture_path(name))), o);
}

inline FlatModel load_text(const std::string& text, const FlattenOptions& o = {}) {
  return flatten_and_validate(parse_model(text), o);
}

/// Unsplit transition system of a model, without clone pruning.
inline IoTs model_ts(const FlatModel& m, const Solver& solver, const std::string& prefix = "A") {
  SymbolicSummary s = substitute(extract_cfg(m, sorted_order(m)), solver);
  IoEfa e = build_efa(s, solver);
  return unfold_to_ts(e, compute_image(e, solver), solver, kDefaultStateBudget, prefix);
}

inline std::vector<Valuation> all_valuations(const Domain& dom) {
  std::vector<Valuation> out{{}};
  for (const auto& [n, t] : dom) {
    std::vector<Valuation> next;
    for (const auto& v : out) {
      for (Value x = t.lo(); x <= t.hi(); ++x) {
        Valuation w = v;
        w[n] = x;
        next.push_back(std::move(w));
      }
    }
    out = std::move(next);
  }
  return out;
}

/// Brute-force trace containment: for every input sequence over `dom` up to
/// `depth` steps, `a` accepts the inputs and produces the outputs of `b`.
/// Ports are matched by name. Sets of reachable state pairs are tracked per
/// depth, which covers every sequence without listing them one by one.
inline bool traces_contained(const FlatModel& a, const FlatModel& b, const Domain& dom, int depth) {
  Interpreter ia(a);
  Interpreter ib(b);
  auto inputs = all_valuations(dom);
  std::set<std::pair<Valuation, Valuation>> frontier{{initial_state(a).values, initial_state(b).values}};
  std::set<std::pair<Valuation, Valuation>> seen = frontier;
  for (int d = 0; d < depth && !frontier.empty(); ++d) {
    std::set<std::pair<Valuation, Valuation>> next;
    for (const auto& [sa, sb] : frontier) {
      for (const auto& in : inputs) {
        Valuation in_a;
        Valuation in_b;
        for (const auto& p : a.inputs) in_a[p.name] = in.count(p.name) ? in.at(p.name) : p.type.lo();
        for (const auto& p : b.inputs) in_b[p.name] = in.at(p.name);
        StepResult rb = ib.step(SimState{sb}, in_b);
        StepResult ra;
        try {
          ra = ia.step(SimState{sa}, in_a);
        } catch (const Error&) {
          return false;
        }
        for (const auto& p : b.outputs) {
          if (ra.outputs.at(p.name) != rb.outputs.at(p.name)) return false;
        }
        std::pair<Valuation, Valuation> n{ra.next.values, rb.next.values};
        if (seen.insert(n).second) next.insert(n);
      }
    }
    frontier = std::move(next);
  }
  return true;
}

inline Domain input_domain(const FlatModel& m) {
  Domain d;
  for (const auto& p : m.inputs) d[p.name] = p.type;
  return d;
}

inline Domain state_domain(const FlatModel& m) {
  Domain d;
  for (const auto& v : m.vars) d[v.name] = v.type;
  return d;
}

/// External SMT solver command: DFC_SOLVER_CMD, else z3 on the PATH, else empty.
inline std::string find_solver() {
  if (const char* env = std::getenv("DFC_SOLVER_CMD"); env && *env) return env;
  if (std::system("command -v z3 >/dev/null 2>&1") == 0) return "z3";
  return "";
}

/// Kind of the Error thrown by `f`, or nullopt if it returns normally.
inline std::optional<ErrorKind> error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

/// Small random models over inputs U1 : bool and U2 : int[0,k] with up to
/// three bool or int[0,3] delays and one or two outputs. Each definition is
/// drawn from its own seed so that pairs can differ in a single definition.
class RandomModel {
 public:
  struct Shape {
    int u2_hi = 2;
    std::vector<bool> var_is_bool;
    std::vector<bool> out_is_bool;
  };

  static Shape random_shape(std::mt19937_64& rng) {
    Shape s;
    s.u2_hi = 1 + static_cast<int>(rng() % 3);
    int vars = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < vars; ++i) s.var_is_bool.push_back(rng() % 2 == 0);
    int outs = 1 + static_cast<int>(rng() % 2);
    for (int i = 0; i < outs; ++i) s.out_is_bool.push_back(rng() % 2 == 0);
    return s;
  }

  /// One seed per variable, then one per output.
  static std::string text(const std::string& name, const Shape& shape, const std::vector<std::uint64_t>& seeds) {
    RandomModel g(shape);
    std::ostringstream os;
    os << "model " << name << "\nin U1 : bool\nin U2 : int[0," << shape.u2_hi << "]\n";
    for (std::size_t i = 0; i < shape.out_is_bool.size(); ++i) {
      os << "out Y" << i << " : " << (shape.out_is_bool[i] ? "bool" : "int") << "\n";
    }
    std::size_t k = 0;
    for (std::size_t i = 0; i < shape.var_is_bool.size(); ++i, ++k) {
      g.rng_.seed(seeds[k]);
      bool b = shape.var_is_bool[i];
      std::string d = "D" + std::to_string(i);
      g.lines_.push_back("block " + d + " : UnitDelay(" + (b ? "false" : "0") + ") : " + (b ? "bool" : "int[0,3]"));
      std::string src = b ? g.gen_bool(2) : g.clamp(g.gen_int(2));
      g.wire(src, d + ".in1");
    }
    for (std::size_t i = 0; i < shape.out_is_bool.size(); ++i, ++k) {
      g.rng_.seed(seeds[k]);
      std::string src = shape.out_is_bool[i] ? g.gen_bool(2) : g.gen_int(2);
      g.wire(src, "Y" + std::to_string(i) + ".in1");
    }
    for (const auto& l : g.lines_) os << l << "\n";
    return os.str();
  }

 private:
  explicit RandomModel(const Shape& s) : shape_(s) {}

  int pick(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }

  std::string fresh(const std::string& decl) {
    std::string n = "N" + std::to_string(counter_++);
    lines_.push_back("block " + n + " : " + decl);
    return n;
  }

  void wire(const std::string& src, const std::string& dst) { lines_.push_back("wire " + src + ".out -> " + dst); }

  std::vector<int> vars_of(bool is_bool) const {
    std::vector<int> r;
    for (std::size_t i = 0; i < shape_.var_is_bool.size(); ++i) {
      if (shape_.var_is_bool[i] == is_bool) r.push_back(static_cast<int>(i));
    }
    return r;
  }

  std::string clamp(const std::string& src) {
    std::string n = fresh("Saturation(0,3)");
    wire(src, n + ".in1");
    return n;
  }

  std::string gen_bool(int depth) {
    auto vars = vars_of(true);
    int choice = depth == 0 ? pick(3) : pick(8);
    switch (choice) {
      case 0: return "U1";
      case 1:
        if (!vars.empty()) return "D" + std::to_string(vars[pick(static_cast<int>(vars.size()))]);
        return "U1";
      case 2: return fresh(std::string("Constant(") + (pick(2) ? "true" : "false") + ")");
      case 3:
      case 4: {
        static const char* ops[] = {"AND", "OR", "XOR"};
        std::string n = fresh(std::string("Logic(") + ops[pick(3)] + ")");
        wire(gen_bool(depth - 1), n + ".in1");
        wire(gen_bool(depth - 1), n + ".in2");
        return n;
      }
      case 5: {
        std::string n = fresh("Logic(NOT)");
        wire(gen_bool(depth - 1), n + ".in1");
        return n;
      }
      default: {
        static const char* ops[] = {"==", "!=", "<", "<=", ">", ">="};
        std::string n = fresh(std::string("Relational(") + ops[pick(6)] + ")");
        wire(gen_int(depth - 1), n + ".in1");
        wire(gen_int(depth - 1), n + ".in2");
        return n;
      }
    }
  }

  std::string gen_int(int depth) {
    auto vars = vars_of(false);
    int choice = depth == 0 ? pick(3) : pick(7);
    switch (choice) {
      case 0: return "U2";
      case 1:
        if (!vars.empty()) return "D" + std::to_string(vars[pick(static_cast<int>(vars.size()))]);
        return "U2";
      case 2: return fresh("Constant(" + std::to_string(pick(4)) + ") : int[0,3]");
      case 3: {
        std::string n = fresh(pick(2) ? "Sum(++)" : "Sum(+-)");
        wire(gen_int(depth - 1), n + ".in1");
        wire(gen_int(depth - 1), n + ".in2");
        return n;
      }
      case 4: {
        std::string n = fresh(pick(2) ? "MinMax(min)" : "MinMax(max)");
        wire(gen_int(depth - 1), n + ".in1");
        wire(gen_int(depth - 1), n + ".in2");
        return n;
      }
      default: {
        std::string n = fresh("Switch");
        std::string t = gen_int(depth - 1);
        std::string c = gen_bool(depth - 1);
        std::string e = gen_int(depth - 1);
        wire(t, n + ".in1");
        wire(c, n + ".in2");
        wire(e, n + ".in3");
        return n;
      }
    }
  }

  Shape shape_;
  std::mt19937_64 rng_;
  std::vector<std::string> lines_;
  int counter_ = 0;
};

/// A random pair sharing its interface and all but (usually) one definition.
/// B's U2 range is sometimes narrower than A's.
struct RandomPair {
  std::string a;
  std::string b;
};

inline RandomPair random_pair(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RandomModel::Shape shape = RandomModel::random_shape(rng);
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < shape.var_is_bool.size() + shape.out_is_bool.size(); ++i) seeds.push_back(rng());
  std::vector<std::uint64_t> seeds_b = seeds;
  if (rng() % 10 < 7) seeds_b[rng() % seeds_b.size()] = rng();
  RandomModel::Shape shape_b = shape;
  if (shape.u2_hi > 1 && rng() % 10 < 3) shape_b.u2_hi = shape.u2_hi - 1;
  return {RandomModel::text("RandA", shape, seeds), RandomModel::text("RandB", shape_b, seeds_b)};
}

/// Random well-sorted expression over Int inputs X, Y, Var Z and Bool
/// inputs P, Q. Constants include values near the 64-bit limits so that
/// overflow shows up.
inline Expr random_expr(std::mt19937_64& rng, int depth, Sort sort) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  static const Value consts[] = {0, 1, 2, -3, 7, 1LL << 40, std::numeric_limits<Value>::max() / 2,
                                 std::numeric_limits<Value>::min() + 5};
  if (sort == Sort::Bool) {
    if (depth == 0 || pick(5) == 0) {
      switch (pick(3)) {
        case 0: return Expr::input("P", Sort::Bool);
        case 1: return Expr::input("Q", Sort::Bool);
        default: return Expr::boolean(pick(2));
      }
    }
    switch (pick(5)) {
      case 0: return Expr::unary(Op::Not, random_expr(rng, depth - 1, Sort::Bool));
      case 1: {
        static const Op ops[] = {Op::And, Op::Or, Op::Xor, Op::Eq, Op::Ne};
        return Expr::binary(ops[pick(5)], random_expr(rng, depth - 1, Sort::Bool), random_expr(rng, depth - 1, Sort::Bool));
      }
      case 2: return Expr::ite(random_expr(rng, depth - 1, Sort::Bool), random_expr(rng, depth - 1, Sort::Bool),
                               random_expr(rng, depth - 1, Sort::Bool));
      default: {
        static const Op ops[] = {Op::Eq, Op::Ne, Op::Lt, Op::Le, Op::Gt, Op::Ge};
        return Expr::binary(ops[pick(6)], random_expr(rng, depth - 1, Sort::Int), random_expr(rng, depth - 1, Sort::Int));
      }
    }
  }
  if (depth == 0 || pick(5) == 0) {
    switch (pick(4)) {
      case 0: return Expr::input("X", Sort::Int);
      case 1: return Expr::input("Y", Sort::Int);
      case 2: return Expr::var("Z", Sort::Int);
      default: return Expr::integer(consts[pick(8)]);
    }
  }
  switch (pick(4)) {
    case 0: return Expr::unary(Op::Neg, random_expr(rng, depth - 1, Sort::Int));
    case 1: return Expr::ite(random_expr(rng, depth - 1, Sort::Bool), random_expr(rng, depth - 1, Sort::Int),
                             random_expr(rng, depth - 1, Sort::Int));
    default: {
      static const Op ops[] = {Op::Add, Op::Sub, Op::Mul, Op::Min, Op::Max};
      return Expr::binary(ops[pick(5)], random_expr(rng, depth - 1, Sort::Int), random_expr(rng, depth - 1, Sort::Int));
    }
  }
}

inline Value random_leaf(std::mt19937_64& rng, Sort sort) {
  if (sort == Sort::Bool) return static_cast<Value>(rng() % 2);
  static const Value edge[] = {0, 1, -1, 5, std::numeric_limits<Value>::max(), std::numeric_limits<Value>::min(),
                               1LL << 32, -(1LL << 31)};
  return rng() % 3 == 0 ? edge[rng() % 8] : static_cast<Value>(rng() % 41) - 20;
}

/// Every model fixture with the flatten options it needs.
inline std::vector<std::pair<std::string, FlattenOptions>> model_fixtures() {
  FlattenOptions sched;
  sched.order = DataStoreOrder::Schedule;
  std::vector<std::pair<std::string, FlattenOptions>> out;
  for (const char* n : {"flipflop", "flipflop_reset", "nested_flipflop", "limiter_plain", "limiter_sign", "cc_v3", "cc_v4",
                        "toggles3", "counter_ge3", "counter_ge4", "acc_delay", "sample_enabled", "sample_switch",
                        "sample_switch_bug"}) {
    out.emplace_back(std::string(n) + ".dfm", FlattenOptions{});
  }
  out.emplace_back("acc_store.dfm", sched);
  return out;
}

}  // namespace dfc::test
