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

#include <gtest/gtest.h>

#include "dfc/error.hpp"
#include "dfc/solver.hpp"
#include "support.hpp"

namespace dfc {
namespace {

Expr in(const char* n) { return Expr::input(n, Sort::Int); }
Expr lit(Value v) { return Expr::integer(v); }
Expr bin(Op op, Expr a, Expr b) { return Expr::binary(op, std::move(a), std::move(b)); }

TEST(Solver, WitnessOrderIsNameMajorAscending) {
  Solver solver;
  Domain dom{{"x", DataType::integer(0, 3)}, {"y", DataType::integer(0, 3)}, {"z", DataType::integer(2, 5)}};
  auto w = solver.sat_witness(bin(Op::Eq, bin(Op::Add, in("x"), in("y")), lit(3)), dom);
  ASSERT_TRUE(w);
  EXPECT_EQ(*w, (Witness{{"x", 0}, {"y", 3}, {"z", 2}}));
  std::vector<Witness> all;
  solver.for_each_model(bin(Op::Eq, bin(Op::Add, in("x"), in("y")), lit(3)), dom, [&](const Witness& m) {
    all.push_back(m);
    return true;
  });
  ASSERT_EQ(all.size(), 4u);
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i].at("x"), static_cast<Value>(i));
  EXPECT_FALSE(solver.is_sat(bin(Op::Lt, in("x"), lit(0)), dom));
}

TEST(Solver, Implies) {
  Solver solver;
  Domain dom{{"u", DataType::integer(0, 250)}};
  EXPECT_TRUE(solver.implies(bin(Op::Lt, in("u"), lit(2)), bin(Op::Lt, in("u"), lit(3)), dom));
  Witness w;
  EXPECT_FALSE(solver.implies(bin(Op::Lt, in("u"), lit(3)), bin(Op::Lt, in("u"), lit(2)), dom, &w));
  EXPECT_EQ(w.at("u"), 2);
}

TEST(Solver, MinimalCover) {
  Solver solver;
  Domain dom{{"u", DataType::integer(0, 250)}};
  Expr eb = bin(Op::Lt, in("u"), lit(20));
  std::vector<Expr> cands{bin(Op::Lt, in("u"), lit(10)), bin(Op::Ge, in("u"), lit(100)),
                          make_and(bin(Op::Le, lit(10), in("u")), bin(Op::Lt, in("u"), lit(30)))};
  Cover c = solver.minimal_cover(eb, cands, dom);
  ASSERT_TRUE(c.indices);
  EXPECT_EQ(*c.indices, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(c.witnesses[0].at("u"), 0);
  EXPECT_EQ(c.witnesses[1].at("u"), 10);
  cands.pop_back();
  Cover gap = solver.minimal_cover(eb, cands, dom);
  EXPECT_FALSE(gap.indices);
  ASSERT_TRUE(gap.uncovered);
  EXPECT_EQ(gap.uncovered->at("u"), 10);
}

TEST(Solver, ExistsForall) {
  Solver solver;
  Domain free{{"a", DataType::integer(0, 3)}};
  Domain univ{{"u", DataType::integer(0, 3)}};
  Expr cond = bin(Op::Ge, bin(Op::Add, in("u"), in("a")), lit(3));
  EXPECT_EQ(solver.exists_forall(free, univ, cond), (Witness{{"a", 3}}));
  EXPECT_FALSE(solver.exists_forall(free, univ, cond, {{{"a", 3}}}));
  EXPECT_EQ(solver.exists_forall(free, univ, bin(Op::Le, in("a"), in("u"))), (Witness{{"a", 0}}));
  EXPECT_FALSE(solver.exists_forall(free, univ, bin(Op::Eq, in("a"), in("u"))));
}

TEST(Solver, DomainTooLarge) {
  Solver small(100);
  Domain dom{{"u", DataType::integer(0, 1000)}, {"w", DataType::unbounded_integer()}};
  EXPECT_EQ(test::error_kind([&] { small.is_sat(bin(Op::Lt, in("u"), lit(3)), dom); }), ErrorKind::DomainTooLarge);
  EXPECT_NO_THROW(small.is_sat(bin(Op::Lt, in("u"), lit(3)), {{"u", DataType::integer(0, 99)}}));
  Solver solver;
  EXPECT_EQ(test::error_kind([&] { solver.is_sat(bin(Op::Lt, in("w"), lit(3)), dom); }), ErrorKind::DomainTooLarge);
  EXPECT_TRUE(solver.is_sat(bin(Op::Lt, in("u"), lit(3)), dom));
}

TEST(Solver, PoisonedGuardIsAnError) {
  Solver solver;
  Domain dom{{"u", DataType::integer(0, 1)}};
  Expr big = lit(std::numeric_limits<Value>::max());
  Expr g = bin(Op::Gt, bin(Op::Add, big, in("u")), lit(0));
  EXPECT_EQ(test::error_kind([&] { solver.implies(Expr::boolean(true), g, dom); }), ErrorKind::ArithmeticOverflow);
  EXPECT_TRUE(solver.implies(g, Expr::boolean(true), dom));
  EXPECT_FALSE(solver.is_sat(make_and(Expr::boolean(false), g), dom));
}

TEST(Smt, ScriptsDeclareBoundedVariables) {
  Domain dom{{"u", DataType::integer(0, 250)}, {"b", DataType::boolean()}};
  std::string s = smt_sat(make_and(Expr::input("b", Sort::Bool), bin(Op::Lt, in("u"), lit(3))), dom);
  EXPECT_NE(s.find("(declare-const |u| Int)"), std::string::npos) << s;
  EXPECT_NE(s.find("(declare-const |b| Bool)"), std::string::npos) << s;
  EXPECT_NE(s.find("(assert (and (<= 0 |u|) (<= |u| 250)))"), std::string::npos) << s;
  EXPECT_NE(s.find("(check-sat)"), std::string::npos);
  EXPECT_EQ(smt_expr(bin(Op::Min, in("u"), lit(-2))), "(ite (<= |u| (- 2)) |u| (- 2))");
  EXPECT_NE(smt_exists_forall({{"a", DataType::boolean()}}, dom, Expr::input("a", Sort::Bool)).find("forall"),
            std::string::npos);
}

TEST(Smt, AgreesWithAnExternalSolver) {
  std::string cmd = test::find_solver();
  if (cmd.empty()) GTEST_SKIP() << "no SMT solver found";
  Solver solver;
  std::mt19937_64 rng(23);
  Domain dom{{"X", DataType::integer(-3, 3)}, {"Y", DataType::integer(0, 2)}, {"Z", DataType::integer(-1, 1)},
             {"P", DataType::boolean()}, {"Q", DataType::boolean()}};
  int compared = 0;
  while (compared < 40) {
    Expr g = test::random_expr(rng, 3, Sort::Bool);
    bool poisoned = false;
    solver.enumerate({g}, dom, [&](const Witness&, const std::vector<std::optional<Value>>& r) {
      poisoned = !r[0];
      return !poisoned;
    });
    if (poisoned) continue;
    auto ext = run_external_solver(cmd, smt_sat(g, dom));
    ASSERT_TRUE(ext) << cmd;
    EXPECT_EQ(*ext, solver.is_sat(g, dom)) << to_string(g);
    ++compared;
  }
}

}  // namespace
}  // namespace dfc
