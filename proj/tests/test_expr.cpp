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
#include "dfc/expr.hpp"
#include "dfc/types.hpp"
#include "support.hpp"

namespace dfc {
namespace {

TEST(DataType, ParsePrintRoundTrip) {
  for (const char* text : {"bool", "int[-3,7]", "int", "enum{Off,On,Fault}"}) {
    auto t = parse_data_type(text);
    ASSERT_TRUE(t) << text;
    EXPECT_EQ(t->to_string(), text);
    EXPECT_EQ(parse_data_type(t->to_string()), t);
  }
  EXPECT_FALSE(parse_data_type("int[3,1]"));
  EXPECT_FALSE(parse_data_type("enum{A,A}"));
  EXPECT_FALSE(parse_data_type("float"));
}

TEST(DataType, Values) {
  auto e = DataType::enumeration({"Off", "On"});
  EXPECT_EQ(e.parse_value("On"), 1);
  EXPECT_EQ(e.parse_value("0"), 0);
  EXPECT_EQ(e.format_value(1), "On");
  EXPECT_FALSE(e.parse_value("Dim"));
  auto b = DataType::boolean();
  EXPECT_EQ(b.parse_value("true"), 1);
  EXPECT_EQ(b.format_value(0), "false");
  auto i = DataType::integer(-2, 5);
  EXPECT_EQ(i.domain_size(), 8u);
  EXPECT_FALSE(i.parse_value("6"));
  EXPECT_TRUE(i.is_bounded());
  EXPECT_FALSE(DataType::unbounded_integer().is_bounded());
  EXPECT_TRUE(i.same_kind(DataType::unbounded_integer()));
  EXPECT_FALSE(i.same_kind(b));
}

Valuation leaves(Value x, Value y, Value z, Value p, Value q) {
  return {{"X", x}, {"Y", y}, {"Z", z}, {"P", p}, {"Q", q}};
}

LeafLookup lookup(const Valuation& v) {
  return [&v](Op, const std::string& n) { return v.at(n); };
}

TEST(Expr, OverflowPoisonsStrictOperators) {
  Expr x = Expr::input("X", Sort::Int);
  Expr big = Expr::binary(Op::Add, x, Expr::integer(1));
  Valuation v = leaves(std::numeric_limits<Value>::max(), 0, 0, 0, 0);
  EXPECT_FALSE(try_evaluate(big, lookup(v)));
  EXPECT_THROW(evaluate(big, v), Error);
  try {
    evaluate(big, v);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ArithmeticOverflow);
  }
  Expr cmp = Expr::binary(Op::Lt, big, Expr::integer(0));
  EXPECT_FALSE(try_evaluate(cmp, lookup(v)));
}

TEST(Expr, IteIsLazyAndLogicIsParallel) {
  Expr x = Expr::input("X", Sort::Int);
  Expr p = Expr::input("P", Sort::Bool);
  Expr bad = Expr::binary(Op::Lt, Expr::binary(Op::Mul, x, x), Expr::integer(0));
  Valuation v = leaves(std::numeric_limits<Value>::max(), 0, 0, 0, 0);
  EXPECT_EQ(try_evaluate(Expr::ite(p, bad, Expr::boolean(true)), lookup(v)), 1);
  EXPECT_FALSE(try_evaluate(Expr::ite(Expr::unary(Op::Not, p), bad, Expr::boolean(true)), lookup(v)));
  EXPECT_EQ(try_evaluate(Expr::binary(Op::And, bad, p), lookup(v)), 0);
  EXPECT_EQ(try_evaluate(Expr::binary(Op::Or, Expr::unary(Op::Not, p), bad), lookup(v)), 1);
  EXPECT_FALSE(try_evaluate(Expr::binary(Op::And, bad, Expr::unary(Op::Not, p)), lookup(v)));
}

TEST(Expr, NormalizeIsIdempotentAndSound) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    Sort s = i % 2 ? Sort::Int : Sort::Bool;
    Expr e = test::random_expr(rng, 4, s);
    Expr n = normalize(e);
    ASSERT_EQ(normalize(n), n) << to_string(e);
    for (int k = 0; k < 8; ++k) {
      Valuation v = leaves(test::random_leaf(rng, Sort::Int), test::random_leaf(rng, Sort::Int),
                           test::random_leaf(rng, Sort::Int), test::random_leaf(rng, Sort::Bool),
                           test::random_leaf(rng, Sort::Bool));
      auto before = try_evaluate(e, lookup(v));
      // Normalization may decide a poisoned subterm away, never the reverse.
      if (before) {
        ASSERT_EQ(try_evaluate(n, lookup(v)), before) << to_string(e) << " => " << to_string(n);
      }
    }
  }
}

TEST(Expr, NormalizeCanonicalizesCommutativeOperands) {
  Expr x = Expr::input("X", Sort::Int);
  Expr y = Expr::input("Y", Sort::Int);
  EXPECT_EQ(normalize(Expr::binary(Op::Add, x, y)), normalize(Expr::binary(Op::Add, y, x)));
  Expr p = Expr::input("P", Sort::Bool);
  EXPECT_EQ(normalize(make_not(make_not(p))), p);
  EXPECT_TRUE(normalize(Expr::binary(Op::Lt, Expr::integer(1), Expr::integer(2))).is_true());
}

TEST(Expr, BindAndRefs) {
  Expr e = Expr::binary(Op::Add, Expr::input("X", Sort::Int), Expr::var("Z", Sort::Int));
  RefSet r = refs(e);
  EXPECT_EQ(r.inputs, std::set<std::string>{"X"});
  EXPECT_EQ(r.vars, std::set<std::string>{"Z"});
  Expr b = normalize(dfc::bind(e, Valuation{{"X", 2}, {"Z", 3}}));
  ASSERT_TRUE(b.is_const());
  EXPECT_EQ(b.value(), 5);
}

TEST(Expr, StructuralOrderIsTotal) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    Expr a = test::random_expr(rng, 3, Sort::Int);
    Expr b = test::random_expr(rng, 3, Sort::Int);
    EXPECT_EQ(compare(a, b), -compare(b, a));
    EXPECT_EQ(compare(a, a), 0);
  }
}

}  // namespace
}  // namespace dfc
