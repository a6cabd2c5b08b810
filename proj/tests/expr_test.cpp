/* Copyright 2026 The SymForge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <gtest/gtest.h>

#include "symforge/evaluate.hpp"
#include "symforge/expr.hpp"

namespace symforge {
namespace {

const Expr x = var_x();

// 7 + 3 * (5 + 2) and its reordering.
Expr seven_plus() { return add(num(7), mul(num(3), add(num(5), num(2)))); }
Expr reordered() { return add(mul(num(3), add(num(5), num(2))), num(7)); }

TEST(OperatorTest, AlphabetAndArity) {
  int binary = 0;
  int unary = 0;
  for (Op op : kAllOps) (arity(op) == 2 ? binary : unary)++;
  EXPECT_EQ(binary, 5);
  EXPECT_EQ(unary, 10);
  for (Op op : {Op::add, Op::sub, Op::mul, Op::div, Op::pow}) EXPECT_EQ(arity(op), 2);
  for (Op op : kAllOps) EXPECT_EQ(op_from_name(op_name(op)), op);
}

TEST(ExprTest, ApplyRejectsWrongArity) {
  EXPECT_THROW(Expr::apply(Op::sin, x, x), std::invalid_argument);
  EXPECT_THROW(Expr::apply(Op::add, x), std::invalid_argument);
}

TEST(ExprTest, AccessorsCheckKind) {
  EXPECT_THROW(x.value(), std::logic_error);
  EXPECT_THROW(num(3).op(), std::logic_error);
  EXPECT_THROW(sin(x).child(1), std::out_of_range);
  EXPECT_EQ(Expr().value(), 0);
}

TEST(MetricsTest, Examples) {
  EXPECT_EQ(metrics(x), (ExprMetrics{0, 0, 1}));
  EXPECT_EQ(metrics(sin(x)), (ExprMetrics{1, 1, 1}));
  EXPECT_EQ(metrics(add(x, mul(x, x))), (ExprMetrics{2, 2, 3}));
}

TEST(StructuralEqualTest, Examples) {
  Expr e = seven_plus();
  EXPECT_TRUE(structural_equal(e, e));
  EXPECT_TRUE(structural_equal(seven_plus(), seven_plus()));
  EXPECT_FALSE(structural_equal(seven_plus(), reordered()));
  EXPECT_FALSE(structural_equal(add(x, num(0)), x));
  EXPECT_FALSE(structural_equal(num(2), num(-2)));
  EXPECT_FALSE(structural_equal(sym(Symbol::c1), sym(Symbol::c2)));
}

TEST(CompareTest, IsATotalOrderConsistentWithEquality) {
  std::vector<Expr> es = {x, num(1), num(-3), sin(x), cos(x), add(x, num(1)), seven_plus(),
                          reordered(), sym(Symbol::pi), pow(x, num(2))};
  for (const auto& a : es)
    for (const auto& b : es) {
      auto ab = compare(a, b);
      auto ba = compare(b, a);
      EXPECT_EQ(ab == 0, structural_equal(a, b));
      EXPECT_EQ(ab < 0, ba > 0);
    }
}

TEST(SubstituteTest, ReplacesEveryOccurrence) {
  Expr e = add(x, mul(x, sym(Symbol::c)));
  Expr r = substitute(e, Symbol::x, num(2));
  EXPECT_EQ(count_symbol(r, Symbol::x), 0u);
  EXPECT_EQ(count_symbol(r, Symbol::c), 1u);
  EXPECT_DOUBLE_EQ(evaluate(r, Point{{Symbol::c, 3.0}}), 8.0);
}

TEST(FreeSymbolsTest, SkipsNumericConstants) {
  Expr e = add(mul(sym(Symbol::pi), x), sym(Symbol::c1));
  EXPECT_EQ(free_symbols(e), (std::vector<Symbol>{Symbol::x, Symbol::c1}));
}

TEST(EvaluateTest, Examples) {
  EXPECT_DOUBLE_EQ(evaluate(add(x, num(1)), Point{{Symbol::x, 0.0}}), 1.0);
  EXPECT_DOUBLE_EQ(evaluate(mul(num(3), add(num(5), num(2))), Point{}), 21.0);
  EXPECT_DOUBLE_EQ(evaluate(seven_plus(), Point{}), 28.0);
  EXPECT_THROW(evaluate(ln(x), Point{{Symbol::x, -1.0}}), DomainError);
}

TEST(EvaluateTest, DomainErrorsCarryTheOffendingNode) {
  Expr bad = ln(sub(x, num(2)));
  Expr e = add(num(1), bad);
  try {
    evaluate(e, Point{{Symbol::x, 1.0}});
    FAIL() << "expected a domain error";
  } catch (const DomainError& err) {
    EXPECT_TRUE(structural_equal(err.where(), bad));
  }
}

TEST(EvaluateTest, EachDomainViolation) {
  Point p{{Symbol::x, -2.0}};
  for (const Expr& e : {ln(x), sqrt(x), div(num(1), sub(x, x)), pow(num(0), num(-1)),
                        asin(x), acos(x), pow(x, div(num(1), num(2))), exp(num(100000))}) {
    EvalResult r = try_evaluate(e, p);
    EXPECT_EQ(r.fault, EvalFault::domain) << to_infix(e);
  }
}

TEST(EvaluateTest, UnboundSymbol) {
  EXPECT_THROW(evaluate(add(x, sym(Symbol::c)), Point{{Symbol::x, 1.0}}), UnboundSymbolError);
  EXPECT_EQ(try_evaluate(sym(Symbol::y1), Point{}).fault, EvalFault::unbound);
}

TEST(EvaluateTest, NumericConstantsNeedNoBinding) {
  EXPECT_NEAR(evaluate(mul(sym(Symbol::pi), ln(sym(Symbol::ee))), Point{}), 3.14159265358979,
              1e-12);
  EXPECT_THROW(Point().set(Symbol::pi, 1.0), std::invalid_argument);
}

TEST(EvaluateTest, ArbitraryPrecisionIntegers) {
  Expr big = num(BigInt("123456789012345678901234567890"));
  EXPECT_NEAR(evaluate(div(big, big), Point{}), 1.0, 1e-15);
}

}  // namespace
}  // namespace symforge
