#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "acs/expr.hpp"
#include "acs/random.hpp"

using acs::Expr;
using acs::parse_expr;

namespace {

const std::vector<std::string> kNames = {"x1", "x2", "x3"};

acs::Jet1 eval1(const std::string& text, std::vector<double> point, std::vector<std::string> names = kNames) {
  names.resize(point.size());
  return acs::BoundExpr(parse_expr(text), names).eval<1>(point);
}

Expr random_expr(acs::Rng& rng, int depth) {
  const double r = rng.unit();
  if (depth == 0 || r < 0.25) {
    if (rng.unit() < 0.5) return Expr::variable(kNames[static_cast<std::size_t>(rng.unit() * 3)]);
    const double pool[] = {0.0, 1.0, 2.0, 0.1, 1e-7, 3.5e12, std::numbers::pi, 12345.678};
    return Expr::constant(pool[static_cast<std::size_t>(rng.unit() * 8)]);
  }
  if (r < 0.35) return -random_expr(rng, depth - 1);
  if (r < 0.5) {
    const acs::Func fs[] = {acs::Func::sin, acs::Func::cos, acs::Func::exp,
                            acs::Func::log, acs::Func::sqrt, acs::Func::tanh};
    return Expr::call(fs[static_cast<std::size_t>(rng.unit() * 6)], random_expr(rng, depth - 1));
  }
  const acs::BinaryOp ops[] = {acs::BinaryOp::add, acs::BinaryOp::sub, acs::BinaryOp::mul, acs::BinaryOp::div,
                               acs::BinaryOp::pow};
  return Expr::binary(ops[static_cast<std::size_t>(rng.unit() * 5)], random_expr(rng, depth - 1),
                      random_expr(rng, depth - 1));
}

}  // namespace

TEST(Expr, GrammarExamples) {
  EXPECT_EQ(parse_expr("x1*x2 + sin(x3)"),
            Expr::variable("x1") * Expr::variable("x2") + Expr::call(acs::Func::sin, Expr::variable("x3")));
  EXPECT_EQ(parse_expr("-x1^2"),
            -Expr::binary(acs::BinaryOp::pow, Expr::variable("x1"), Expr::constant(2.0)));
}

TEST(Expr, Precedence) {
  const Expr x = Expr::variable("x1"), y = Expr::variable("x2"), z = Expr::variable("x3");
  using acs::BinaryOp;
  EXPECT_EQ(parse_expr("x1 - x2 - x3"), (x - y) - z);
  EXPECT_EQ(parse_expr("x1 / x2 * x3"), (x / y) * z);
  EXPECT_EQ(parse_expr("x1 + x2 * x3"), x + y * z);
  EXPECT_EQ(parse_expr("x1 ^ x2 ^ x3"), Expr::binary(BinaryOp::pow, x, Expr::binary(BinaryOp::pow, y, z)));
  EXPECT_EQ(parse_expr("x1 ^ -x2"), Expr::binary(BinaryOp::pow, x, -y));
  EXPECT_EQ(parse_expr("(x1 + x2) * x3"), (x + y) * z);
  EXPECT_EQ(parse_expr("- - x1"), -(-x));
  EXPECT_EQ(parse_expr("2 * -x1"), Expr::constant(2.0) * -x);
}

TEST(Expr, NumbersAndConstants) {
  EXPECT_EQ(parse_expr("1.5e-3"), Expr::constant(1.5e-3));
  EXPECT_EQ(parse_expr(".5"), Expr::constant(0.5));
  EXPECT_EQ(parse_expr("2E+2"), Expr::constant(200.0));
  EXPECT_EQ(parse_expr("pi"), Expr::constant(std::numbers::pi));
  EXPECT_EQ(parse_expr("e"), Expr::constant(std::numbers::e));
  EXPECT_EQ(parse_expr("x_1b"), Expr::variable("x_1b"));
}

TEST(Expr, SyntaxErrors) {
  try {
    parse_expr("x1 + * x2");
    FAIL() << "expected a syntax error";
  } catch (const acs::ParseError& e) {
    EXPECT_EQ(e.offset(), 5u);
  }
  EXPECT_THROW(parse_expr(""), acs::ParseError);
  EXPECT_THROW(parse_expr("(x1"), acs::ParseError);
  EXPECT_THROW(parse_expr("x1 x2"), acs::ParseError);
  EXPECT_THROW(parse_expr("foo(x1)"), acs::ParseError);
  EXPECT_THROW(parse_expr("sin x1"), acs::ParseError);
  EXPECT_THROW(parse_expr("0x10"), acs::ParseError);
  EXPECT_THROW(parse_expr("1e"), acs::ParseError);
  EXPECT_THROW(parse_expr("x1 $"), acs::ParseError);
}

TEST(Expr, EvaluationExamples) {
  const auto a = eval1("x1^2", {3.0});
  EXPECT_EQ(a.value(), 9.0);
  EXPECT_EQ(a.partial(0), 6.0);

  const auto b = eval1("exp(-x1)", {0.0, 7.0});
  EXPECT_EQ(b.value(), 1.0);
  EXPECT_EQ(b.partial(0), -1.0);
  EXPECT_EQ(b.partial(1), 0.0);

  EXPECT_THROW(eval1("log(x1)", {-1.0}), acs::DomainError);
  try {
    eval1("x2 + sqrt(x1 - 2)", {1.0, 0.0});
    FAIL() << "expected a domain error";
  } catch (const acs::EvalError& e) {
    EXPECT_EQ(e.subexpression(), "sqrt(x1 - 2)");
  }
}

TEST(Expr, UnboundVariable) {
  const std::vector<std::string> names = {"x", "y"};
  EXPECT_THROW(acs::BoundExpr(parse_expr("x + z"), names), acs::BindError);
  EXPECT_EQ(acs::variables_of(parse_expr("y * x + y")), (std::vector<std::string>{"y", "x"}));  // first appearance
}

TEST(Expr, RoundTripIsStructural) {
  acs::Rng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const Expr e = random_expr(rng, 5);
    const std::string text = acs::to_string(e);
    EXPECT_EQ(parse_expr(text), e) << text;
    EXPECT_EQ(acs::to_string(parse_expr(text)), text);
  }
}

TEST(Expr, OrderTwoTruncatesToOrderOne) {
  const std::vector<std::string> names = {"x1", "x2", "x3"};
  const std::vector<double> point = {0.3, 1.2, 0.7};
  for (const char* text : {"x1*x2 + sin(x3)", "exp(x1*x2)/(1 + x3^2)", "sqrt(x2)*log(x3 + 1) - tanh(x1)^3",
                           "x2^x3 - cos(pi*x1)", "-x1^2 / (x2 - x3)"}) {
    const acs::BoundExpr b(parse_expr(text), names);
    const auto j1 = b.eval<1>(point);
    const auto j2 = b.eval<2>(point).truncate();
    EXPECT_EQ(j1.value(), j2.value()) << text;
    for (std::size_t a = 0; a < 3; ++a) EXPECT_EQ(j1.partial(a), j2.partial(a)) << text;
  }
}

TEST(Expr, ParsingIsDeterministic) {
  const std::string text = "x1*exp(-x2^2)/(1 + x3) - 0.25*cos(pi*x1)";
  EXPECT_EQ(parse_expr(text), parse_expr(text));
  EXPECT_EQ(acs::to_string(parse_expr(text)), acs::to_string(parse_expr(text)));
}
