#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "subfinsler/expression.hpp"
#include "test_support.hpp"

using namespace subfinsler;
using testing::kind_of;

namespace {

std::size_t syntax_offset(const std::string& src) {
  try {
    Expression::parse(src);
  } catch (const ExpressionError& e) {
    CHECK(e.kind() == ErrorKind::SyntaxError);
    return e.offset();
  }
  FAIL("expected a syntax error for " << src);
  return 0;
}

}  // namespace

TEST_SUITE("expression") {
  TEST_CASE("parse and differentiate examples") {
    const Expression e = Expression::parse("0.5*x + sin(t)");
    CHECK(e.eval(2.0, 0.3) == doctest::Approx(1.0 + std::sin(0.3)));
    for (double t : {-1.0, 0.0, 2.0}) {
      CHECK(e.dx().eval(0.7, t) == doctest::Approx(0.5));
      CHECK(e.dt().eval(0.7, t) == doctest::Approx(std::cos(t)));
    }
    CHECK(e.source() == "0.5*x + sin(t)");
    CHECK(e.depends_on_x());
    CHECK(e.depends_on_t());
    CHECK_FALSE(e.uses_abs());
    CHECK(Expression::parse("abs(x)").uses_abs());
  }

  TEST_CASE("syntax errors are located") {
    CHECK(syntax_offset("x^") == 2);
    CHECK(syntax_offset("") == 0);
    CHECK(syntax_offset("sin x") == 4);
    CHECK(syntax_offset("(x + t") == 6);
    CHECK(syntax_offset("x + y") == 4);
    CHECK(syntax_offset("foo(x)") == 0);
    CHECK(syntax_offset("x t") == 2);
    CHECK(syntax_offset("1.2.3") == 3);
  }

  TEST_CASE("evaluation errors are located") {
    const Expression e = Expression::parse("sqrt(x)");
    CHECK(e.eval(4.0, 0.0) == 2.0);
    try {
      e.eval(-1.0, 0.0);
      FAIL("expected an evaluation error");
    } catch (const ExpressionError& err) {
      CHECK(err.kind() == ErrorKind::EvaluationError);
      CHECK(err.offset() == 0);
    }
    try {
      Expression::parse("1 + 1/(x - 1)").eval(1.0, 0.0);
      FAIL("expected an evaluation error");
    } catch (const ExpressionError& err) {
      CHECK(err.kind() == ErrorKind::EvaluationError);
      CHECK(err.offset() == 5);
    }
  }

  TEST_CASE("precedence and associativity") {
    auto v = [](const char* s) { return Expression::parse(s).eval(0.0, 0.0); };
    CHECK(v("1 + 2*3") == 7.0);
    CHECK(v("8/4/2") == 1.0);
    CHECK(v("2^3^2") == 512.0);
    CHECK(v("-2^2") == -4.0);
    CHECK(v("2^-1") == 0.5);
    CHECK(v("(-2)^2") == 4.0);
    CHECK(v("--3") == 3.0);
    CHECK(v("2*-3") == -6.0);
    CHECK(v("1e-3*1000") == doctest::Approx(1.0));
    CHECK(v("exp(0) + cos(0) - tanh(0) + abs(-2)") == 4.0);
  }

  TEST_CASE("rendering round-trips through the parser") {
    for (const char* s : {"0.5*x + sin(t)", "-x^2/(1+t^2)", "exp(-x*x - t*t)*0.3", "2^x - tanh(t)"}) {
      const Expression e = Expression::parse(s);
      const Expression r = Expression::parse(e.to_string());
      for (double x : {-0.7, 0.2, 1.1}) {
        for (double t : {-0.4, 0.9}) CHECK(r.eval(x, t) == doctest::Approx(e.eval(x, t)).epsilon(1e-14));
      }
    }
    CHECK(Expression::constant(2.5).eval(9, 9) == 2.5);
  }

  TEST_CASE("symbolic derivatives agree with central differences") {
    const std::vector<std::string> corpus = {
        "x",
        "t",
        "3*x - 2*t + 1",
        "x*t",
        "x^2 + t^3",
        "sin(x)*cos(t)",
        "exp(x*t)",
        "sqrt(1 + x^2 + t^2)",
        "tanh(2*x - t)",
        "x/(1 + t^2)",
        "(x + t)^5",
        "2^x",
        "x^t",
        "abs(x - 0.3)*t",
        "sin(exp(x)) + cos(t^2)",
        "0.3*exp(-x^2 - t^2)",
        "1/(2 + sin(x*t))",
        "-x^2*t + t/3",
        "sqrt(abs(x) + 1)",
        "exp(tanh(x))*(t - 1)^2",
    };
    REQUIRE(corpus.size() == 20);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> xs(0.5, 1.5), ts(0.2, 1.2);
    const double h = 1e-5;
    for (const std::string& src : corpus) {
      const Expression e = Expression::parse(src);
      const Expression ex = e.dx(), et = e.dt();
      for (int i = 0; i < 10; ++i) {
        const double x = xs(rng), t = ts(rng);
        const double fx = (e.eval(x + h, t) - e.eval(x - h, t)) / (2 * h);
        const double ft = (e.eval(x, t + h) - e.eval(x, t - h)) / (2 * h);
        CHECK_MESSAGE(std::abs(ex.eval(x, t) - fx) <= 1e-6 * (1 + std::abs(fx)), src);
        CHECK_MESSAGE(std::abs(et.eval(x, t) - ft) <= 1e-6 * (1 + std::abs(ft)), src);
      }
    }
  }

  TEST_CASE("expression fields") {
    const Domain d{-1, 1, -1, 1};
    const GraphField u = expression_field(d, Expression::parse("x*t + t^2"));
    const FieldSample s = u.sample(0.5, -0.25);
    CHECK(s.u == doctest::Approx(0.5 * -0.25 + 0.0625));
    CHECK(s.ux == doctest::Approx(-0.25));
    CHECK(s.ut == doctest::Approx(0.5 - 0.5));
    CHECK(kind_of([&] { u.sample(2, 0); }) == ErrorKind::OutOfDomain);
  }
}
