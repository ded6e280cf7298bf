#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "varode/expr/calculus.hpp"
#include "varode/expr/jet_context.hpp"
#include "varode/expr/parser.hpp"

using namespace varode;

namespace {

Expr P(const std::string& s) { return parse_expr(s); }

bool same(const Expr& a, const Expr& b) { return is_zero_sym(a - b); }

// Random polynomial in y0..y_maxv of bounded degree, for property tests.
Expr random_poly(std::mt19937_64& rng, int maxv, int terms, int maxdeg) {
  std::uniform_int_distribution<int> coeff(-5, 5), var(0, maxv), deg(0, maxdeg);
  Expr e = make_const(0);
  for (int t = 0; t < terms; ++t) {
    int c = coeff(rng);
    if (c == 0) c = 1;
    Expr term = make_const(c);
    int nf = deg(rng);
    for (int i = 0; i < nf; ++i) term = term * ex_y(var(rng));
    e = e + term;
  }
  return e;
}

}  // namespace

TEST_CASE("parse literal powers") {
  Expr e = P("y3^2");
  REQUIRE(e->op == ExprOp::Pow);
  REQUIRE(e->value == 2);
  REQUIRE(e->kids[0]->var == var_y(3));

  Expr f = P("y3^(1/3)");
  REQUIRE(f->op == ExprOp::Pow);
  REQUIRE(f->value == Rational(1, 3));
}

TEST_CASE("parse errors carry positions") {
  try {
    P("y3^^2");
    FAIL("expected ParseError");
  } catch (const ParseError& err) {
    REQUIRE(err.offset == 3);
  }
  REQUIRE_THROWS_AS(P("w3 + 1"), ParseError);
  REQUIRE_THROWS_AS(P("y3^(1/0)"), ParseError);
  REQUIRE_THROWS_AS(P("(y3"), ParseError);
}

TEST_CASE("print/parse round trip up to normalization") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 30; ++i) {
    Expr e = normalize(random_poly(rng, 4, 5, 3));
    Expr back = parse_expr(to_string(e));
    REQUIRE(same(e, back));
  }
  Expr q = normalize(P("5*y4*y5/y3 - (40/9)*y4^3/y3^2"));
  REQUIRE(same(q, parse_expr(to_string(q))));
}

TEST_CASE("diff power rule with rational exponents") {
  Expr e = P("y3^2");
  REQUIRE(same(diff(e, var_y(3)), P("2*y3")));
  REQUIRE(is_zero_sym(diff(e, var_y(4))));

  Expr c = diff(P("y3^(1/3)"), var_y(3), 3);
  REQUIRE(same(c, Rational(10, 27) * ex_pow(ex_y(3), Rational(-8, 3))));
  // numeric cross-check at y3 = 2
  Point pt{{var_y(3), 2.0}};
  REQUIRE(eval_numeric(c, pt) ==
          Catch::Approx(10.0 / 27.0 * std::pow(2.0, -8.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("total derivative basic rules") {
  auto ctx = JetContext::free_jets(6);
  REQUIRE(same(total_derivative(ex_y(0), ctx), ex_y(1)));
  REQUIRE(same(total_derivative(2 * ex_y(3), ctx), 2 * ex_y(4)));

  // restriction to the equation manifold {y6 = 0}
  auto on_e = JetContext::on_equation(6, make_const(0));
  REQUIRE(is_zero_sym(total_derivative(ex_y(5), on_e)));
}

TEST_CASE("normalize collapses equal expressions") {
  REQUIRE(is_zero_sym(P("y3*y3 - y3^2")));
  REQUIRE(same(normalize(P("(y3^3)^(1/3)")), ex_y(3)));
  Expr a = ex_y(1), b = ex_y(2);
  Expr lhs = ex_pow(a + b, 2) - a * a - 2 * a * b - b * b;
  REQUIRE(is_zero_sym(lhs));
  // idempotence
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    Expr e = random_poly(rng, 5, 6, 3) / (P("y3^2+1"));
    Expr n1 = normalize(e);
    Expr n2 = normalize(n1);
    REQUIRE(expr_eq(n1, n2));
  }
}

TEST_CASE("normalize verifies positive-domain convention numerically") {
  Expr e = P("(y3^3)^(1/3)");
  Expr n = normalize(e);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int i = 0; i < 5; ++i) {
    Point pt{{var_y(3), u(rng)}};
    REQUIRE(eval_numeric(e, pt) == Catch::Approx(eval_numeric(n, pt)).epsilon(1e-12));
  }
}

TEST_CASE("is_zero verdicts") {
  REQUIRE(is_zero(P("y3 - y3")) == Verdict::Zero);
  REQUIRE(is_zero(P("1/y3")) == Verdict::Nonzero);
  REQUIRE(is_zero(P("y3^2 - y4")) == Verdict::Nonzero);
}

TEST_CASE("eval errors") {
  REQUIRE(eval_numeric(P("y3^2"), {{var_y(3), 3.0}}) == Catch::Approx(9.0));
  REQUIRE(eval_numeric(P("y3^(1/3)"), {{var_y(3), 8.0}}) == Catch::Approx(2.0));
  REQUIRE_THROWS_AS(eval_numeric(P("1/y3"), {{var_y(3), 0.0}}), DomainError);
  REQUIRE_THROWS_AS(eval_numeric(P("y3^(1/2)"), {{var_y(3), -1.0}}), DomainError);
  // odd-denominator exponents extend to negative bases
  REQUIRE(eval_numeric(P("y3^(1/3)"), {{var_y(3), -8.0}}) == Catch::Approx(-2.0));
}

TEST_CASE("commutation identity of partials with the total derivative") {
  std::mt19937_64 rng(23);
  auto ctx = JetContext::free_jets(8);
  for (int rep = 0; rep < 10; ++rep) {
    Expr e = random_poly(rng, 5, 5, 3);
    for (int i = 0; i <= 5; ++i) {
      Var yi = var_y(i);
      Expr lhs = diff(total_derivative(e, ctx), yi) - total_derivative(diff(e, yi), ctx);
      if (i == 0) {
        REQUIRE(is_zero_sym(lhs));
      } else {
        REQUIRE(same(lhs, diff(e, var_y(i - 1))));
      }
    }
  }
}

TEST_CASE("Leibniz rule for the total derivative") {
  std::mt19937_64 rng(29);
  auto ctx = JetContext::free_jets(8);
  for (int rep = 0; rep < 10; ++rep) {
    Expr a = random_poly(rng, 4, 4, 2);
    Expr b = random_poly(rng, 4, 4, 2);
    Expr lhs = total_derivative(a * b, ctx);
    Expr rhs = total_derivative(a, ctx) * b + a * total_derivative(b, ctx);
    REQUIRE(is_zero_sym(lhs - rhs));
  }
}

TEST_CASE("normalize is a congruence for zero testing") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    Expr a = random_poly(rng, 4, 4, 2);
    Expr b = random_poly(rng, 4, 4, 2);
    bool eq_norm = is_zero_sym(normalize(a) - normalize(b));
    bool eq_test = is_zero(a - b) == Verdict::Zero;
    REQUIRE(eq_norm == eq_test);
  }
}

TEST_CASE("eval agrees with direct arithmetic on random expressions") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.3, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    // build a random expression and mirror the arithmetic in plain doubles
    double xv = u(rng), y0v = u(rng), y1v = u(rng);
    Point pt{{var_x(), xv}, {var_y(0), y0v}, {var_y(1), y1v}};
    std::uniform_int_distribution<int> c(-4, 4);
    int c1 = c(rng), c2 = c(rng), c3 = c(rng);
    Expr e = make_const(c1) * ex_x() * ex_y(0) + make_const(c2) * ex_pow(ex_y(1), Rational(3)) -
             make_const(c3) * ex_pow(ex_y(0), Rational(1, 2));
    double direct = c1 * xv * y0v + c2 * y1v * y1v * y1v - c3 * std::sqrt(y0v);
    double got = eval_numeric(e, pt);
    REQUIRE(got == Catch::Approx(direct).epsilon(1e-12).margin(1e-12));
  }
}
