#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "varode/jet/linearize.hpp"

using namespace varode;

namespace {

Expr P(const std::string& s) { return parse_expr(s); }
bool same(const Expr& a, const Expr& b) { return is_zero_sym(a - b); }

// random polynomial Lagrangian with f_{y_n y_n} = 2 identically
Lagrangian random_quadratic_lagrangian(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> coeff(-3, 3), pick(0, n - 1), deg(1, 2);
  Expr g = make_const(0);
  for (int t = 0; t < 4; ++t) {
    int c = coeff(rng);
    if (c == 0) c = 2;
    Expr term = make_const(c);
    int d = deg(rng);
    for (int i = 0; i < d; ++i) term = term * ex_y(pick(rng));
    g = g + term;
  }
  return make_lagrangian(n, ex_pow(ex_y(n), Rational(2)) + g);
}

Expr random_low_order(std::mt19937_64& rng, int maxv) {
  std::uniform_int_distribution<int> coeff(-3, 3), pick(0, maxv), deg(1, 2);
  Expr g = make_const(0);
  for (int t = 0; t < 3; ++t) {
    int c = coeff(rng);
    if (c == 0) c = 1;
    Expr term = make_const(c);
    int d = deg(rng);
    for (int i = 0; i < d; ++i) term = term * ex_y(pick(rng));
    g = g + term;
  }
  return g;
}

}  // namespace

TEST_CASE("euler-lagrange of the flat models") {
  for (int n : {3, 4, 5}) {
    auto L = make_lagrangian(n, ex_pow(ex_y(n), Rational(2)));
    OrdODE e = euler_lagrange(L);
    REQUIRE(e.order == 2 * n);
    REQUIRE(is_zero_sym(e.rhs));
  }
}

TEST_CASE("euler-lagrange of y3^(1/3) matches the remark-table equation") {
  auto L = make_lagrangian(3, P("y3^(1/3)"));
  OrdODE e = euler_lagrange(L);
  // 9 y3^2 y6 - 45 y3 y4 y5 + 40 y4^3 = 0  =>  y6 = F
  Expr identity = 9 * ex_pow(ex_y(3), Rational(2)) * e.rhs -
                  45 * ex_y(3) * ex_y(4) * ex_y(5) + 40 * ex_pow(ex_y(4), Rational(3));
  REQUIRE(is_zero_sym(identity));
  REQUIRE(same(e.rhs, P("5*y4*y5/y3 - (40/9)*y4^3/y3^2")));
}

TEST_CASE("euler-lagrange of y3^2 + y0^2") {
  auto L = make_lagrangian(3, P("y3^2 + y0^2"));
  OrdODE e = euler_lagrange(L);
  REQUIRE(same(e.rhs, ex_y(0)));
}

TEST_CASE("nondegeneracy check") {
  REQUIRE(check_nondegenerate(make_lagrangian(3, P("y3^2"))) == NondegStatus::Ok);
  REQUIRE(check_nondegenerate(make_lagrangian(3, P("x*y3 + y0^2"))) ==
          NondegStatus::LinearInTop);
  auto L = make_lagrangian(3, P("y3^(1/3)"));
  REQUIRE(check_nondegenerate(L) == NondegStatus::Ok);
  Expr f33 = diff(L.f, var_y(3), 2);
  REQUIRE(same(f33, Rational(-2, 9) * ex_pow(ex_y(3), Rational(-5, 3))));
}

TEST_CASE("weighted degree check") {
  REQUIRE(weighted_degree_check(make_ode(6, make_const(0)), 3).pass);
  auto L = make_lagrangian(3, P("y3^(1/3)"));
  auto rep = weighted_degree_check(euler_lagrange(L), 3);
  REQUIRE(rep.pass);
  REQUIRE(rep.weighted_degree == 3);
  auto bad = weighted_degree_check(make_ode(6, P("y5^2")), 3);
  REQUIRE_FALSE(bad.pass);
  REQUIRE_FALSE(bad.witness.empty());
}

TEST_CASE("divergence shift") {
  auto L = make_lagrangian(3, P("y3^2"));
  auto s = divergence_shift(L, ex_y(0));
  REQUIRE(same(s.f, P("y3^2 + y1")));
  REQUIRE_THROWS_AS(divergence_shift(L, ex_y(3)), InvalidInput);
}

TEST_CASE("EL annihilates divergences") {
  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 8; ++rep) {
    int n = 3;
    auto L = random_quadratic_lagrangian(rng, n);
    Expr g = random_low_order(rng, n - 1);
    auto Ls = divergence_shift(L, g);
    REQUIRE(is_zero_sym(euler_lagrange_raw(L) - euler_lagrange_raw(Ls)));
    REQUIRE(is_zero_sym(euler_lagrange(L).rhs - euler_lagrange(Ls).rhs));
  }
}

TEST_CASE("EL is linear in the density") {
  std::mt19937_64 rng(103);
  for (int rep = 0; rep < 5; ++rep) {
    Expr f1 = random_low_order(rng, 3) + ex_pow(ex_y(3), Rational(2));
    Expr f2 = random_low_order(rng, 3);
    Rational a(3, 2), b(-2, 5);
    Expr lhs = euler_lagrange_raw({3, a * f1 + b * f2});
    Expr rhs = a * euler_lagrange_raw({3, f1}) + b * euler_lagrange_raw({3, f2});
    REQUIRE(is_zero_sym(lhs - rhs));
  }
}

TEST_CASE("Anderson-Thompson necessity on random Lagrangians") {
  std::mt19937_64 rng(107);
  for (int n : {3, 4}) {
    for (int rep = 0; rep < 5; ++rep) {
      auto L = random_quadratic_lagrangian(rng, n);
      auto rep1 = weighted_degree_check(euler_lagrange(L), n);
      INFO("f = " << to_string(L.f));
      REQUIRE(rep1.pass);
    }
  }
}

TEST_CASE("solve_ivp constant solution of the trivial equation") {
  OrdODE E = make_ode(6, make_const(0));
  GridSpec g{0.0, 1.0, 32};
  State init{1, 0, 0, 0, 0, 0};
  Trajectory tr = solve_ivp(E, init, g);
  for (std::size_t i = 0; i < tr.grid.size(); ++i)
    REQUIRE(tr.samples[i][0] == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(tr.max_residual < 1e-8);
}

TEST_CASE("solve_ivp y^(6) = y against the series solution") {
  OrdODE E = make_ode(6, ex_y(0));
  GridSpec g{0.0, 1.0, 32};
  State init{1, 0, 0, 0, 0, 0};
  Trajectory tr = solve_ivp(E, init, g);
  double expect = 0.0;
  for (int k = 0; k <= 4; ++k) {
    double fact = 1.0;
    for (int i = 2; i <= 6 * k; ++i) fact *= i;
    expect += 1.0 / fact;
  }
  REQUIRE(tr.samples.back()[0] == Catch::Approx(expect).epsilon(1e-9));
  REQUIRE(tr.max_residual < 1e-8);
}

TEST_CASE("solve_ivp hits the singular locus of EL(y3^(1/3))") {
  auto L = make_lagrangian(3, P("y3^(1/3)"));
  OrdODE E = euler_lagrange(L);
  GridSpec g{0.0, 1.0, 32};
  State init{1, 0, 0, 0, 1, 0};  // y3 = 0 = singular start
  REQUIRE_THROWS_AS(solve_ivp(E, init, g), IntegrationError);
}

TEST_CASE("trajectory jets reproduce high derivatives of solutions") {
  // y'' = y: jets at x=0 from init (1,1) are those of e^x
  OrdODE E = make_ode(2, ex_y(0));
  auto js = trajectory_jets_at(E.rhs, 0.0, {1.0, 1.0}, 8);
  for (std::size_t k = 0; k <= 8; ++k)
    REQUIRE(js[0].deriv(k) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("linearize trivial and linear equations") {
  OrdODE E0 = make_ode(6, make_const(0));
  GridSpec g{0.0, 1.0, 24};
  Trajectory tr = solve_ivp(E0, {0.3, -1, 0.2, 0, 0.5, 0}, g);
  auto c = linearize_along(E0, tr);
  for (int i = 0; i <= 5; ++i) REQUIRE(is_zero_sym(c.p_field[i]));
  for (const auto& row : c.pjets)
    for (const auto& j : row)
      for (double v : j.c) REQUIRE(v == 0.0);

  OrdODE E1 = make_ode(6, ex_y(0));
  Trajectory tr1 = solve_ivp(E1, {1, 0, 0, 0, 0, 0}, g);
  auto c1 = linearize_along(E1, tr1);
  REQUIRE(same(c1.p_field[0], make_const(1)));
  for (const auto& row : c1.pjets) {
    REQUIRE(row[0].value() == Catch::Approx(1.0));
    for (int i = 1; i <= 5; ++i) REQUIRE(row[i].value() == 0.0);
  }
}

TEST_CASE("linearize EL(y3^(1/3)): p5 = 5 y4 / y3 along the solution") {
  auto L = make_lagrangian(3, P("y3^(1/3)"));
  OrdODE E = euler_lagrange(L);
  GridSpec g{0.0, 0.5, 24};
  Trajectory tr = solve_ivp(E, {0.0, 0.1, -0.2, 1.0, 0.3, 0.1}, g);
  auto c = linearize_along(E, tr, 8);
  REQUIRE(same(c.p_field[5], P("5*y4/y3")));
  for (std::size_t s = 0; s < tr.grid.size(); ++s) {
    double expect = 5.0 * tr.samples[s][4] / tr.samples[s][3];
    REQUIRE(c.pjets[s][5].value() == Catch::Approx(expect).epsilon(1e-9));
  }
}
