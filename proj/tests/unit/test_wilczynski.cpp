#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "varode/wilczynski/curve.hpp"
#include "varode/wilczynski/generalized.hpp"

using namespace varode;

namespace {

Expr P(const std::string& s) { return parse_expr(s); }

LinearODECoeffs const_coeffs(int N, std::vector<long> p) {
  std::vector<Expr> e;
  for (long v : p) e.push_back(make_const(Rational(v)));
  return symbolic_coeffs(N, e);
}

std::vector<double> default_grid() { return GridSpec{0.0, 1.0, 32}.points(); }

}  // namespace

TEST_CASE("wilczynski coefficient values") {
  REQUIRE(wilczynski_coefficient(5, 6, 1) == Rational(30240));
  REQUIRE(wilczynski_coefficient(5, 3, 1) == Rational(72));
}

TEST_CASE("invariants of constant canonical coefficients") {
  // N=5, p0 = 1: W3 = W4 = W5 = 0, W6 = 30240
  auto c = const_coeffs(5, {1, 0, 0, 0, 0, 0});
  auto w = wilczynski_invariants(c);
  REQUIRE(w.symbolic);
  REQUIRE(is_zero_sym(w.sym[0]));
  REQUIRE(is_zero_sym(w.sym[1]));
  REQUIRE(is_zero_sym(w.sym[2]));
  REQUIRE(is_zero_sym(w.sym[3] - make_const(30240)));
  REQUIRE(odd_invariants_vanish(w));
  REQUIRE_FALSE(flatness_test(w));
}

TEST_CASE("W3 = 72 t for p3 = t") {
  std::vector<Expr> p{make_const(0), make_const(0), make_const(0),
                      ex_t(),        make_const(0), make_const(0)};
  auto w = wilczynski_invariants(symbolic_coeffs(5, p));
  REQUIRE(is_zero_sym(w.sym[0] - 72 * ex_t()));
  REQUIRE_FALSE(odd_invariants_vanish(w));
  REQUIRE_FALSE(flatness_test(w));
}

TEST_CASE("all-zero coefficients give flat invariants") {
  auto w = wilczynski_invariants(const_coeffs(5, {0, 0, 0, 0, 0, 0}));
  for (const auto& e : w.sym) REQUIRE(is_zero_sym(e));
  REQUIRE(flatness_test(w));
}

TEST_CASE("canonicalize leaves canonical systems unchanged") {
  auto c0 = const_coeffs(5, {0, 0, 0, 0, 0, 0});
  auto r0 = canonicalize(c0);
  REQUIRE(r0.symbolic);
  for (const auto& e : r0.p_sym) REQUIRE(is_zero_sym(e));

  auto c1 = const_coeffs(5, {1, 0, 0, 0, 0, 0});
  auto r1 = canonicalize(c1);
  REQUIRE(r1.symbolic);
  REQUIRE(is_zero_sym(r1.p_sym[0] - make_const(1)));

  // sampled canonical input is returned as-is
  auto m = materialize_coeffs(c1, default_grid(), 12);
  auto rm = canonicalize(m);
  REQUIRE_FALSE(rm.symbolic);
  REQUIRE(rm.pjets[5][0].value() == Catch::Approx(1.0));
}

TEST_CASE("canonicalize pN = const: gauge-equivalent inputs give identical output") {
  // m = N+1 = 6, u^(6) = c u^(5); independent oracle: substitute u = s v with
  // s = exp(c t / 6) and collect with the binomial theorem.
  const int N = 5, m = 6;
  const Rational crat(4, 5);
  const double cval = 0.8;
  std::vector<Expr> p(m, make_const(0));
  p[5] = make_const(crat);
  auto original = symbolic_coeffs(N, p);

  auto binom = [](int a, int b) {
    Rational r(1);
    for (int i = 0; i < b; ++i) r = r * Rational(a - i) / Rational(i + 1);
    return r;
  };
  // q_j = -[C(m,j) g^{m-j} - sum_{k=j}^{m-1} p_k C(k,j) g^{k-j}], g = c/m
  Rational g = crat / m;
  std::vector<Rational> pv(m + 1, Rational(0));
  pv[5] = crat;
  std::vector<Expr> q(m, make_const(0));
  for (int j = 0; j < m; ++j) {
    Rational acc = -binom(m, j) * rat_pow(g, m - j);
    for (int k = j; k <= m - 1; ++k) acc += pv[k] * binom(k, j) * rat_pow(g, k - j);
    q[j] = make_const(acc);
  }
  REQUIRE(is_zero_sym(q[5]));  // scaling kills p_{m-1}

  auto grid = default_grid();
  auto cp = canonicalize_full(materialize_coeffs(original, grid, 14));
  auto cq = canonicalize_full(materialize_coeffs(symbolic_coeffs(N, q), grid, 14));

  // canonical form is pinned by lambda(t0)=t0, lambda'=1, lambda''=0, chi=1,
  // so both routes must agree (up to numerics)
  for (std::size_t s = 0; s < grid.size(); ++s) {
    REQUIRE(cp.coeffs.grid[s] == Catch::Approx(cq.coeffs.grid[s]).margin(1e-7));
    for (int j = 0; j <= N; ++j)
      REQUIRE(cp.coeffs.pjets[s][j].value() ==
              Catch::Approx(cq.coeffs.pjets[s][j].value()).margin(2e-5));
  }
  // canonical-form conditions on the output
  for (std::size_t s = 0; s < grid.size(); ++s) {
    REQUIRE(std::abs(cp.coeffs.pjets[s][N].value()) < 1e-7);
    REQUIRE(std::abs(cp.coeffs.pjets[s][N - 1].value()) < 1e-7);
  }
}

TEST_CASE("canonicalize transports explicit solutions onto the canonical equation") {
  // u^(6) = u^(5): canonicalize, then check w(tau) = u(t)/chi(t) satisfies
  // the canonical equation, with all tau-derivatives via jet composition.
  const int N = 5, m = 6;
  std::vector<Expr> p(m, make_const(0));
  p[5] = make_const(1);
  auto grid = GridSpec{0.0, 1.0, 24}.points();
  auto cf = canonicalize_full(materialize_coeffs(symbolic_coeffs(N, p), grid, 16));

  for (std::size_t s : {std::size_t(3), std::size_t(12), std::size_t(20)}) {
    double t = cf.t_grid[s];
    const auto& lam = cf.lam_derivs[s];
    const auto& chi = cf.chi_derivs[s];
    std::size_t avail = std::min(lam.size(), chi.size() + 1);
    REQUIRE(avail >= static_cast<std::size_t>(m + 2));
    // u = e^t jets
    Jet u(0.0, avail);
    double fact = 1.0;
    for (std::size_t k = 0; k < avail; ++k) {
      if (k >= 2) fact *= static_cast<double>(k);
      u.c[k] = std::exp(t) / fact;
    }
    Jet chij(0.0, avail), mu(0.0, avail);
    fact = 1.0;
    for (std::size_t k = 0; k < avail; ++k) {
      if (k >= 2) fact *= static_cast<double>(k);
      if (k < chi.size()) chij.c[k] = chi[k] / fact;
      if (k >= 1) mu.c[k] = lam[k] / fact;
    }
    Jet w_t = u / chij;                            // w(lambda(t)) as jet in t
    Jet w_tau = jet_compose(w_t, jet_revert(mu));  // w as jet in tau
    REQUIRE(w_tau.size() >= static_cast<std::size_t>(m + 1));
    double lhs = w_tau.deriv(m);
    double rhs = 0.0;
    for (int j = 0; j <= N; ++j) rhs += cf.coeffs.pjets[s][j].value() * w_tau.deriv(j);
    REQUIRE(lhs == Catch::Approx(rhs).epsilon(5e-4).margin(5e-4));
  }
}

TEST_CASE("fundamental system of the trivial equation is a rational normal curve") {
  auto grid = default_grid();
  auto pc = fundamental_system(const_coeffs(5, {0, 0, 0, 0, 0, 0}), grid);
  REQUIRE(pc.min_frame_det > 1e-6);
  // e0 components are (t-t0)^j / j!
  double t = grid[20];
  double fact = 1.0;
  for (int j = 0; j <= 5; ++j) {
    if (j >= 2) fact *= j;
    REQUIRE(pc.frames[20](j, 0) == Catch::Approx(std::pow(t, j) / fact).margin(1e-10));
  }
}

TEST_CASE("osculating flag of the rational normal curve at t0") {
  auto grid = default_grid();
  auto pc = fundamental_system(const_coeffs(5, {0, 0, 0, 0, 0, 0}), grid);
  auto flag = osculating_flag(pc, 2);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(6, 3);
  expected(0, 0) = expected(1, 1) = expected(2, 2) = 1.0;
  REQUIRE(subspace_angle(flag[0], expected) < 1e-8);
  auto full = osculating_flag(pc, 5);
  REQUIRE(full[10].cols() == 6);
}

TEST_CASE("selfdual test: rational normal curve admits a skew form") {
  auto grid = default_grid();
  auto pc = fundamental_system(const_coeffs(5, {0, 0, 0, 0, 0, 0}), grid);
  auto df = selfdual_test(pc, 1e-6);
  REQUIRE(df.has_value());
  REQUIRE(df->residual < 1e-10);
  double worst = 0.0;
  for (std::size_t s = 0; s < grid.size(); ++s)
    for (int i = 0; i <= 2; ++i)
      for (int j = 0; j <= 2; ++j) {
        Eigen::VectorXd ei = pc.frames[s].col(i), ej = pc.frames[s].col(j);
        worst = std::max(worst,
                         std::abs(ei.dot(df->B * ej)) / (ei.norm() * ej.norm()));
      }
  REQUIRE(worst < 1e-8);
}

TEST_CASE("selfdual test: y^(6) = y^(5) has no skew duality form") {
  auto grid = default_grid();
  auto pc = fundamental_system(const_coeffs(5, {0, 0, 0, 0, 0, 1}), grid);
  REQUIRE_FALSE(selfdual_test(pc, 1e-6).has_value());
}

TEST_CASE("selfdual and flatness verdicts invariant under GL maps and affine reparametrization") {
  std::mt19937_64 rng(77);
  auto grid = default_grid();
  auto base = const_coeffs(5, {0, 0, 0, 0, 0, 0});
  auto neg = const_coeffs(5, {0, 0, 0, 0, 0, 1});
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::MatrixXd T(6, 6);
    do {
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) T(i, j) = u(rng);
    } while (std::abs(T.determinant()) < 1e-2);
    for (const auto* cc : {&base, &neg}) {
      auto pc = fundamental_system(*cc, grid);
      bool before = selfdual_test(pc, 1e-6).has_value();
      ProjectiveCurve tc = pc;
      for (auto& f : tc.frames) f = T * f;
      bool after = selfdual_test(tc, 1e-6).has_value();
      REQUIRE(before == after);
    }
  }
  std::vector<double> grid2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) grid2[i] = 0.5 * grid[i] + 0.2;
  auto pc2 = fundamental_system(const_coeffs(5, {0, 0, 0, 0, 0, 0}), grid2);
  REQUIRE(selfdual_test(pc2, 1e-6).has_value());
}

TEST_CASE("compare_projective recovers planted transforms") {
  auto grid = default_grid();
  auto pc = fundamental_system(const_coeffs(5, {1, 0, 0, 0, 0, 0}), grid);
  auto self = compare_projective(pc, pc, 1e-8);
  REQUIRE(std::holds_alternative<ProjectiveMatch>(self));
  {
    auto& m = std::get<ProjectiveMatch>(self);
    REQUIRE(m.residual < 1e-10);
    Eigen::MatrixXd A = m.A / m.A(0, 0);
    REQUIRE((A - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-7);
  }
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd T(6, 6);
  do {
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) T(i, j) = u(rng);
  } while (std::abs(T.determinant()) < 1e-2);
  ProjectiveCurve tc = pc;
  for (auto& f : tc.frames) f = T * f;
  auto planted = compare_projective(pc, tc, 1e-8);
  REQUIRE(std::holds_alternative<ProjectiveMatch>(planted));
  auto& m = std::get<ProjectiveMatch>(planted);
  REQUIRE(m.residual < 1e-10);
  Eigen::MatrixXd ratio = m.A * T.inverse();
  double scale = ratio(0, 0);
  REQUIRE((ratio / scale - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-6);
}

TEST_CASE("generalized Wilczynski invariant, order 6") {
  REQUIRE(is_zero_sym(generalized_wilczynski_order6(make_ode(6, make_const(0)))));
  REQUIRE(is_zero_sym(generalized_wilczynski_order6(make_ode(6, -ex_y(0)))));
  REQUIRE(is_zero_sym(generalized_wilczynski_order6(make_ode(6, ex_y(0)))));
  auto L = make_lagrangian(3, P("y3^(1/3)"));
  Expr W = generalized_wilczynski_order6(euler_lagrange(L));
  REQUIRE(is_zero(W, {1e-9, 99}) == Verdict::Nonzero);
}

TEST_CASE("generalized Wilczynski invariant, order 8") {
  REQUIRE(is_zero_sym(generalized_wilczynski_order8(make_ode(8, make_const(0)))));
  REQUIRE(is_zero_sym(generalized_wilczynski_order8(make_ode(8, -ex_y(0)))));
  auto L = make_lagrangian(4, P("y4^2 + y0^2"));
  REQUIRE(is_zero_sym(generalized_wilczynski_order8(euler_lagrange(L))));
}

TEST_CASE("two W4 routes agree up to the canonicalization weight") {
  // generalized invariant along a solution vs (linearize -> canonicalize ->
  // W4), which transforms with weight (lambda')^4
  auto L = make_lagrangian(3, P("y3^(1/3)"));
  OrdODE E = euler_lagrange(L);
  Expr Wsym = generalized_wilczynski_order6(E);
  GridSpec g{0.0, 0.5, 32};
  Trajectory tr = solve_ivp(E, {0.0, 0.2, -0.1, 1.2, 0.4, 0.2}, g);
  auto lin = linearize_along(E, tr, 10);
  auto cf = canonicalize_full(lin);
  auto w = wilczynski_invariants(cf.coeffs);

  std::vector<double> ratio;
  for (std::size_t s = 0; s < tr.grid.size(); ++s) {
    Point pt{{var_x(), tr.grid[s]}};
    for (int j = 0; j <= 5; ++j) pt[var_y(j)] = tr.samples[s][j];
    double wg = eval_numeric(Wsym, pt);
    double wp = w.values[1][s];  // W4
    double lp = cf.rate[s];
    if (std::abs(wg) > 1e-6) ratio.push_back(wp * std::pow(lp, 4) / wg);
  }
  REQUIRE(ratio.size() > 20);
  double med = ratio[ratio.size() / 2];
  INFO("ratio = " << med);
  for (double r : ratio) REQUIRE(r == Catch::Approx(med).epsilon(1e-5));
}
