#ifndef VARODE_WILCZYNSKI_GENERALIZED_HPP
#define VARODE_WILCZYNSKI_GENERALIZED_HPP

#include "varode/jet/lagrangian.hpp"

namespace varode {

// Closed forms of the first nontrivial generalized Wilczynski invariant W_4
// on the equation manifold {y_order = F}, for orders 6 and 8. F_i denotes
// dF/dy_i and a trailing x marks the truncated total derivative.

inline Expr generalized_wilczynski_order6(const OrdODE& E) {
  if (E.order != 6) throw InvalidInput("generalized_wilczynski_order6 needs order 6");
  auto ctx = JetContext::on_equation(6, E.rhs);
  auto Dx = [&ctx](const Expr& e) { return total_derivative(e, ctx); };
  Expr F2 = diff(E.rhs, var_y(2));
  Expr F3 = diff(E.rhs, var_y(3));
  Expr F4 = diff(E.rhs, var_y(4));
  Expr F5 = diff(E.rhs, var_y(5));
  Expr F55 = diff(F5, var_y(5));
  Expr F3x = Dx(F3);
  Expr F4x = Dx(F4);
  Expr F4xx = Dx(F4x);
  Expr F5x = Dx(F5);
  Expr F5xx = Dx(F5x);
  Expr F5xxx = Dx(F5xx);

  Expr W = Rational(-5, 36) * F5xxx + Rational(2, 21) * F4 * F55 +
           Rational(-5, 12) * F3x + Rational(1, 3) * F4xx +
           Rational(5, 18) * F5 * F5xx + Rational(5, 36) * F3 * F5 +
           Rational(-5, 21) * F5 * F5 * F5x + Rational(-37, 126) * F4 * F5x +
           Rational(5, 252) * ex_pow(F5, Rational(4)) + Rational(37, 630) * F4 * F4 +
           Rational(25, 84) * F5x * F5x + Rational(5, 18) * F2 +
           Rational(-5, 18) * F5 * F4x;
  return normalize(W);
}

inline Expr generalized_wilczynski_order8(const OrdODE& E) {
  if (E.order != 8) throw InvalidInput("generalized_wilczynski_order8 needs order 8");
  auto ctx = JetContext::on_equation(8, E.rhs);
  auto Dx = [&ctx](const Expr& e) { return total_derivative(e, ctx); };
  Expr F4 = diff(E.rhs, var_y(4));
  Expr F5 = diff(E.rhs, var_y(5));
  Expr F6 = diff(E.rhs, var_y(6));
  Expr F7 = diff(E.rhs, var_y(7));
  Expr F6x = Dx(F6);
  Expr F6xx = Dx(F6x);
  Expr F7x = Dx(F7);
  Expr F7xx = Dx(F7x);
  Expr F7xxx = Dx(F7xx);

  Expr W = Rational(35, 528) * F5 * F7 + Rational(49, 176) * F7 * F7xx +
           Rational(7, 22) * F6xx + Rational(-35, 176) * F7 * F6x +
           Rational(-1127, 6336) * F7 * F7 * F7x + Rational(161, 3168) * F6 * F7 * F7 +
           Rational(931, 3168) * F7x * F7x + Rational(7, 66) * F4 +
           Rational(47, 1584) * F6 * F6 + Rational(1127, 101376) * ex_pow(F7, Rational(4)) +
           Rational(-329, 1584) * F6 * F7x + Rational(-49, 264) * F7xxx;
  return normalize(W);
}

}  // namespace varode

#endif
