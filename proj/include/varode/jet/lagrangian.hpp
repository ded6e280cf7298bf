#ifndef VARODE_JET_LAGRANGIAN_HPP
#define VARODE_JET_LAGRANGIAN_HPP

#include <stdexcept>
#include <string>

#include "varode/expr/jet_context.hpp"
#include "varode/expr/parser.hpp"

namespace varode {

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Order-n Lagrangian density f(x, y0..yn) dx, n >= 2.
struct Lagrangian {
  int n{2};
  Expr f;
};

inline Lagrangian make_lagrangian(int n, Expr f) {
  if (n < 2) throw InvalidInput("Lagrangian order must be >= 2");
  if (max_jet_index(f) > n)
    throw InvalidInput("Lagrangian density depends on jets above its order");
  return {n, std::move(f)};
}

// Explicit ODE y^(order) = F(x, y0..y_{order-1}) as the hypersurface
// {y_order = F}.
struct OrdODE {
  int order{2};  // N+1
  Expr rhs;
  bool explicit_form{true};  // implicit fallback is kept for API completeness
  Expr implicit;             // raw E(f) when not solvable
};

inline OrdODE make_ode(int order, Expr rhs) {
  if (order < 2) throw InvalidInput("ODE order must be >= 2");
  if (max_jet_index(rhs) >= order)
    throw InvalidInput("ODE right-hand side depends on the top derivative");
  return {order, std::move(rhs), true, make_const(0)};
}

enum class NondegStatus { Ok, Degenerate, LinearInTop };

inline const char* nondeg_name(NondegStatus s) {
  switch (s) {
    case NondegStatus::Ok: return "ok";
    case NondegStatus::Degenerate: return "degenerate";
    case NondegStatus::LinearInTop: return "linear_in_top";
  }
  return "?";
}

// f_{y_n y_n} identically zero means f is (at most) linear in the top jet;
// such Lagrangians reduce to lower order and are rejected for geometric use.
inline NondegStatus check_nondegenerate(const Lagrangian& L,
                                        const ZeroTestOptions& opt = {}) {
  Expr fnn = diff(L.f, var_y(L.n), 2);
  switch (is_zero(fnn, opt)) {
    case Verdict::Zero: return NondegStatus::LinearInTop;
    case Verdict::ProbablyZero: return NondegStatus::Degenerate;
    case Verdict::Nonzero: return NondegStatus::Ok;
  }
  return NondegStatus::Degenerate;
}

// E(f) = sum_k (-1)^k D_x^k f_{y_k}; the raw expression before solving.
inline Expr euler_lagrange_raw(const Lagrangian& L) {
  auto ctx = JetContext::free_jets(2 * L.n);
  Expr e = make_const(0);
  for (int k = 0; k <= L.n; ++k) {
    Expr term = total_derivative(diff(L.f, var_y(k)), ctx, k);
    e = (k % 2 == 0) ? e + term : e - term;
  }
  return normalize(e);
}

// Solve E(f) = 0 for y_{2n}. The coefficient of y_{2n} is +-f_{y_n y_n},
// nonzero for nondegenerate L, and the division is exact in the expression
// algebra, so the explicit form always materializes here.
inline OrdODE euler_lagrange(const Lagrangian& L) {
  if (check_nondegenerate(L) != NondegStatus::Ok)
    throw InvalidInput("degenerate Lagrangian: f_{y_n y_n} vanishes identically");
  Expr e = euler_lagrange_raw(L);
  Var top = var_y(2 * L.n);
  Expr c = diff(e, top);
  if (is_zero_sym(c))
    throw InvalidInput("degenerate Lagrangian: coefficient of y_{2n} vanishes");
  Expr rest = normalize(subst_var(e, top, make_const(0)));
  Expr F = normalize(make_const(-1) * rest / c);
  OrdODE ode = make_ode(2 * L.n, F);
  ode.implicit = e;
  return ode;
}

// Null Lagrangians: f -> f + D_x g with ord(g) <= n-1 keeps the same EL
// equation and the same order.
inline Lagrangian divergence_shift(const Lagrangian& L, const Expr& g) {
  if (max_jet_index(g) > L.n - 1)
    throw InvalidInput("divergence shift requires ord(g) <= n-1");
  auto ctx = JetContext::free_jets(L.n);
  return {L.n, normalize(L.f + total_derivative(g, ctx))};
}

struct WeightedDegreeReport {
  bool is_polynomial_in_high_jets{true};
  Rational weighted_degree{0};
  bool pass{true};
  std::string witness;  // offending monomial when failing
};

// Variational ODEs of order 2n have F polynomial in y_{n+1}..y_{2n-1} with
// weights 1..n-1 and weighted degree <= n.
inline WeightedDegreeReport weighted_degree_check(const OrdODE& E, int n) {
  if (E.order != 2 * n) throw InvalidInput("weighted_degree_check: order mismatch");
  WeightedDegreeReport rep;
  FracForm f = ff_reduce(expr_to_frac(E.rhs));
  auto is_high = [n, &E](const Var& v) {
    return v.kind == VarKind::Y && v.index >= n + 1 && v.index <= E.order - 1;
  };
  auto atom_touches_high = [&is_high](const Atom& a) {
    if (a.is_var) return is_high(a.v);
    for (const Var& v : free_vars(a.base))
      if (is_high(v)) return true;
    return false;
  };
  for (const auto& d : f.den)
    for (const auto& t : d.base)
      for (const auto& [at, ex] : t.first.f)
        if (atom_touches_high(at)) {
          rep.is_polynomial_in_high_jets = false;
          rep.pass = false;
          rep.witness = to_string(poly_to_expr(d.base));
          return rep;
        }
  Rational maxdeg(0);
  for (const auto& [m, c] : f.num) {
    Rational wd(0);
    for (const auto& [at, ex] : m.f) {
      if (!at.is_var) {
        if (atom_touches_high(at)) {
          rep.is_polynomial_in_high_jets = false;
          rep.pass = false;
          rep.witness = to_string(mono_to_expr(m, c));
          return rep;
        }
        continue;
      }
      if (!is_high(at.v)) {
        if (at.v.kind == VarKind::Y && ex < 0 && at.v.index > n) {
          // cannot happen: is_high covers n+1..2n-1
        }
        continue;
      }
      if (!is_integer(ex) || ex < 0) {
        rep.is_polynomial_in_high_jets = false;
        rep.pass = false;
        rep.witness = to_string(mono_to_expr(m, c));
        return rep;
      }
      wd += ex * Rational(at.v.index - n);
    }
    if (wd > maxdeg) {
      maxdeg = wd;
      if (wd > n) rep.witness = to_string(mono_to_expr(m, c));
    }
  }
  rep.weighted_degree = maxdeg;
  rep.pass = rep.is_polynomial_in_high_jets && maxdeg <= n;
  return rep;
}

}  // namespace varode

#endif
