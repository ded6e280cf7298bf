#ifndef VARODE_EXPR_JET_CONTEXT_HPP
#define VARODE_EXPR_JET_CONTEXT_HPP

#include <optional>
#include <utility>

#include "varode/expr/calculus.hpp"

namespace varode {

// Declared bounds and substitution rule for jet computations.
// top_substitution (index k, F) restricts to the equation manifold
// {y_k = F}: the total derivative replaces y_k by F whenever it is created.
struct JetContext {
  int max_jet_order{0};
  int lagrangian_order{0};           // n
  int ode_order{0};                  // N+1 (= 2n when derived from a Lagrangian)
  std::optional<std::pair<int, Expr>> top_substitution;
  bool prolong_xi{false};            // also map xi_i -> xi_{i+1} (transform derivations)

  static JetContext free_jets(int max_order) {
    JetContext c;
    c.max_jet_order = max_order;
    return c;
  }
  static JetContext on_equation(int ode_order, Expr rhs) {
    JetContext c;
    c.max_jet_order = ode_order;
    c.ode_order = ode_order;
    c.top_substitution = {{ode_order, std::move(rhs)}};
    return c;
  }
};

// D_x e = de/dx + sum_i y_{i+1} de/dy_i (+ xi prolongation when enabled),
// with y_top replaced by F on the equation manifold.
inline Expr total_derivative(const Expr& e, const JetContext& ctx) {
  FracForm f = expr_to_frac(e);
  FracForm r = ff_derivative(f, var_x());
  for (const Var& v : free_vars(e)) {
    if (v.kind == VarKind::Y) {
      FracForm de = ff_derivative(f, v);
      if (ff_is_zero(de)) continue;
      FracForm rhs;
      if (ctx.top_substitution && v.index + 1 == ctx.top_substitution->first)
        rhs = expr_to_frac(ctx.top_substitution->second);
      else
        rhs = ff_from_poly(poly_var(var_y(v.index + 1)));
      r = ff_add(r, ff_mul(rhs, de));
    } else if (ctx.prolong_xi && v.kind == VarKind::Xi) {
      FracForm de = ff_derivative(f, v);
      if (ff_is_zero(de)) continue;
      r = ff_add(r, ff_mul(ff_from_poly(poly_var(var_xi(v.index + 1))), de));
    }
  }
  return frac_to_expr(ff_reduce(r));
}

inline Expr total_derivative(const Expr& e, const JetContext& ctx, int times) {
  Expr r = e;
  for (int i = 0; i < times; ++i) r = total_derivative(r, ctx);
  return r;
}

}  // namespace varode

#endif
