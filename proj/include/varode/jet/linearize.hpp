#ifndef VARODE_JET_LINEARIZE_HPP
#define VARODE_JET_LINEARIZE_HPP

#include "varode/jet/trajectory.hpp"

namespace varode {

// Coefficients p_0..p_N of a linear ODE u^(N+1) = sum p_i u^(i), either
// symbolic in t or sampled on a grid with Taylor jet stacks deep enough for
// the Wilczynski formulas.
struct LinearODECoeffs {
  int N{0};
  bool symbolic{false};
  std::vector<Expr> p_sym;               // size N+1 when symbolic
  std::vector<double> grid;
  std::vector<std::vector<Jet>> pjets;   // [sample][i] jets in t
  std::vector<Expr> p_field;             // optional: p_i as functions on the equation chart

  // p_i(t) by local Taylor expansion (sampled) or direct evaluation.
  double eval(int i, double t) const {
    if (symbolic) return eval_numeric(p_sym[i], {{var_t(), t}});
    std::size_t best = 0;
    double bd = std::abs(t - grid[0]);
    for (std::size_t s = 1; s < grid.size(); ++s) {
      double d = std::abs(t - grid[s]);
      if (d < bd) { bd = d; best = s; }
    }
    const Jet& j = pjets[best][i];
    double ds = t - grid[best], acc = 0.0, p = 1.0;
    for (double c : j.c) { acc += c * p; p *= ds; }
    return acc;
  }

  double sup_abs() const {
    double m = 0.0;
    for (const auto& row : pjets)
      for (const auto& j : row) m = std::max(m, std::abs(j.value()));
    return m;
  }
};

inline LinearODECoeffs symbolic_coeffs(int N, std::vector<Expr> p) {
  LinearODECoeffs c;
  c.N = N;
  c.symbolic = true;
  c.p_sym = std::move(p);
  if (static_cast<int>(c.p_sym.size()) != N + 1)
    throw InvalidInput("coefficient count must be N+1");
  return c;
}

// Sample symbolic coefficients (functions of t) onto a grid with jets from
// exact t-derivatives.
inline LinearODECoeffs materialize_coeffs(const LinearODECoeffs& c,
                                          const std::vector<double>& grid,
                                          std::size_t depth) {
  if (!c.symbolic) return c;
  LinearODECoeffs r;
  r.N = c.N;
  r.symbolic = false;
  r.grid = grid;
  r.pjets.assign(grid.size(), std::vector<Jet>(c.N + 1));
  std::vector<std::vector<Expr>> dstack(c.N + 1);
  for (int i = 0; i <= c.N; ++i) {
    dstack[i].push_back(normalize(c.p_sym[i]));
    for (std::size_t k = 1; k <= depth; ++k)
      dstack[i].push_back(diff(dstack[i].back(), var_t()));
  }
  for (std::size_t s = 0; s < grid.size(); ++s) {
    Point pt{{var_t(), grid[s]}};
    for (int i = 0; i <= c.N; ++i) {
      Jet j(0.0, depth + 1);
      double fact = 1.0;
      for (std::size_t k = 0; k <= depth; ++k) {
        if (k >= 2) fact *= static_cast<double>(k);
        j.c[k] = eval_numeric(dstack[i][k], pt) / fact;
      }
      r.pjets[s][i] = j;
    }
  }
  return r;
}

// Linearization of an explicit ODE along a solution: p_i(x) = F_{y_i}(gamma(x)),
// with higher x-derivatives from symbolic total derivatives D_x^k(F_{y_i})
// restricted to the equation manifold (never finite differences).
inline LinearODECoeffs linearize_along(const OrdODE& E, const Trajectory& gamma,
                                       std::size_t depth = 10) {
  int N = E.order - 1;
  if (gamma.N != N) throw InvalidInput("linearize_along: trajectory/ODE order mismatch");
  auto ctx = JetContext::on_equation(E.order, E.rhs);
  LinearODECoeffs c;
  c.N = N;
  c.symbolic = false;
  c.grid = gamma.grid;
  c.p_field.resize(N + 1);
  c.pjets.assign(gamma.grid.size(), std::vector<Jet>(N + 1));
  for (int i = 0; i <= N; ++i) {
    std::vector<Expr> dstack;
    dstack.push_back(diff(E.rhs, var_y(i)));
    c.p_field[i] = dstack[0];
    for (std::size_t k = 1; k <= depth; ++k)
      dstack.push_back(total_derivative(dstack.back(), ctx));
    for (std::size_t s = 0; s < gamma.grid.size(); ++s) {
      Point pt{{var_x(), gamma.grid[s]}};
      for (int j = 0; j <= N; ++j) pt[var_y(j)] = gamma.samples[s][j];
      Jet jet(0.0, depth + 1);
      double fact = 1.0;
      for (std::size_t k = 0; k <= depth; ++k) {
        if (k >= 2) fact *= static_cast<double>(k);
        double v;
        try {
          v = eval_numeric(dstack[k], pt);
        } catch (const DomainError& e) {
          throw IntegrationError(std::string("linearization undefined along solution: ") +
                                 e.what());
        }
        jet.c[k] = v / fact;
      }
      c.pjets[s][i] = jet;
    }
  }
  return c;
}

}  // namespace varode

#endif
