#ifndef VARODE_JET_TRAJECTORY_HPP
#define VARODE_JET_TRAJECTORY_HPP

#include <fstream>
#include <iomanip>
#include <sstream>

#include "varode/jet/lagrangian.hpp"
#include "varode/num/ivp.hpp"
#include "varode/num/taylor.hpp"

namespace varode {

// Numeric solution samples of an explicit ODE, with Taylor jet stacks at
// every grid point. The jets are exact functions of the sample values (Taylor
// recurrence of the ODE), so they add no integration error.
struct Trajectory {
  int N{0};  // states y0..yN stored; the ODE order is N+1
  std::vector<double> grid;
  std::vector<State> samples;            // [i][j] = y_j(x_i)
  std::vector<std::vector<Jet>> jets;    // [i][j] = Taylor jet of y_j at x_i
  double max_residual{0.0};              // off-grid |y_N' - F| estimate
  double rtol{1e-10}, atol{1e-12};

  double eval(int j, double x) const {
    // local Taylor expansion from the nearest grid point
    std::size_t best = 0;
    double bd = std::abs(x - grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      double d = std::abs(x - grid[i]);
      if (d < bd) { bd = d; best = i; }
    }
    const Jet& je = jets[best][j];
    double s = x - grid[best], acc = 0.0, p = 1.0;
    for (double c : je.c) { acc += c * p; p *= s; }
    return acc;
  }
};

// Taylor jets of the solution through a sample point, from the ODE structure:
// y_j' = y_{j+1}, y_N' = F.
inline std::vector<Jet> trajectory_jets_at(const Expr& F, double x, const State& y,
                                           std::size_t depth) {
  int N = static_cast<int>(y.size()) - 1;
  std::vector<Jet> js(N + 1);
  for (int j = 0; j <= N; ++j) {
    js[j] = Jet(0.0, depth + 1);
    js[j].c[0] = y[j];
  }
  Jet xj = Jet::variable(x, depth + 1);
  for (std::size_t k = 0; k < depth; ++k) {
    // F-series coefficient k is valid once y-jets are known to order k
    auto env = [&](const Var& v) -> Jet {
      if (v.kind == VarKind::X) return xj.truncated(k + 1);
      if (v.kind == VarKind::Y && v.index <= N) return js[v.index].truncated(k + 1);
      throw DomainError("trajectory jet: unexpected variable " + var_name(v));
    };
    Jet fj = eval_expr<Jet>(F, env);
    for (int j = 0; j < N; ++j)
      js[j].c[k + 1] = js[j + 1].c[k] / static_cast<double>(k + 1);
    js[N].c[k + 1] = fj.c[k] / static_cast<double>(k + 1);
  }
  return js;
}

// Adaptive integration of y_i' = y_{i+1}, y_N' = F with dense output on the
// grid; residuals are probed off-grid against a finite difference of the
// dense interpolant.
inline Trajectory solve_ivp(const OrdODE& E, const State& init, const GridSpec& g,
                            double rtol = 1e-10, double atol = 1e-12,
                            std::size_t jet_depth = 12) {
  int N = E.order - 1;
  if (static_cast<int>(init.size()) != N + 1)
    throw InvalidInput("solve_ivp: initial jet must have " + std::to_string(N + 1) +
                       " components");
  const Expr& F = E.rhs;
  auto rhs = [&F, N](const State& y, State& dy, double x) {
    dy.resize(y.size());
    for (int j = 0; j < N; ++j) dy[j] = y[j + 1];
    Point pt;
    pt[var_x()] = x;
    for (int j = 0; j <= N; ++j) pt[var_y(j)] = y[j];
    double f;
    try {
      f = eval_numeric(F, pt);
    } catch (const DomainError& e) {
      throw IntegrationError(std::string("singularity encountered: ") + e.what());
    }
    dy[N] = f;
  };

  auto xs = g.points();
  // 10 off-grid checkpoints, each a 5-point stencil for d/dx of the dense y_N
  std::vector<double> probes;
  double delta = (g.x1 - g.x0) * 1e-3;
  for (int k = 1; k <= 10; ++k) {
    double xc = g.x0 + (g.x1 - g.x0) * (k - 0.37) / 10.0;
    for (int s = -2; s <= 2; ++s) probes.push_back(xc + s * delta);
  }
  std::sort(probes.begin(), probes.end());

  DenseResult dr = integrate_dense(rhs, init, xs, probes, rtol, atol);

  Trajectory tr;
  tr.N = N;
  tr.grid = xs;
  tr.samples = dr.at_grid;
  tr.rtol = rtol;
  tr.atol = atol;
  tr.jets.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    tr.jets[i] = trajectory_jets_at(F, xs[i], tr.samples[i], jet_depth);

  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const State* st[5];
    for (int s = 0; s < 5; ++s) st[s] = &dr.at_extra[5 * k + s];
    double d1 = ((*st[0])[N] - 8.0 * (*st[1])[N] + 8.0 * (*st[3])[N] - (*st[4])[N]) /
                (12.0 * delta);
    Point pt;
    pt[var_x()] = probes[5 * k + 2];
    for (int j = 0; j <= N; ++j) pt[var_y(j)] = (*st[2])[j];
    double fv = eval_numeric(F, pt);
    worst = std::max(worst, std::abs(d1 - fv));
  }
  tr.max_residual = worst;
  return tr;
}

// CSV export with header x,y0,...,yN.
inline void trajectory_to_csv(const Trajectory& tr, std::ostream& os) {
  os << "x";
  for (int j = 0; j <= tr.N; ++j) os << ",y" << j;
  os << "\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < tr.grid.size(); ++i) {
    os << tr.grid[i];
    for (int j = 0; j <= tr.N; ++j) os << "," << tr.samples[i][j];
    os << "\n";
  }
}

}  // namespace varode

#endif
