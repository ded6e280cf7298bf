#ifndef VARODE_WILCZYNSKI_CANONICAL_HPP
#define VARODE_WILCZYNSKI_CANONICAL_HPP

#include <map>
#include <mutex>

#include "varode/jet/linearize.hpp"
#include "varode/num/linalg.hpp"

namespace varode {

// Laguerre-Forsyth canonicalization p_N = p_{N-1} = 0 of
// u^(m) = sum_{i<m} p_i u^(i), m = N+1, via one combined gauge
// u(t) = chi(t) * w(lambda(t)).
//
// The transformation law is not hand-copied: we derive the coefficients
// A[k][j] in D_t^k [chi * (w o lambda)] = sum_j A[k][j] w^(j)(lambda(t))
// symbolically from the recurrence A[k+1][j] = D A[k][j] + A[k][j-1] lambda',
// encoding lambda^(i) as y_i and chi^(i) as xi_i. The two canonical-form
// conditions become an ODE for (lambda, chi): they are linear in the top
// jets, so each derivative level is a small linear solve.

namespace canonical_detail {

// formal linear combination  c0 + sum coeff_{i,d} * p_i^{(d)}
struct PComb {
  Expr c0;
  std::vector<std::tuple<int, int, Expr>> terms;
};

inline PComb pcomb_Dt(const PComb& e, const JetContext& ctx) {
  PComb r;
  r.c0 = total_derivative(e.c0, ctx);
  std::map<std::pair<int, int>, Expr> acc;
  auto add = [&acc](int i, int d, const Expr& c) {
    auto key = std::make_pair(i, d);
    auto it = acc.find(key);
    if (it == acc.end()) acc.emplace(key, c);
    else it->second = it->second + c;
  };
  for (const auto& [i, d, c] : e.terms) {
    add(i, d, total_derivative(c, ctx));
    add(i, d + 1, c);
  }
  for (auto& [key, c] : acc) {
    c = normalize(c);
    if (!is_zero_sym(c)) r.terms.emplace_back(key.first, key.second, c);
  }
  return r;
}

inline PComb pcomb_diff(const PComb& e, const Var& v) {
  PComb r;
  r.c0 = diff(e.c0, v);
  for (const auto& [i, d, c] : e.terms) {
    Expr dc = diff(c, v);
    if (!is_zero_sym(dc)) r.terms.emplace_back(i, d, dc);
  }
  return r;
}

struct TransformLaws {
  int m;
  std::vector<std::vector<Expr>> A;  // A[k][j]
  // chain[d]: equations {D^d E1, D^{d-1} E2} (chain[0] holds {E1}), plus the
  // partials wrt the top unknowns xi_{d+1} and y_{d+2}
  struct Level {
    PComb e1, e2;
    PComb e1_du1, e1_du2, e2_du1, e2_du2;  // wrt xi_{d+1}, y_{d+2}
  };
  std::vector<Level> chain;
};

inline const TransformLaws& transform_laws(int m, int max_depth) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<TransformLaws>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_pair(m, max_depth);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  auto laws = std::make_unique<TransformLaws>();
  laws->m = m;
  JetContext ctx;
  ctx.prolong_xi = true;
  // A[k][j]
  laws->A.assign(m + 1, std::vector<Expr>(m + 1, make_const(0)));
  laws->A[0][0] = ex_xi(0);
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j <= k + 1; ++j) {
      Expr a = make_const(0);
      if (j <= k) a = a + total_derivative(laws->A[k][j], ctx);
      if (j >= 1) a = a + laws->A[k][j - 1] * ex_y(1);
      laws->A[k + 1][j] = normalize(a);
    }
  }
  // E1 = p_{m-1} A[m-1][m-1] - A[m][m-1]   (coefficient of w^(m-1) = 0)
  // E2 = p_{m-2} A[m-2][m-2] + p_{m-1} A[m-1][m-2] - A[m][m-2]
  PComb E1{make_const(-1) * laws->A[m][m - 1],
           {{m - 1, 0, laws->A[m - 1][m - 1]}}};
  PComb E2{make_const(-1) * laws->A[m][m - 2],
           {{m - 2, 0, laws->A[m - 2][m - 2]}, {m - 1, 0, laws->A[m - 1][m - 2]}}};
  laws->chain.resize(max_depth + 1);
  PComb e1 = E1, e2 = E2;
  for (int d = 0; d <= max_depth; ++d) {
    auto& lv = laws->chain[d];
    if (d > 0) {
      e1 = pcomb_Dt(e1, ctx);
      if (d > 1) e2 = pcomb_Dt(e2, ctx);
    }
    lv.e1 = e1;
    lv.e2 = e2;
    lv.e1_du1 = pcomb_diff(e1, var_xi(d + 1));
    lv.e1_du2 = pcomb_diff(e1, var_y(d + 2));
    lv.e2_du1 = pcomb_diff(e2, var_xi(d + 1));
    lv.e2_du2 = pcomb_diff(e2, var_y(d + 2));
  }
  const TransformLaws& ref = *laws;
  cache.emplace(key, std::move(laws));
  return ref;
}

// numeric environment for PComb evaluation: known jet values, zeros beyond
struct GaugeState {
  std::vector<double> lam;  // lam[i] = lambda^(i); lam[0] unused
  std::vector<double> chi;  // chi[i] = chi^(i)
};

struct PEnv {
  const GaugeState* gs;
  const LinearODECoeffs* coeffs;
  double t;

  double operator()(const Var& v) const {
    if (v.kind == VarKind::Y)
      return v.index < static_cast<int>(gs->lam.size()) ? gs->lam[v.index] : 0.0;
    if (v.kind == VarKind::Xi)
      return v.index < static_cast<int>(gs->chi.size()) ? gs->chi[v.index] : 0.0;
    throw DomainError("unexpected variable in transform law: " + var_name(v));
  }

  double pval(int i, int d) const {
    if (coeffs->symbolic) {
      Expr e = coeffs->p_sym[i];
      for (int k = 0; k < d; ++k) e = diff(e, var_t());
      return eval_numeric(e, {{var_t(), t}});
    }
    // local Taylor of p_i^{(d)}
    std::size_t best = 0;
    double bd = std::abs(t - coeffs->grid[0]);
    for (std::size_t s = 1; s < coeffs->grid.size(); ++s) {
      double dd = std::abs(t - coeffs->grid[s]);
      if (dd < bd) { bd = dd; best = s; }
    }
    Jet j = jet_shift_derivative(coeffs->pjets[best][i], d);
    double ds = t - coeffs->grid[best], acc = 0.0, pw = 1.0;
    for (double cc : j.c) { acc += cc * pw; pw *= ds; }
    return acc;
  }
};

inline double eval_pcomb(const PComb& e, const PEnv& env) {
  double v = eval_expr<double>(e.c0, env);
  for (const auto& [i, d, c] : e.terms)
    v += eval_expr<double>(c, env) * env.pval(i, d);
  return v;
}

// Solve the chain at level d for (chi^(d+1), lambda^(d+2)); the state must
// already hold everything below.
inline void chain_step(const TransformLaws& laws, int d, GaugeState& gs, const PEnv& env) {
  const auto& lv = laws.chain[d];
  if (d == 0) {
    // E1 = 0 is linear in chi'
    double a = eval_pcomb(lv.e1_du1, env);
    double r = eval_pcomb(lv.e1, env);  // chi' entry currently 0
    if (std::abs(a) < 1e-300) throw IntegrationError("canonicalize: singular gauge solve");
    gs.chi.resize(2);
    gs.chi[1] = -r / a;
    return;
  }
  double a11 = eval_pcomb(lv.e1_du1, env), a12 = eval_pcomb(lv.e1_du2, env);
  double a21 = eval_pcomb(lv.e2_du1, env), a22 = eval_pcomb(lv.e2_du2, env);
  double r1 = eval_pcomb(lv.e1, env), r2 = eval_pcomb(lv.e2, env);
  double det = a11 * a22 - a12 * a21;
  if (std::abs(det) < 1e-300) throw IntegrationError("canonicalize: singular gauge solve");
  double u1 = (-r1 * a22 + r2 * a12) / det;
  double u2 = (-r2 * a11 + r1 * a21) / det;
  gs.chi.resize(d + 2);
  gs.lam.resize(d + 3);
  gs.chi[d + 1] = u1;
  gs.lam[d + 2] = u2;
}

}  // namespace canonical_detail

// Canonical (Laguerre-Forsyth) form with p_N = p_{N-1} = 0. The gauge ODE is
// integrated across the sample grid; the returned coefficients live on the
// reparametrized grid tau = lambda(t).
struct CanonicalizeResult {
  LinearODECoeffs coeffs;        // canonical, sampled on tau grid
  std::vector<double> t_grid;    // original parameter samples
  std::vector<double> rate;      // lambda'(t) per sample (relative-invariant weight)
  std::vector<double> gauge;     // chi(t) per sample
  std::vector<std::vector<double>> lam_derivs;  // per sample: lambda^(0..Lmax)
  std::vector<std::vector<double>> chi_derivs;  // per sample: chi^(0..Lmax-1)
};

inline bool is_canonical_symbolic(const LinearODECoeffs& c) {
  return c.symbolic && is_zero_sym(c.p_sym[c.N]) && is_zero_sym(c.p_sym[c.N - 1]);
}

inline bool is_canonical_sampled(const LinearODECoeffs& c, double tol = 1e-12) {
  if (c.symbolic) return false;
  double scale = 1.0 + c.sup_abs();
  double worst = 0.0;
  for (const auto& row : c.pjets)
    worst = std::max({worst, std::abs(row[c.N].value()), std::abs(row[c.N - 1].value())});
  return worst <= tol * scale;
}

inline CanonicalizeResult canonicalize_full(const LinearODECoeffs& cin) {
  using namespace canonical_detail;
  const int N = cin.N;
  const int m = N + 1;

  if (is_canonical_symbolic(cin) ) {
    CanonicalizeResult r;
    r.coeffs = cin;
    return r;
  }
  LinearODECoeffs c = cin;
  if (c.symbolic) {
    GridSpec g;  // default sampling window for symbolic inputs
    c = materialize_coeffs(c, g.points(), 2 * static_cast<std::size_t>(N) + 2);
  }
  if (is_canonical_sampled(c)) {
    CanonicalizeResult r;
    r.coeffs = c;
    r.t_grid = c.grid;
    r.rate.assign(c.grid.size(), 1.0);
    r.gauge.assign(c.grid.size(), 1.0);
    return r;
  }

  const int Kp = static_cast<int>(c.pjets[0][0].size()) - 1;  // available p depth
  if (Kp < m - 1)
    throw InvalidInput("canonicalize: insufficient derivative data");
  const int Lmax = Kp + 2;          // lambda jets recoverable up to this order
  const int Dr = Lmax - m - 1;      // tau-derivative depth of the output
  if (Dr < 1) throw InvalidInput("canonicalize: insufficient derivative data");
  const TransformLaws& laws = transform_laws(m, Lmax - 2);

  // integrate state (tau, lambda', lambda'', chi) over the sample grid
  auto rhs = [&laws, &c](const State& y, State& dy, double t) {
    GaugeState gs;
    gs.lam = {0.0, y[1], y[2]};
    gs.chi = {y[3]};
    PEnv env{&gs, &c, t};
    chain_step(laws, 0, gs, env);           // chi'
    chain_step(laws, 1, gs, env);           // chi'', lambda'''
    dy = {y[1], y[2], gs.lam[3], gs.chi[1]};
  };
  State y0{c.grid.front(), 1.0, 0.0, 1.0};
  DenseResult dr = integrate_dense(rhs, y0, c.grid, {}, 1e-12, 1e-13);

  CanonicalizeResult out;
  out.t_grid = c.grid;
  out.coeffs.N = N;
  out.coeffs.symbolic = false;
  out.coeffs.grid.resize(c.grid.size());
  out.coeffs.pjets.assign(c.grid.size(), std::vector<Jet>(m));
  out.rate.resize(c.grid.size());
  out.gauge.resize(c.grid.size());
  out.lam_derivs.resize(c.grid.size());
  out.chi_derivs.resize(c.grid.size());

  const std::size_t jlen = static_cast<std::size_t>(Dr) + 1;
  for (std::size_t s = 0; s < c.grid.size(); ++s) {
    double t = c.grid[s];
    GaugeState gs;
    gs.lam = {0.0, dr.at_grid[s][1], dr.at_grid[s][2]};
    gs.chi = {dr.at_grid[s][3]};
    PEnv env{&gs, &c, t};
    for (int d = 0; d + 2 <= Lmax; ++d) chain_step(laws, d, gs, env);
    out.rate[s] = gs.lam[1];
    out.gauge[s] = gs.chi[0];
    out.lam_derivs[s] = gs.lam;
    out.lam_derivs[s][0] = dr.at_grid[s][0];  // lambda itself
    out.chi_derivs[s] = gs.chi;
    if (!(gs.lam[1] > 0.0))
      throw IntegrationError("canonicalize: reparametrization rate crossed zero");

    // jets of lambda^(i) and chi^(i) as functions of t
    auto lam_jet = [&gs, jlen](int i) {
      Jet j(0.0, jlen);
      double fact = 1.0;
      for (std::size_t k = 0; k < jlen; ++k) {
        if (k >= 2) fact *= static_cast<double>(k);
        j.c[k] = (i + static_cast<int>(k) < static_cast<int>(gs.lam.size()))
                     ? gs.lam[i + k] / fact
                     : 0.0;
      }
      return j;
    };
    auto chi_jet = [&gs, jlen](int i) {
      Jet j(0.0, jlen);
      double fact = 1.0;
      for (std::size_t k = 0; k < jlen; ++k) {
        if (k >= 2) fact *= static_cast<double>(k);
        j.c[k] = (i + static_cast<int>(k) < static_cast<int>(gs.chi.size()))
                     ? gs.chi[i + k] / fact
                     : 0.0;
      }
      return j;
    };
    auto jet_env = [&](const Var& v) -> Jet {
      if (v.kind == VarKind::Y) return lam_jet(v.index);
      if (v.kind == VarKind::Xi) return chi_jet(v.index);
      throw DomainError("unexpected variable in transform law");
    };
    auto pjet = [&c, s, jlen](int i, int d) {
      return jet_shift_derivative(c.pjets[s][i], d).truncated(jlen);
    };

    Jet Amm = eval_expr<Jet>(laws.A[m][m], jet_env);
    // mu(s) = lambda(t+s) - lambda(t), mu(0)=0; invert and compose
    Jet mu(0.0, jlen);
    {
      double fact = 1.0;
      for (std::size_t k = 1; k < jlen; ++k) {
        fact *= static_cast<double>(k);
        mu.c[k] = (static_cast<int>(k) < static_cast<int>(gs.lam.size())) ? gs.lam[k] / fact : 0.0;
      }
    }
    Jet muinv = jet_revert(mu);

    for (int j = 0; j <= N; ++j) {
      Jet num(0.0, jlen);
      for (int i = j; i <= m - 1; ++i) {
        if (is_zero_sym(laws.A[i][j])) continue;
        num = num + pjet(i, 0) * eval_expr<Jet>(laws.A[i][j], jet_env);
      }
      num = num - eval_expr<Jet>(laws.A[m][j], jet_env);
      Jet rho = num / Amm;                 // r_j(lambda(t)) as a jet in t
      out.coeffs.pjets[s][j] = jet_compose(rho, muinv);  // jet in tau
    }
    out.coeffs.grid[s] = dr.at_grid[s][0];
  }
  for (std::size_t s = 1; s < out.coeffs.grid.size(); ++s)
    if (!(out.coeffs.grid[s] > out.coeffs.grid[s - 1]))
      throw IntegrationError("canonicalize: reparametrized grid not increasing");
  return out;
}

inline LinearODECoeffs canonicalize(const LinearODECoeffs& c) {
  return canonicalize_full(c).coeffs;
}

}  // namespace varode

#endif
