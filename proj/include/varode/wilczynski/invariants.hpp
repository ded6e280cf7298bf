#ifndef VARODE_WILCZYNSKI_INVARIANTS_HPP
#define VARODE_WILCZYNSKI_INVARIANTS_HPP

#include "varode/wilczynski/canonical.hpp"

namespace varode {

// The fundamental relative invariants W_3..W_{N+1} of a linear ODE in
// canonical form:
//   W_k = sum_{j=1}^{k-2} (-1)^{j+1} (2k-j-1)!(N-k+j)! / ((k-j)!(j-1)!)
//         * p_{N-k+j}^{(j-1)}
struct WilczynskiValues {
  int N{0};
  bool symbolic{false};
  std::vector<Expr> sym;                    // index k-3
  std::vector<double> grid;
  std::vector<std::vector<double>> values;  // [k-3][sample]
  double coeff_scale{1.0};                  // 1 + sup|p|, for vanishing thresholds
  double grid_span{1.0};
};

inline Rational wilczynski_coefficient(int N, int k, int j) {
  auto fact = [](int a) {
    BigInt f = 1;
    for (int i = 2; i <= a; ++i) f *= i;
    return f;
  };
  Rational c = make_rational(fact(2 * k - j - 1) * fact(N - k + j), fact(k - j) * fact(j - 1));
  return (j % 2 == 1) ? c : -c;
}

inline WilczynskiValues wilczynski_invariants(const LinearODECoeffs& c) {
  WilczynskiValues w;
  w.N = c.N;
  if (c.symbolic) {
    if (!is_canonical_symbolic(c))
      throw InvalidInput("wilczynski_invariants requires canonical form (p_N = p_{N-1} = 0)");
    w.symbolic = true;
    for (int k = 3; k <= c.N + 1; ++k) {
      Expr acc = make_const(0);
      for (int j = 1; j <= k - 2; ++j) {
        Expr d = diff(c.p_sym[c.N - k + j], var_t(), j - 1);
        acc = acc + make_const(wilczynski_coefficient(c.N, k, j)) * d;
      }
      w.sym.push_back(normalize(acc));
    }
    return w;
  }
  if (!is_canonical_sampled(c, 1e-8))
    throw InvalidInput("wilczynski_invariants requires canonical form (p_N = p_{N-1} = 0)");
  const int depth_avail = static_cast<int>(c.pjets[0][0].size()) - 1;
  if (depth_avail < c.N - 2)
    throw InvalidInput("wilczynski_invariants: insufficient derivative data");
  w.grid = c.grid;
  w.grid_span = std::max(1.0, std::abs(c.grid.back() - c.grid.front()));
  w.coeff_scale = 1.0 + c.sup_abs();
  w.values.assign(c.N - 1, std::vector<double>(c.grid.size(), 0.0));
  for (int k = 3; k <= c.N + 1; ++k) {
    for (std::size_t s = 0; s < c.grid.size(); ++s) {
      double acc = 0.0;
      for (int j = 1; j <= k - 2; ++j)
        acc += to_double(wilczynski_coefficient(c.N, k, j)) *
               c.pjets[s][c.N - k + j].deriv(j - 1);
      w.values[k - 3][s] = acc;
    }
  }
  return w;
}

// Numeric vanishing threshold for an order-k invariant (it mixes k-th order
// derivative data of the coefficients).
inline double vanishing_threshold(const WilczynskiValues& w, int k, double tol) {
  double s = 1.0;
  for (int i = 0; i < k; ++i) s *= w.grid_span;
  return tol * (1.0 + w.coeff_scale * s);
}

inline double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

enum class InvariantStatus { Zero, Nonzero, ProbablyZero };

inline InvariantStatus invariant_status(const WilczynskiValues& w, int k, double tol,
                                        const ZeroTestOptions& zopt = {}) {
  if (w.symbolic) {
    switch (is_zero(w.sym[k - 3], zopt)) {
      case Verdict::Zero: return InvariantStatus::Zero;
      case Verdict::Nonzero: return InvariantStatus::Nonzero;
      case Verdict::ProbablyZero: return InvariantStatus::ProbablyZero;
    }
  }
  double sup = sup_abs(w.values[k - 3]);
  return sup < vanishing_threshold(w, k, tol) ? InvariantStatus::ProbablyZero
                                              : InvariantStatus::Nonzero;
}

inline bool odd_invariants_vanish(const WilczynskiValues& w, double tol = 1e-6) {
  for (int k = 3; k <= w.N + 1; k += 2)
    if (invariant_status(w, k, tol) == InvariantStatus::Nonzero) return false;
  return true;
}

inline bool flatness_test(const WilczynskiValues& w, double tol = 1e-6) {
  for (int k = 3; k <= w.N + 1; ++k)
    if (invariant_status(w, k, tol) == InvariantStatus::Nonzero) return false;
  return true;
}

}  // namespace varode

#endif
