#ifndef VARODE_EXPR_CALCULUS_HPP
#define VARODE_EXPR_CALCULUS_HPP

#include <optional>
#include <random>
#include <stdexcept>

#include "varode/expr/eval.hpp"
#include "varode/expr/polynomial.hpp"
#include "varode/expr/print.hpp"

namespace varode {

// Canonical form: expanded rational combination over a factored denominator
// with collected monomials. Idempotent; equal expressions in the rational
// power algebra map to identical trees.
inline Expr normalize(const Expr& e) { return frac_to_expr(ff_reduce(expr_to_frac(e))); }

// Exact partial derivative.
inline Expr diff(const Expr& e, const Var& v) {
  return frac_to_expr(ff_reduce(ff_derivative(expr_to_frac(e), v)));
}
inline Expr diff(const Expr& e, const Var& v, int times) {
  Expr r = e;
  for (int i = 0; i < times; ++i) r = diff(r, v);
  return r;
}

inline bool is_zero_sym(const Expr& e) { return poly_is_zero(expr_to_frac(e).num); }

enum class Verdict { Zero, Nonzero, ProbablyZero };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Zero: return "zero";
    case Verdict::Nonzero: return "nonzero";
    case Verdict::ProbablyZero: return "probably_zero";
  }
  return "?";
}

struct IndeterminateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroTestOptions {
  double tol{1e-9};
  unsigned seed{12345};
  int probes{8};
  int max_attempts{256};
};

// Symbolic normalization first; probabilistic probing fallback. A nonzero
// value beyond tol*(1+scale) at any probe point is a definite witness.
inline Verdict is_zero(const Expr& e, const ZeroTestOptions& opt = {}) {
  if (is_zero_sym(e)) return Verdict::Zero;
  auto vars = free_vars(e);
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> den_pick(0, 4);
  static const int dens[5] = {3, 5, 7, 11, 13};
  int successes = 0;
  for (int attempt = 0; attempt < opt.max_attempts && successes < opt.probes; ++attempt) {
    Point pt;
    bool positive_only = attempt >= opt.max_attempts / 2;
    for (const auto& v : vars) {
      int q = dens[den_pick(rng)];
      std::uniform_int_distribution<int> num_pick(1, 4 * q);
      int num = num_pick(rng);
      double val = static_cast<double>(num) / q;
      if (!positive_only) {
        std::uniform_int_distribution<int> sign(0, 1);
        if (sign(rng)) val = -val;
      }
      pt[v] = val;
    }
    try {
      double scale = 0.0;
      double value = eval_scaled(e, pt, scale);
      if (!std::isfinite(value)) continue;
      ++successes;
      if (std::abs(value) > opt.tol * (1.0 + scale)) return Verdict::Nonzero;
    } catch (const DomainError&) {
      continue;
    }
  }
  if (successes == 0)
    throw IndeterminateError("is_zero: all probe points hit singularities");
  return Verdict::ProbablyZero;
}

// Substitute arbitrary expressions for variables, then renormalize.
inline Expr subst(const Expr& e, const std::map<Var, Expr>& repl) {
  switch (e->op) {
    case ExprOp::Const: return e;
    case ExprOp::VarRef: {
      auto it = repl.find(e->var);
      return it == repl.end() ? e : it->second;
    }
    case ExprOp::Pow: return ex_pow(subst(e->kids[0], repl), e->value);
    case ExprOp::Add: {
      std::vector<Expr> kids;
      kids.reserve(e->kids.size());
      for (const auto& k : e->kids) kids.push_back(subst(k, repl));
      return ex_add(std::move(kids));
    }
    case ExprOp::Mul: {
      std::vector<Expr> kids;
      kids.reserve(e->kids.size());
      for (const auto& k : e->kids) kids.push_back(subst(k, repl));
      return ex_mul(std::move(kids));
    }
  }
  return e;
}

}  // namespace varode

#endif
