#ifndef VARODE_EXPR_EVAL_HPP
#define VARODE_EXPR_EVAL_HPP

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "varode/expr/expr.hpp"

namespace varode {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double pow_rat(double base, const Rational& e) {
  if (is_integer(e)) {
    long k = to_long(rat_num(e));
    if (base == 0.0 && k < 0) throw DomainError("division by zero");
    return std::pow(base, static_cast<double>(k));
  }
  long den = to_long(rat_den(e));
  if (base == 0.0) {
    if (e > 0) return 0.0;
    throw DomainError("division by zero");
  }
  if (base < 0.0) {
    if (den % 2 == 0)
      throw DomainError("negative base with even-denominator exponent");
    // odd-denominator exponents extend to negative bases
    long num = to_long(rat_num(e));
    double mag = std::pow(-base, to_double(e));
    return (num % 2 == 0) ? mag : -mag;
  }
  return std::pow(base, to_double(e));
}

// Numeric point: assignment of reals to variables.
using Point = std::map<Var, double>;

inline double eval_numeric(const Expr& e, const Point& pt) {
  switch (e->op) {
    case ExprOp::Const:
      return to_double(e->value);
    case ExprOp::VarRef: {
      auto it = pt.find(e->var);
      if (it == pt.end())
        throw DomainError("unassigned variable " + var_name(e->var));
      return it->second;
    }
    case ExprOp::Add: {
      double s = 0;
      for (const auto& k : e->kids) s += eval_numeric(k, pt);
      return s;
    }
    case ExprOp::Mul: {
      double s = 1;
      for (const auto& k : e->kids) s *= eval_numeric(k, pt);
      return s;
    }
    case ExprOp::Pow:
      return pow_rat(eval_numeric(e->kids[0], pt), e->value);
  }
  return 0;
}

// Evaluation that also tracks the largest intermediate magnitude, used to
// scale zero-test thresholds.
inline double eval_scaled(const Expr& e, const Point& pt, double& scale) {
  double v = 0;
  switch (e->op) {
    case ExprOp::Const:
      v = to_double(e->value);
      break;
    case ExprOp::VarRef: {
      auto it = pt.find(e->var);
      if (it == pt.end())
        throw DomainError("unassigned variable " + var_name(e->var));
      v = it->second;
      break;
    }
    case ExprOp::Add: {
      for (const auto& k : e->kids) v += eval_scaled(k, pt, scale);
      break;
    }
    case ExprOp::Mul: {
      v = 1;
      for (const auto& k : e->kids) v *= eval_scaled(k, pt, scale);
      break;
    }
    case ExprOp::Pow:
      v = pow_rat(eval_scaled(e->kids[0], pt, scale), e->value);
      break;
  }
  double a = std::abs(v);
  if (a > scale) scale = a;
  return v;
}

// Generic evaluation for alternative scalar types (Taylor jets etc.).
// Env must provide T operator()(const Var&).
template <class T, class Env>
T eval_expr(const Expr& e, const Env& env) {
  switch (e->op) {
    case ExprOp::Const:
      return T(to_double(e->value));
    case ExprOp::VarRef:
      return env(e->var);
    case ExprOp::Add: {
      T s = eval_expr<T>(e->kids[0], env);
      for (std::size_t i = 1; i < e->kids.size(); ++i) s = s + eval_expr<T>(e->kids[i], env);
      return s;
    }
    case ExprOp::Mul: {
      T s = eval_expr<T>(e->kids[0], env);
      for (std::size_t i = 1; i < e->kids.size(); ++i) s = s * eval_expr<T>(e->kids[i], env);
      return s;
    }
    case ExprOp::Pow:
      return pow_rat(eval_expr<T>(e->kids[0], env), e->value);
  }
  return T(0.0);
}

}  // namespace varode

#endif
