#ifndef VARODE_EXPR_PRINT_HPP
#define VARODE_EXPR_PRINT_HPP

#include <string>
#include <vector>

#include "varode/expr/expr.hpp"

namespace varode {

namespace detail {

inline std::string print_expr(const Expr& e, int parent_prec);

// precedence: 0 add, 1 mul, 2 unary/atom, 3 pow-base
inline std::string print_const(const Rational& q, int parent_prec) {
  std::string s = rat_str(q);
  bool needs = (q < 0 && parent_prec >= 1) || (!is_integer(q) && parent_prec >= 1);
  return needs ? "(" + s + ")" : s;
}

inline std::string print_pow(const Expr& base, const Rational& e) {
  std::string b = print_expr(base, 3);
  if (e == 1) return b;
  std::string ex;
  if (is_integer(e) && e > 0) ex = rat_str(e);
  else ex = "(" + rat_str(e) + ")";
  return b + "^" + ex;
}

inline std::string print_expr(const Expr& e, int parent_prec) {
  switch (e->op) {
    case ExprOp::Const:
      return print_const(e->value, parent_prec);
    case ExprOp::VarRef:
      return var_name(e->var);
    case ExprOp::Pow:
      return print_pow(e->kids[0], e->value);
    case ExprOp::Mul: {
      // split into numerator and denominator factors
      std::string num, den;
      Rational coeff(1);
      bool have_coeff = false;
      std::vector<std::string> nf, df;
      for (const auto& k : e->kids) {
        if (k->op == ExprOp::Const) { coeff *= k->value; have_coeff = true; continue; }
        if (k->op == ExprOp::Pow && k->value < 0) {
          df.push_back(print_pow(k->kids[0], -k->value));
          continue;
        }
        nf.push_back(print_expr(k, 1));
      }
      std::string s;
      bool neg = coeff < 0;
      Rational ac = neg ? -coeff : coeff;
      if (have_coeff && (ac != 1 || nf.empty())) {
        std::string cs = rat_str(ac);
        if (!is_integer(ac)) cs = "(" + cs + ")";
        s = cs;
      }
      for (const auto& f : nf) {
        if (!s.empty()) s += "*";
        s += f;
      }
      if (s.empty()) s = "1";
      for (const auto& f : df) s += "/" + f;
      if (neg) s = "-" + s;
      if (parent_prec >= 2 || (neg && parent_prec >= 1)) s = "(" + s + ")";
      return s;
    }
    case ExprOp::Add: {
      std::string s;
      bool first = true;
      for (const auto& k : e->kids) {
        std::string part = print_expr(k, 0);
        if (first) {
          s = part;
          first = false;
        } else if (!part.empty() && part[0] == '-') {
          s += " - " + part.substr(1);
        } else {
          s += " + " + part;
        }
      }
      if (parent_prec >= 1) s = "(" + s + ")";
      return s;
    }
  }
  return "?";
}

}  // namespace detail

inline std::string to_string(const Expr& e) { return detail::print_expr(e, 0); }

}  // namespace varode

#endif
