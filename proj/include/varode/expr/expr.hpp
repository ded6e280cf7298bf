#ifndef VARODE_EXPR_EXPR_HPP
#define VARODE_EXPR_EXPR_HPP

#include <algorithm>
#include <concepts>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "varode/expr/rational.hpp"
#include "varode/expr/variable.hpp"

namespace varode {

// Immutable expression tree over jet coordinates with exact rational
// constants and rational powers. Quotients are Mul nodes with a Pow(-1)
// factor, negation is multiplication by -1.
enum class ExprOp : std::uint8_t { Const, VarRef, Add, Mul, Pow };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprOp op;
  Rational value;            // Const: the constant; Pow: the exponent
  Var var{};                 // VarRef
  std::vector<Expr> kids;    // Add/Mul children, Pow base in kids[0]
  std::size_t hash{0};

  ExprNode(ExprOp o, Rational v, Var w, std::vector<Expr> k)
      : op(o), value(std::move(v)), var(w), kids(std::move(k)) {
    std::size_t h = static_cast<std::size_t>(op) * 0x9e3779b97f4a7c15ull;
    auto mix = [&h](std::size_t x) {
      h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    if (op == ExprOp::Const || op == ExprOp::Pow) {
      mix(std::hash<std::string>()(rat_str(value)));
    }
    if (op == ExprOp::VarRef) mix(var_hash(var));
    for (const auto& k : kids) mix(k->hash);
    hash = h;
  }
};

inline Expr make_const(Rational q) {
  return std::make_shared<ExprNode>(ExprOp::Const, std::move(q), Var{}, std::vector<Expr>{});
}
inline Expr make_const(long n) { return make_const(Rational(n)); }
inline Expr make_var(Var v) {
  return std::make_shared<ExprNode>(ExprOp::VarRef, Rational(0), v, std::vector<Expr>{});
}
inline Expr ex_x() { return make_var(var_x()); }
inline Expr ex_y(int i) { return make_var(var_y(i)); }
inline Expr ex_xi(int i) { return make_var(var_xi(i)); }
inline Expr ex_z() { return make_var(var_z()); }
inline Expr ex_t() { return make_var(var_t()); }

inline bool is_const(const Expr& e) { return e->op == ExprOp::Const; }
inline bool is_const(const Expr& e, long v) {
  return e->op == ExprOp::Const && e->value == v;
}

// Structural comparison; hash first as a cheap filter.
inline int expr_cmp(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return 0;
  if (a->op != b->op) return a->op < b->op ? -1 : 1;
  switch (a->op) {
    case ExprOp::Const: return rat_cmp(a->value, b->value);
    case ExprOp::VarRef: {
      auto c = a->var <=> b->var;
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case ExprOp::Pow:
      if (int c = rat_cmp(a->value, b->value)) return c;
      return expr_cmp(a->kids[0], b->kids[0]);
    case ExprOp::Add:
    case ExprOp::Mul: {
      if (a->kids.size() != b->kids.size())
        return a->kids.size() < b->kids.size() ? -1 : 1;
      for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (int c = expr_cmp(a->kids[i], b->kids[i])) return c;
      return 0;
    }
  }
  return 0;
}
inline bool expr_eq(const Expr& a, const Expr& b) {
  return a->hash == b->hash && expr_cmp(a, b) == 0;
}

// --- builders with light constant folding ---

inline Expr ex_add(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  Rational c(0);
  for (auto& t : terms) {
    if (t->op == ExprOp::Const) { c += t->value; continue; }
    if (t->op == ExprOp::Add) {
      for (auto& k : t->kids) {
        if (k->op == ExprOp::Const) c += k->value; else flat.push_back(k);
      }
      continue;
    }
    flat.push_back(std::move(t));
  }
  if (c != 0 || flat.empty()) flat.push_back(make_const(c));
  if (flat.size() == 1) return flat[0];
  return std::make_shared<ExprNode>(ExprOp::Add, Rational(0), Var{}, std::move(flat));
}

inline Expr ex_mul(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  Rational c(1);
  for (auto& f : factors) {
    if (f->op == ExprOp::Const) { c *= f->value; continue; }
    if (f->op == ExprOp::Mul) {
      for (auto& k : f->kids) {
        if (k->op == ExprOp::Const) c *= k->value; else flat.push_back(k);
      }
      continue;
    }
    flat.push_back(std::move(f));
  }
  if (c == 0) return make_const(0);
  if (c != 1 || flat.empty()) flat.insert(flat.begin(), make_const(c));
  if (flat.size() == 1) return flat[0];
  return std::make_shared<ExprNode>(ExprOp::Mul, Rational(0), Var{}, std::move(flat));
}

inline Expr ex_pow(Expr base, Rational e) {
  if (e == 0) return make_const(1);
  if (e == 1) return base;
  if (base->op == ExprOp::Const) {
    if (auto r = exact_rat_pow(base->value, e)) return make_const(*r);
    if (base->value == 0) throw std::domain_error("0 raised to a non-positive power");
  }
  if (base->op == ExprOp::Pow)
    return ex_pow(base->kids[0], base->value * e);
  return std::make_shared<ExprNode>(ExprOp::Pow, std::move(e), Var{},
                                    std::vector<Expr>{std::move(base)});
}

inline Expr operator+(const Expr& a, const Expr& b) { return ex_add({a, b}); }
inline Expr operator*(const Expr& a, const Expr& b) { return ex_mul({a, b}); }
inline Expr operator-(const Expr& a) { return ex_mul({make_const(-1), a}); }
inline Expr operator-(const Expr& a, const Expr& b) { return ex_add({a, -b}); }
inline Expr operator/(const Expr& a, const Expr& b) {
  return ex_mul({a, ex_pow(b, Rational(-1))});
}
// constrained template so that overload resolution never has to probe a
// conversion from unrelated types (e.g. Eigen expressions) to Rational
template <class T>
  requires std::same_as<std::decay_t<T>, Rational>
inline Expr operator*(const T& c, const Expr& a) {
  return ex_mul({make_const(c), a});
}
inline Expr operator*(long c, const Expr& a) { return ex_mul({make_const(c), a}); }

inline void collect_vars(const Expr& e, std::set<Var>& out) {
  if (e->op == ExprOp::VarRef) { out.insert(e->var); return; }
  for (const auto& k : e->kids) collect_vars(k, out);
}
inline std::set<Var> free_vars(const Expr& e) {
  std::set<Var> s;
  collect_vars(e, s);
  return s;
}
inline bool depends_on(const Expr& e, const Var& v) {
  if (e->op == ExprOp::VarRef) return e->var == v;
  for (const auto& k : e->kids) if (depends_on(k, v)) return true;
  return false;
}

// Highest y-index appearing in e, or -1.
inline int max_jet_index(const Expr& e) {
  int m = -1;
  if (e->op == ExprOp::VarRef && e->var.kind == VarKind::Y) return e->var.index;
  for (const auto& k : e->kids) m = std::max(m, max_jet_index(k));
  return m;
}

// Plain structural substitution var -> replacement.
inline Expr subst_var(const Expr& e, const Var& v, const Expr& repl) {
  switch (e->op) {
    case ExprOp::Const: return e;
    case ExprOp::VarRef: return e->var == v ? repl : e;
    case ExprOp::Pow: return ex_pow(subst_var(e->kids[0], v, repl), e->value);
    case ExprOp::Add: {
      std::vector<Expr> kids;
      kids.reserve(e->kids.size());
      for (const auto& k : e->kids) kids.push_back(subst_var(k, v, repl));
      return ex_add(std::move(kids));
    }
    case ExprOp::Mul: {
      std::vector<Expr> kids;
      kids.reserve(e->kids.size());
      for (const auto& k : e->kids) kids.push_back(subst_var(k, v, repl));
      return ex_mul(std::move(kids));
    }
  }
  return e;
}

}  // namespace varode

#endif
