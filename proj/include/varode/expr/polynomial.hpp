#ifndef VARODE_EXPR_POLYNOMIAL_HPP
#define VARODE_EXPR_POLYNOMIAL_HPP

#include <algorithm>
#include <cassert>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "varode/expr/expr.hpp"

namespace varode {

// Canonical form: a fraction of generalized (Puiseux) polynomials.
// Monomials are products of atoms raised to rational exponents; an atom is
// either a variable or a normalized multi-term subexpression under a
// fractional power (e.g. (y3+1)^(1/2) has atom base y3+1). Denominators are
// kept factored as products of monic multi-term polynomials, which keeps
// repeated total derivatives from squaring the denominator at every step.

struct Atom {
  bool is_var{true};
  Var v{};
  Expr base;  // composite or constant base when !is_var
};

inline int atom_cmp(const Atom& a, const Atom& b) {
  if (a.is_var != b.is_var) return a.is_var ? -1 : 1;
  if (a.is_var) {
    auto c = a.v <=> b.v;
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  if (a.base->hash != b.base->hash) return a.base->hash < b.base->hash ? -1 : 1;
  return expr_cmp(a.base, b.base);
}

struct Mono {
  // sorted by atom_cmp, exponents nonzero; composite atoms never carry
  // integer exponents (those are expanded into the polynomial instead)
  std::vector<std::pair<Atom, Rational>> f;
};

inline int mono_cmp(const Mono& a, const Mono& b) {
  std::size_t i = 0, j = 0;
  while (i < a.f.size() || j < b.f.size()) {
    if (i == a.f.size()) {
      if (int c = rat_cmp(Rational(0), b.f[j].second)) return c;
      ++j;
      continue;
    }
    if (j == b.f.size()) {
      if (int c = rat_cmp(a.f[i].second, Rational(0))) return c;
      ++i;
      continue;
    }
    int ac = atom_cmp(a.f[i].first, b.f[j].first);
    if (ac < 0) {
      if (int c = rat_cmp(a.f[i].second, Rational(0))) return c;
      ++i;
    } else if (ac > 0) {
      if (int c = rat_cmp(Rational(0), b.f[j].second)) return c;
      ++j;
    } else {
      if (int c = rat_cmp(a.f[i].second, b.f[j].second)) return c;
      ++i;
      ++j;
    }
  }
  return 0;
}
inline bool mono_is_one(const Mono& m) { return m.f.empty(); }

using PolyTerm = std::pair<Mono, Rational>;
using Poly = std::vector<PolyTerm>;  // ascending by mono_cmp, coeffs nonzero

struct DenFac {
  Poly base;  // monic, multi-term, per-atom min exponent 0
  long exp;   // >= 1
};

struct FracForm {
  Poly num;
  std::vector<DenFac> den;  // sorted by base, bases distinct
};

// forward declarations
inline FracForm ff_mul(const FracForm& a, const FracForm& b);
inline FracForm ff_add(const FracForm& a, const FracForm& b);
inline FracForm ff_pow_int(const FracForm& a, long e);
inline FracForm expr_to_frac(const Expr& e);
inline Expr poly_to_expr(const Poly& p);

inline Poly poly_zero() { return {}; }
inline Poly poly_const(const Rational& c) {
  if (c == 0) return {};
  return {{Mono{}, c}};
}
inline Poly poly_one() { return poly_const(Rational(1)); }
inline bool poly_is_zero(const Poly& p) { return p.empty(); }
inline bool poly_is_const(const Poly& p) {
  return p.empty() || (p.size() == 1 && mono_is_one(p[0].first));
}
inline Rational poly_const_value(const Poly& p) {
  return p.empty() ? Rational(0) : p[0].second;
}
inline Poly poly_var(const Var& v) {
  Mono m;
  m.f.push_back({Atom{true, v, nullptr}, Rational(1)});
  return {{m, Rational(1)}};
}

inline void poly_sort_collect(Poly& terms) {
  std::sort(terms.begin(), terms.end(), [](const PolyTerm& x, const PolyTerm& y) {
    return mono_cmp(x.first, y.first) < 0;
  });
  Poly out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && mono_cmp(out.back().first, t.first) == 0) {
      out.back().second += t.second;
      if (out.back().second == 0) out.pop_back();
    } else if (t.second != 0) {
      out.push_back(std::move(t));
    }
  }
  terms = std::move(out);
}

inline Poly poly_add(const Poly& a, const Poly& b) {
  Poly r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    int c = mono_cmp(a[i].first, b[j].first);
    if (c < 0) r.push_back(a[i++]);
    else if (c > 0) r.push_back(b[j++]);
    else {
      Rational s = a[i].second + b[j].second;
      if (s != 0) r.push_back({a[i].first, s});
      ++i;
      ++j;
    }
  }
  while (i < a.size()) r.push_back(a[i++]);
  while (j < b.size()) r.push_back(b[j++]);
  return r;
}

inline Poly poly_neg(Poly p) {
  for (auto& t : p) t.second = -t.second;
  return p;
}
inline Poly poly_scale(Poly p, const Rational& c) {
  if (c == 0) return {};
  for (auto& t : p) t.second *= c;
  return p;
}

// Composite atoms whose merged exponent becomes an integer cannot stay in a
// monomial; they are returned as pendings (base^exp) for expansion.
struct Pending {
  Expr base;
  long exp;  // nonzero
};

inline Mono mono_mul(const Mono& a, const Mono& b, std::vector<Pending>& pend) {
  Mono r;
  r.f.reserve(a.f.size() + b.f.size());
  auto push = [&r, &pend](const Atom& at, const Rational& e) {
    if (e == 0) return;
    if (!at.is_var && is_integer(e)) {
      pend.push_back({at.base, to_long(rat_num(e))});
      return;
    }
    r.f.push_back({at, e});
  };
  std::size_t i = 0, j = 0;
  while (i < a.f.size() && j < b.f.size()) {
    int c = atom_cmp(a.f[i].first, b.f[j].first);
    if (c < 0) { push(a.f[i].first, a.f[i].second); ++i; }
    else if (c > 0) { push(b.f[j].first, b.f[j].second); ++j; }
    else { push(a.f[i].first, a.f[i].second + b.f[j].second); ++i; ++j; }
  }
  while (i < a.f.size()) { push(a.f[i].first, a.f[i].second); ++i; }
  while (j < b.f.size()) { push(b.f[j].first, b.f[j].second); ++j; }
  return r;
}

inline std::optional<Mono> mono_div(const Mono& a, const Mono& b) {
  Mono binv = b;
  for (auto& t : binv.f) t.second = -t.second;
  std::vector<Pending> pend;
  Mono r = mono_mul(a, binv, pend);
  if (!pend.empty()) return std::nullopt;
  return r;
}

inline int poly_cmp(const Poly& a, const Poly& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (int c = mono_cmp(a[i].first, b[i].first)) return c;
    if (int c = rat_cmp(a[i].second, b[i].second)) return c;
  }
  return 0;
}
inline bool poly_eq(const Poly& a, const Poly& b) { return poly_cmp(a, b) == 0; }

inline FracForm ff_zero() { return {poly_zero(), {}}; }
inline FracForm ff_const(const Rational& c) { return {poly_const(c), {}}; }
inline FracForm ff_from_poly(Poly p) { return {std::move(p), {}}; }
inline bool ff_is_zero(const FracForm& f) { return poly_is_zero(f.num); }

inline void den_sort(std::vector<DenFac>& den) {
  std::sort(den.begin(), den.end(), [](const DenFac& x, const DenFac& y) {
    return poly_cmp(x.base, y.base) < 0;
  });
}
inline void den_absorb(std::vector<DenFac>& den, const DenFac& d) {
  for (auto& e : den) {
    if (poly_eq(e.base, d.base)) { e.exp += d.exp; return; }
  }
  den.push_back(d);
}

// Poly product; pendings route the affected terms through FracForm arithmetic.
inline FracForm poly_mul(const Poly& a, const Poly& b) {
  Poly terms;
  terms.reserve(a.size() * b.size());
  FracForm extra = ff_zero();
  bool any_pend = false;
  for (const auto& ta : a) {
    for (const auto& tb : b) {
      std::vector<Pending> pend;
      Mono m = mono_mul(ta.first, tb.first, pend);
      Rational c = ta.second * tb.second;
      if (pend.empty()) {
        terms.push_back({std::move(m), std::move(c)});
      } else {
        any_pend = true;
        FracForm t{Poly{{std::move(m), std::move(c)}}, {}};
        for (const auto& p : pend)
          t = ff_mul(t, ff_pow_int(expr_to_frac(p.base), p.exp));
        extra = ff_add(extra, t);
      }
    }
  }
  poly_sort_collect(terms);
  if (!any_pend) return ff_from_poly(std::move(terms));
  return ff_add(ff_from_poly(std::move(terms)), extra);
}

inline FracForm poly_pow(const Poly& p, long e) {
  assert(e >= 0);
  FracForm r = ff_const(Rational(1));
  FracForm b = ff_from_poly(p);
  while (e > 0) {
    if (e & 1) r = ff_mul(r, b);
    b = ff_mul(b, b);
    e >>= 1;
  }
  return r;
}

inline FracForm ff_mul(const FracForm& a, const FracForm& b) {
  FracForm r = poly_mul(a.num, b.num);
  for (const auto& d : a.den) den_absorb(r.den, d);
  for (const auto& d : b.den) den_absorb(r.den, d);
  den_sort(r.den);
  if (poly_is_zero(r.num)) r.den.clear();
  return r;
}

inline FracForm ff_add(const FracForm& a0, const FracForm& b0) {
  if (ff_is_zero(a0)) return b0;
  if (ff_is_zero(b0)) return a0;
  FracForm a = a0, b = b0;
  for (int round = 0; round < 8; ++round) {
    std::vector<DenFac> lcm = a.den;
    for (const auto& d : b.den) {
      bool found = false;
      for (auto& e : lcm)
        if (poly_eq(e.base, d.base)) { e.exp = std::max(e.exp, d.exp); found = true; break; }
      if (!found) lcm.push_back(d);
    }
    den_sort(lcm);
    auto cofactor = [&lcm](const FracForm& f) -> FracForm {
      FracForm r = ff_from_poly(f.num);
      for (const auto& l : lcm) {
        long have = 0;
        for (const auto& d : f.den)
          if (poly_eq(d.base, l.base)) { have = d.exp; break; }
        if (l.exp > have) r = ff_mul(r, poly_pow(l.base, l.exp - have));
      }
      return r;
    };
    FracForm na = cofactor(a), nb = cofactor(b);
    if (na.den.empty() && nb.den.empty()) {
      FracForm out{poly_add(na.num, nb.num), lcm};
      if (poly_is_zero(out.num)) out.den.clear();
      return out;
    }
    // rare: cofactor multiplication expanded composite atoms into fractions
    for (const auto& l : lcm) den_absorb(na.den, l);
    den_sort(na.den);
    for (const auto& l : lcm) den_absorb(nb.den, l);
    den_sort(nb.den);
    a = std::move(na);
    b = std::move(nb);
  }
  throw std::logic_error("ff_add failed to reach a common denominator");
}

inline FracForm ff_neg(FracForm f) {
  f.num = poly_neg(std::move(f.num));
  return f;
}
inline FracForm ff_sub(const FracForm& a, const FracForm& b) { return ff_add(a, ff_neg(b)); }

// Strip leading coefficient and per-atom monomial content from a poly.
struct BaseNorm {
  Poly base;            // monic remainder
  Rational lead_coeff;  // original leading coefficient
  Mono content;         // monomial factor common to all terms
};

inline BaseNorm normalize_base(const Poly& p) {
  assert(!poly_is_zero(p));
  std::vector<std::pair<Atom, Rational>> mins(p[0].first.f.begin(), p[0].first.f.end());
  for (std::size_t k = 1; k < p.size() && !mins.empty(); ++k) {
    const auto& mf = p[k].first.f;
    std::vector<std::pair<Atom, Rational>> merged;
    std::size_t i = 0, j = 0;
    while (i < mins.size() && j < mf.size()) {
      int c = atom_cmp(mins[i].first, mf[j].first);
      if (c < 0) {
        if (mins[i].second < 0) merged.push_back(mins[i]);
        ++i;
      } else if (c > 0) {
        if (mf[j].second < 0) merged.push_back(mf[j]);
        ++j;
      } else {
        Rational m = std::min(mins[i].second, mf[j].second);
        if (m != 0) merged.push_back({mins[i].first, m});
        ++i;
        ++j;
      }
    }
    while (i < mins.size()) { if (mins[i].second < 0) merged.push_back(mins[i]); ++i; }
    while (j < mf.size()) { if (mf[j].second < 0) merged.push_back(mf[j]); ++j; }
    mins = std::move(merged);
  }
  Mono content;
  content.f = std::move(mins);
  Poly stripped;
  if (content.f.empty()) {
    stripped = p;
  } else {
    Mono cinv = content;
    for (auto& t : cinv.f) t.second = -t.second;
    bool ok = true;
    for (const auto& t : p) {
      std::vector<Pending> pend;
      Mono m = mono_mul(t.first, cinv, pend);
      if (!pend.empty()) { ok = false; break; }
      stripped.push_back({std::move(m), t.second});
    }
    if (!ok) {
      stripped = p;
      content.f.clear();
    } else {
      poly_sort_collect(stripped);
    }
  }
  Rational lead = stripped.back().second;
  Poly monic = poly_scale(std::move(stripped), Rational(1) / lead);
  return {std::move(monic), lead, content};
}

// f * rawbase^(-exp), normalizing the base into den form.
inline FracForm ff_div_base(FracForm f, const Poly& rawbase, long exp) {
  assert(exp >= 1 && !poly_is_zero(rawbase));
  BaseNorm bn = normalize_base(rawbase);
  FracForm out;
  Rational cf = rat_pow(bn.lead_coeff, -exp);
  if (bn.content.f.empty()) {
    out = std::move(f);
    out.num = poly_scale(std::move(out.num), cf);
  } else {
    Mono cinv = bn.content;
    for (auto& t : cinv.f) t.second = t.second * Rational(-exp);
    Poly cpoly{{cinv, cf}};
    FracForm prod = poly_mul(f.num, cpoly);
    for (const auto& d : f.den) den_absorb(prod.den, d);
    den_sort(prod.den);
    out = std::move(prod);
  }
  if (poly_is_const(bn.base)) {
    Rational c = poly_const_value(bn.base);
    if (c != 1) out.num = poly_scale(std::move(out.num), rat_pow(c, -exp));
    return out;
  }
  den_absorb(out.den, DenFac{bn.base, exp});
  den_sort(out.den);
  if (poly_is_zero(out.num)) out.den.clear();
  return out;
}

inline FracForm ff_inv(const FracForm& f) {
  if (ff_is_zero(f)) throw std::domain_error("division by zero expression");
  FracForm r = ff_const(Rational(1));
  for (const auto& d : f.den) r = ff_mul(r, poly_pow(d.base, d.exp));
  if (poly_is_const(f.num)) {
    r.num = poly_scale(std::move(r.num), Rational(1) / poly_const_value(f.num));
    return r;
  }
  if (f.num.size() == 1) {
    Mono minv;
    for (const auto& t : f.num[0].first.f) minv.f.push_back({t.first, -t.second});
    FracForm mi = ff_from_poly(Poly{{minv, Rational(1) / f.num[0].second}});
    return ff_mul(r, mi);
  }
  return ff_div_base(std::move(r), f.num, 1);
}

inline FracForm ff_div(const FracForm& a, const FracForm& b) { return ff_mul(a, ff_inv(b)); }

inline FracForm ff_pow_int(const FracForm& a, long e) {
  if (e == 0) return ff_const(Rational(1));
  FracForm base = e < 0 ? ff_inv(a) : a;
  long n = e < 0 ? -e : e;
  FracForm r = ff_const(Rational(1));
  while (n > 0) {
    if (n & 1) r = ff_mul(r, base);
    base = ff_mul(base, base);
    n >>= 1;
  }
  return r;
}

inline FracForm ff_pow_rat(const FracForm& f, const Rational& e) {
  if (is_integer(e)) return ff_pow_int(f, to_long(rat_num(e)));
  if (ff_is_zero(f)) {
    if (e > 0) return ff_zero();
    throw std::domain_error("0 raised to a negative power");
  }
  if (f.den.empty() && f.num.size() == 1) {
    const Mono& m = f.num[0].first;
    const Rational& c = f.num[0].second;
    Mono rm;
    FracForm rest = ff_const(Rational(1));
    for (const auto& [at, ex] : m.f) {
      Rational ne = ex * e;
      if (!at.is_var && is_integer(ne)) {
        rest = ff_mul(rest, ff_pow_int(expr_to_frac(at.base), to_long(rat_num(ne))));
      } else {
        rm.f.push_back({at, ne});
      }
    }
    Rational coeff(1);
    if (auto rc = exact_rat_pow(c, e)) {
      coeff = *rc;
    } else {
      rm.f.push_back({Atom{false, Var{}, make_const(c)}, e});
    }
    std::sort(rm.f.begin(), rm.f.end(),
              [](const auto& x, const auto& y) { return atom_cmp(x.first, y.first) < 0; });
    return ff_mul(ff_from_poly(Poly{{std::move(rm), coeff}}), rest);
  }
  // general base: numerator/denominator parts become atoms
  FracForm out = ff_const(Rational(1));
  if (poly_is_const(f.num)) {
    out = ff_pow_rat(ff_const(poly_const_value(f.num)), e);
  } else {
    BaseNorm bn = normalize_base(f.num);
    FracForm part = ff_pow_rat(ff_from_poly(Poly{{bn.content, bn.lead_coeff}}), e);
    if (!poly_is_const(bn.base)) {
      Mono am;
      am.f.push_back({Atom{false, Var{}, poly_to_expr(bn.base)}, e});
      part = ff_mul(part, ff_from_poly(Poly{{am, Rational(1)}}));
    }
    out = ff_mul(out, part);
  }
  for (const auto& d : f.den) {
    Mono am;
    am.f.push_back({Atom{false, Var{}, poly_to_expr(d.base)}, -e * Rational(d.exp)});
    out = ff_mul(out, ff_from_poly(Poly{{am, Rational(1)}}));
  }
  return out;
}

inline FracForm expr_to_frac(const Expr& e) {
  switch (e->op) {
    case ExprOp::Const: return ff_const(e->value);
    case ExprOp::VarRef: return ff_from_poly(poly_var(e->var));
    case ExprOp::Add: {
      FracForm r = ff_zero();
      for (const auto& k : e->kids) r = ff_add(r, expr_to_frac(k));
      return r;
    }
    case ExprOp::Mul: {
      FracForm r = ff_const(Rational(1));
      for (const auto& k : e->kids) r = ff_mul(r, expr_to_frac(k));
      return r;
    }
    case ExprOp::Pow:
      return ff_pow_rat(expr_to_frac(e->kids[0]), e->value);
  }
  return ff_zero();
}

inline Expr atom_to_expr(const Atom& a) {
  return a.is_var ? make_var(a.v) : a.base;
}

inline Expr mono_to_expr(const Mono& m, const Rational& coeff) {
  std::vector<Expr> factors;
  if (coeff != 1 || m.f.empty()) factors.push_back(make_const(coeff));
  for (const auto& [at, ex] : m.f) factors.push_back(ex_pow(atom_to_expr(at), ex));
  return ex_mul(std::move(factors));
}

inline Expr poly_to_expr(const Poly& p) {
  if (p.empty()) return make_const(0);
  std::vector<Expr> terms;
  terms.reserve(p.size());
  for (auto it = p.rbegin(); it != p.rend(); ++it)
    terms.push_back(mono_to_expr(it->first, it->second));
  return ex_add(std::move(terms));
}

inline Expr frac_to_expr(const FracForm& f) {
  Expr n = poly_to_expr(f.num);
  if (f.den.empty()) return n;
  std::vector<Expr> factors{n};
  for (const auto& d : f.den)
    factors.push_back(ex_pow(poly_to_expr(d.base), Rational(-d.exp)));
  return ex_mul(std::move(factors));
}

// Exact division test in the Puiseux ring; nullopt when not divisible.
// Non-divisible inputs can start an unbounded descending chain (a power
// series), so both the step count and the remainder size are capped; exact
// quotients arising in the pipeline stay far below the caps.
inline std::optional<Poly> poly_divide_exact(const Poly& n, const Poly& b,
                                             std::size_t step_cap = 600) {
  if (poly_is_zero(n)) return poly_zero();
  if (poly_is_zero(b)) return std::nullopt;
  const std::size_t size_cap = 4 * n.size() + 8 * b.size() + 64;
  Poly r = n, q;
  std::size_t steps = 0;
  while (!poly_is_zero(r)) {
    if (++steps > step_cap || r.size() > size_cap) return std::nullopt;
    auto md = mono_div(r.back().first, b.back().first);
    if (!md) return std::nullopt;
    Poly t{{*md, r.back().second / b.back().second}};
    FracForm tb = poly_mul(t, b);
    if (!tb.den.empty()) return std::nullopt;
    Mono old_lead = r.back().first;
    Poly nr = poly_add(r, poly_neg(tb.num));
    if (!poly_is_zero(nr) && mono_cmp(nr.back().first, old_lead) >= 0) return std::nullopt;
    q = poly_add(q, t);
    r = std::move(nr);
  }
  return q;
}

inline FracForm ff_reduce(FracForm f) {
  if (poly_is_zero(f.num)) { f.den.clear(); return f; }
  for (auto& d : f.den) {
    while (d.exp > 0) {
      auto q = poly_divide_exact(f.num, d.base);
      if (!q) break;
      f.num = std::move(*q);
      d.exp -= 1;
      if (poly_is_zero(f.num)) break;
    }
  }
  std::erase_if(f.den, [](const DenFac& d) { return d.exp == 0; });
  if (poly_is_zero(f.num)) f.den.clear();
  return f;
}

// --- derivatives on canonical forms ---

inline Poly poly_derivative(const Poly& p, const Var& v);

inline FracForm ff_derivative(const FracForm& f, const Var& v) {
  FracForm r{poly_derivative(f.num, v), f.den};
  if (poly_is_zero(r.num)) r.den.clear();
  for (std::size_t i = 0; i < f.den.size(); ++i) {
    Poly db = poly_derivative(f.den[i].base, v);
    if (poly_is_zero(db)) continue;
    FracForm t = poly_mul(f.num, db);
    t.num = poly_scale(std::move(t.num), Rational(-f.den[i].exp));
    for (std::size_t j = 0; j < f.den.size(); ++j)
      den_absorb(t.den, DenFac{f.den[j].base, f.den[j].exp + (i == j ? 1 : 0)});
    den_sort(t.den);
    if (poly_is_zero(t.num)) t.den.clear();
    r = ff_add(r, t);
  }
  return r;
}

inline Poly poly_derivative(const Poly& p, const Var& v) {
  Poly out;
  for (const auto& [m, c] : p) {
    for (std::size_t i = 0; i < m.f.size(); ++i) {
      const auto& [at, ex] = m.f[i];
      Poly datom;
      if (at.is_var) {
        if (!(at.v == v)) continue;
        datom = poly_one();
      } else {
        if (at.base->op == ExprOp::Const) continue;
        FracForm db = ff_derivative(expr_to_frac(at.base), v);
        if (ff_is_zero(db)) continue;
        if (!db.den.empty())
          throw std::logic_error("composite atom base must be polynomial");
        datom = db.num;
      }
      Mono rest;
      for (std::size_t j = 0; j < m.f.size(); ++j) {
        if (j == i) {
          if (ex != 1) rest.f.push_back({at, ex - 1});
        } else {
          rest.f.push_back(m.f[j]);
        }
      }
      FracForm prod = poly_mul(Poly{{rest, c * ex}}, datom);
      if (!prod.den.empty())
        throw std::logic_error("unexpected denominator in poly derivative");
      out = poly_add(out, prod.num);
    }
  }
  return out;
}

}  // namespace varode

#endif
