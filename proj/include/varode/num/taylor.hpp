#ifndef VARODE_NUM_TAYLOR_HPP
#define VARODE_NUM_TAYLOR_HPP

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "varode/expr/eval.hpp"
#include "varode/expr/rational.hpp"

namespace varode {

// Truncated Taylor series f(t0+s) = sum_k c[k] s^k. Arithmetic truncates to
// the shorter operand, so lengths track how many coefficients are trustworthy.
struct Jet {
  std::vector<double> c;

  Jet() = default;
  explicit Jet(double v) : c{v} {}
  Jet(double v, std::size_t len) : c(len, 0.0) {
    assert(len >= 1);
    c[0] = v;
  }
  static Jet variable(double v, std::size_t len) {
    Jet j(v, len);
    if (len >= 2) j.c[1] = 1.0;
    return j;
  }
  std::size_t size() const { return c.size(); }
  double value() const { return c.empty() ? 0.0 : c[0]; }
  // k-th derivative (not Taylor coefficient)
  double deriv(std::size_t k) const {
    if (k >= c.size()) throw std::out_of_range("Jet::deriv beyond truncation order");
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return c[k] * f;
  }
  Jet truncated(std::size_t len) const {
    Jet r = *this;
    if (r.c.size() > len) r.c.resize(len);
    return r;
  }
};

// Length-1 jets are exact constants (all higher coefficients are exactly 0)
// and broadcast to the other operand's length; otherwise arithmetic truncates
// to the shorter operand.
inline std::size_t jet_len(const Jet& a, const Jet& b) {
  if (a.size() == 1) return b.size();
  if (b.size() == 1) return a.size();
  return std::min(a.size(), b.size());
}
inline double jet_at(const Jet& a, std::size_t i) { return i < a.size() ? a.c[i] : 0.0; }

inline Jet operator+(const Jet& a, const Jet& b) {
  std::size_t n = jet_len(a, b);
  Jet r(0.0, n);
  for (std::size_t i = 0; i < n; ++i) r.c[i] = jet_at(a, i) + jet_at(b, i);
  return r;
}
inline Jet operator-(const Jet& a, const Jet& b) {
  std::size_t n = jet_len(a, b);
  Jet r(0.0, n);
  for (std::size_t i = 0; i < n; ++i) r.c[i] = jet_at(a, i) - jet_at(b, i);
  return r;
}
inline Jet operator-(const Jet& a) {
  Jet r = a;
  for (auto& x : r.c) x = -x;
  return r;
}
inline Jet operator*(const Jet& a, const Jet& b) {
  std::size_t n = jet_len(a, b);
  Jet r(0.0, n);
  for (std::size_t i = 0; i < n && i < a.size(); ++i)
    for (std::size_t j = 0; i + j < n && j < b.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
  return r;
}
inline Jet operator*(double s, const Jet& a) {
  Jet r = a;
  for (auto& x : r.c) x *= s;
  return r;
}
inline Jet operator/(const Jet& a, const Jet& b) {
  std::size_t n = jet_len(a, b);
  if (b.c.empty() || b.c[0] == 0.0) throw DomainError("Jet division by zero");
  Jet r(0.0, n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = jet_at(a, k);
    for (std::size_t j = 1; j <= k; ++j) s -= jet_at(b, j) * r.c[k - j];
    r.c[k] = s / b.c[0];
  }
  return r;
}

// d/ds, one order shorter.
inline Jet jet_derivative(const Jet& a) {
  if (a.size() <= 1) return Jet(0.0, 1);
  Jet r(0.0, a.size() - 1);
  for (std::size_t k = 1; k < a.size(); ++k) r.c[k - 1] = a.c[k] * static_cast<double>(k);
  return r;
}

inline Jet jet_pow_int(const Jet& a, long e) {
  std::size_t n = a.size();
  if (e == 0) return Jet(1.0, n);
  bool inv = e < 0;
  unsigned long m = inv ? -e : e;
  Jet r(1.0, n), b = a;
  while (m > 0) {
    if (m & 1) r = r * b;
    b = b * b;
    m >>= 1;
  }
  if (inv) {
    if (r.c[0] == 0.0) throw DomainError("Jet pole in negative power");
    return Jet(1.0, n) / r;
  }
  return r;
}

// a^e with rational e via the binomial series around the constant term.
inline Jet pow_rat(const Jet& a, const Rational& e) {
  if (is_integer(e)) return jet_pow_int(a, to_long(rat_num(e)));
  std::size_t n = a.size();
  double a0 = a.c[0];
  if (a0 == 0.0) throw DomainError("Jet fractional power at zero base");
  double lead;
  double sign = 1.0;
  if (a0 < 0.0) {
    long den = to_long(rat_den(e));
    if (den % 2 == 0) throw DomainError("negative base with even-denominator exponent");
    long num = to_long(rat_num(e));
    lead = std::pow(-a0, to_double(e));
    sign = (num % 2 == 0) ? 1.0 : -1.0;
    a0 = -a0;
  } else {
    lead = std::pow(a0, to_double(e));
  }
  // u = a/a0 - 1 (u0 = 0); (1+u)^e = sum binom(e,k) u^k
  double a0s = (a.c[0] < 0.0) ? -1.0 : 1.0;
  Jet u(0.0, n);
  for (std::size_t i = 0; i < n; ++i) u.c[i] = a0s * a.c[i] / a0;
  u.c[0] = 0.0;
  Jet r(1.0, n), up(1.0, n);
  double binom = 1.0;
  double ev = to_double(e);
  for (std::size_t k = 1; k < n; ++k) {
    binom *= (ev - static_cast<double>(k - 1)) / static_cast<double>(k);
    up = up * u;
    for (std::size_t i = 0; i < n; ++i) r.c[i] += binom * up.c[i];
  }
  return sign * lead * r;
}

inline Jet jet_exp(const Jet& a) {
  // r' = a' r
  std::size_t n = a.size();
  Jet r(std::exp(a.c[0]), n);
  for (std::size_t k = 1; k < n; ++k) {
    double s = 0;
    for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a.c[j] * r.c[k - j];
    r.c[k] = s / static_cast<double>(k);
  }
  return r;
}

// f(g(s)) for g with g.c[0] = 0 (f given around that point), Horner scheme.
inline Jet jet_compose(const Jet& f, const Jet& g) {
  assert(std::abs(g.c[0]) < 1e-13);
  std::size_t n = std::min(f.size(), g.size());
  Jet r(0.0, n);
  for (std::size_t k = f.size(); k-- > 0;) {
    Jet fk(k < f.size() ? f.c[k] : 0.0, n);
    r = r * g + fk;
  }
  return r;
}

// Series reversion: h with g(h(s)) = s, for g(0)=0, g'(0) != 0.
inline Jet jet_revert(const Jet& g) {
  std::size_t n = g.size();
  if (n < 2 || g.c[1] == 0.0) throw DomainError("Jet reversion needs nonzero linear term");
  Jet h(0.0, n);
  h.c[1] = 1.0 / g.c[1];
  for (std::size_t k = 2; k < n; ++k) {
    // choose h.c[k] so that [s^k] g(h(s)) = 0
    Jet gh = jet_compose(g, h);
    h.c[k] = -gh.c[k] / g.c[1];
  }
  return h;
}

// Shift a jet of f into a jet of f^(d) (as Taylor series of the d-th
// derivative, losing d orders).
inline Jet jet_shift_derivative(const Jet& a, int d) {
  Jet r = a;
  for (int i = 0; i < d; ++i) r = jet_derivative(r);
  return r;
}

}  // namespace varode

#endif
