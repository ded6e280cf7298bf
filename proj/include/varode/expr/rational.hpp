#ifndef VARODE_EXPR_RATIONAL_HPP
#define VARODE_EXPR_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <string>

namespace varode {

// Exact rational arithmetic for expression constants and exponents.
// cpp_rational keeps numerator/denominator in lowest terms with a
// positive denominator, which is exactly the invariant Expr needs.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt rat_num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt rat_den(const Rational& q) { return boost::multiprecision::denominator(q); }

inline bool is_integer(const Rational& q) { return rat_den(q) == 1; }

inline long to_long(const BigInt& n) { return static_cast<long>(n); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// The cpp_rational two-argument constructor rejects negative denominators,
// so construction goes through this sign-normalizing helper.
inline Rational make_rational(BigInt n, BigInt d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) { n = -n; d = -d; }
  return Rational(std::move(n), std::move(d));
}

inline Rational rat_pow(const Rational& base, long e) {
  if (e == 0) return Rational(1);
  BigInt n = rat_num(base), d = rat_den(base);
  if (e < 0) {
    if (n == 0) throw std::domain_error("rat_pow: zero to a negative power");
    std::swap(n, d);
    e = -e;
  }
  return make_rational(boost::multiprecision::pow(n, static_cast<unsigned>(e)),
                       boost::multiprecision::pow(d, static_cast<unsigned>(e)));
}

// Exact k-th root of an integer if one exists.
inline std::optional<BigInt> exact_iroot(const BigInt& n, unsigned k) {
  if (k == 1) return n;
  if (n < 0) {
    if (k % 2 == 0) return std::nullopt;
    auto r = exact_iroot(-n, k);
    if (!r) return std::nullopt;
    return -*r;
  }
  if (n == 0 || n == 1) return n;
  BigInt lo = 1, hi = n;
  while (lo < hi) {
    BigInt mid = (lo + hi + 1) / 2;
    if (boost::multiprecision::pow(mid, k) <= n) lo = mid; else hi = mid - 1;
  }
  if (boost::multiprecision::pow(lo, k) == n) return lo;
  return std::nullopt;
}

// c^(p/q) as an exact rational, when the root exists (and the sign is
// representable: negative bases need odd q).
inline std::optional<Rational> exact_rat_pow(const Rational& c, const Rational& e) {
  if (is_integer(e)) return rat_pow(c, to_long(rat_num(e)));
  if (c == 0) {
    if (e > 0) return Rational(0);
    return std::nullopt;
  }
  unsigned q = static_cast<unsigned>(rat_den(e));
  auto rn = exact_iroot(rat_num(c), q);
  auto rd = exact_iroot(rat_den(c), q);
  if (!rn || !rd) return std::nullopt;
  return rat_pow(make_rational(*rn, *rd), to_long(rat_num(e)));
}

inline std::string rat_str(const Rational& q) {
  if (is_integer(q)) return rat_num(q).str();
  return rat_num(q).str() + "/" + rat_den(q).str();
}

inline int rat_cmp(const Rational& a, const Rational& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

}  // namespace varode

#endif
