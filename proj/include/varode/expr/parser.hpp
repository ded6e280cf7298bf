#ifndef VARODE_EXPR_PARSER_HPP
#define VARODE_EXPR_PARSER_HPP

#include <cctype>
#include <stdexcept>
#include <string>

#include "varode/expr/expr.hpp"

namespace varode {

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  std::string_view s_;
  std::size_t pos_{0};

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (eat('+')) e = e + term();
      else if (eat('-')) e = e - term();
      else return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (eat('*')) e = e * unary();
      else if (eat('/')) e = e / unary();
      else return e;
    }
  }

  Expr unary() {
    if (eat('-')) return -unary();
    return factor();
  }

  Expr factor() {
    Expr b = base();
    if (eat('^')) {
      if (peek() == '^') fail("syntax error");
      Rational e = exponent();
      return ex_pow(b, e);
    }
    return b;
  }

  Rational exponent() {
    skip_ws();
    if (eat('(')) {
      bool neg = eat('-');
      BigInt n = integer("exponent numerator");
      BigInt d = 1;
      if (eat('/')) d = integer("exponent denominator");
      if (!eat(')')) fail("expected ')' in exponent");
      if (d == 0) fail("exponent not an exact rational");
      Rational q = make_rational(n, d);
      return neg ? -q : q;
    }
    bool neg = eat('-');
    BigInt n = integer("exponent");
    Rational q(n);
    return neg ? -q : q;
  }

  BigInt integer(const std::string& what) {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected " + what);
    return BigInt(std::string(s_.substr(start, pos_ - start)));
  }

  Expr base() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return ident();
    fail("unexpected character");
  }

  Expr number() {
    BigInt n = integer("number");
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ == start) fail("expected digits after decimal point");
      std::string fracs(s_.substr(start, pos_ - start));
      BigInt den = 1;
      for (std::size_t i = 0; i < fracs.size(); ++i) den *= 10;
      return make_const(make_rational(n * den + BigInt(fracs), den));
    }
    return make_const(Rational(n));
  }

  Expr ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string name(s_.substr(start, pos_ - start));
    auto v = var_from_name(name);
    if (!v) {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    return make_var(*v);
  }
};

}  // namespace detail

inline Expr parse_expr(std::string_view text) { return detail::Parser(text).parse(); }

}  // namespace varode

#endif
