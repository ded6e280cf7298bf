#ifndef VARODE_EXPR_VARIABLE_HPP
#define VARODE_EXPR_VARIABLE_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace varode {

// Jet-space variables. Y and Xi are indexed families (y0, y1, ..., xi0, ...),
// the rest are singletons.
enum class VarKind : std::uint8_t { X = 0, Y, Xi, Z, T, Nu, Lambda };

struct Var {
  VarKind kind{VarKind::X};
  int index{0};  // meaningful for Y and Xi only

  friend bool operator==(const Var&, const Var&) = default;
  friend auto operator<=>(const Var& a, const Var& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    return a.index <=> b.index;
  }
};

inline Var var_x() { return {VarKind::X, 0}; }
inline Var var_y(int i) { return {VarKind::Y, i}; }
inline Var var_xi(int i) { return {VarKind::Xi, i}; }
inline Var var_z() { return {VarKind::Z, 0}; }
inline Var var_t() { return {VarKind::T, 0}; }
inline Var var_nu() { return {VarKind::Nu, 0}; }
inline Var var_lambda() { return {VarKind::Lambda, 0}; }

inline std::string var_name(const Var& v) {
  switch (v.kind) {
    case VarKind::X: return "x";
    case VarKind::Y: return "y" + std::to_string(v.index);
    case VarKind::Xi: return "xi" + std::to_string(v.index);
    case VarKind::Z: return "z";
    case VarKind::T: return "t";
    case VarKind::Nu: return "nu";
    case VarKind::Lambda: return "lambda";
  }
  return "?";
}

inline std::optional<Var> var_from_name(const std::string& s) {
  if (s == "x") return var_x();
  if (s == "z") return var_z();
  if (s == "t") return var_t();
  if (s == "nu") return var_nu();
  if (s == "lambda") return var_lambda();
  auto digits = [](const std::string& d) -> std::optional<int> {
    if (d.empty()) return std::nullopt;
    for (char c : d) if (c < '0' || c > '9') return std::nullopt;
    if (d.size() > 6) return std::nullopt;
    return std::stoi(d);
  };
  if (s.size() >= 2 && s[0] == 'y') {
    if (auto i = digits(s.substr(1))) return var_y(*i);
  }
  if (s.size() >= 3 && s[0] == 'x' && s[1] == 'i') {
    if (auto i = digits(s.substr(2))) return var_xi(*i);
  }
  return std::nullopt;
}

inline std::size_t var_hash(const Var& v) {
  return std::hash<int>()(static_cast<int>(v.kind) * 1000003 + v.index);
}

}  // namespace varode

#endif
