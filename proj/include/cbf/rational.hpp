#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cbf {

using Rational = boost::multiprecision::number<
    boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                              boost::multiprecision::et_off>;

/// Error raised when an operation receives arguments outside its domain.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline Integer num(const Rational& q) { return Integer(boost::multiprecision::numerator(q)); }
inline Integer den(const Rational& q) { return Integer(boost::multiprecision::denominator(q)); }

inline Integer floor_of(const Rational& q) {
  Integer n = num(q), d = den(q);
  Integer f = n / d;  // truncates toward zero
  if (n < 0 && f * d != n) f -= 1;
  return f;
}

inline Integer ceil_of(const Rational& q) { return -floor_of(-q); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// "p/q", or "p" for integers.
inline std::string to_string(const Rational& q) {
  if (den(q) == 1) return num(q).str();
  return num(q).str() + "/" + den(q).str();
}

/// Parses "p", "p/q", "-p/q" or an exact decimal such as "0.25" or "-1.5".
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw DomainError("not an exact rational: '" + std::string(text) + "'"); };
  auto is_int = [](std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  auto to_int = [](std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    return Integer(std::string(s));
  };

  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto p = s.substr(0, slash), d = s.substr(slash + 1);
    if (!is_int(p) || !is_int(d) || d.front() == '-' || d.front() == '+') fail();
    Integer dd = to_int(d);
    if (dd == 0) fail();
    return Rational(to_int(p), dd);
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto whole = s.substr(0, dot), frac = s.substr(dot + 1);
    bool negative = !whole.empty() && whole.front() == '-';
    std::string_view digits = whole;
    if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) digits.remove_prefix(1);
    if (digits.empty() && frac.empty()) fail();
    for (char c : digits)
      if (c < '0' || c > '9') fail();
    for (char c : frac)
      if (c < '0' || c > '9') fail();
    Integer scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Integer mag = (digits.empty() ? Integer(0) : Integer(std::string(digits))) * scale +
                  (frac.empty() ? Integer(0) : Integer(std::string(frac)));
    return Rational(negative ? Integer(-mag) : mag, scale);
  }
  if (!is_int(s)) fail();
  return Rational(to_int(s));
}

}  // namespace cbf
