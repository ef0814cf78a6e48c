#pragma once

#include <algorithm>
#include <boost/multiprecision/gmp.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>

#include "boxlab/errors.hpp"

namespace boxlab {

// Expression templates off: every arithmetic result is a concrete Rational.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;

enum class NumericMode { exact, floating };

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  // Absolute tolerance for every equality check in floating mode.
  static constexpr double tolerance = 1e-9;
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
};

template <class T>
concept Scalar = requires { ScalarTraits<T>::exact; };

template <Scalar T>
T from_ratio(std::int64_t num, std::int64_t den = 1) {
  if constexpr (ScalarTraits<T>::exact) {
    return Rational(num, den);
  } else {
    return static_cast<double>(num) / static_cast<double>(den);
  }
}

template <Scalar T>
T abs_value(const T& v) {
  if constexpr (ScalarTraits<T>::exact) {
    return boost::multiprecision::abs(v);
  } else {
    return std::fabs(v);
  }
}

template <Scalar T>
bool approx_equal(const T& a, const T& b) {
  if constexpr (ScalarTraits<T>::exact) {
    return a == b;
  } else {
    return std::fabs(a - b) <= ScalarTraits<double>::tolerance;
  }
}

template <Scalar T>
bool approx_zero(const T& a) {
  return approx_equal(a, T(0));
}

/// a >= b, up to tolerance in floating mode.
template <Scalar T>
bool approx_geq(const T& a, const T& b) {
  if constexpr (ScalarTraits<T>::exact) {
    return a >= b;
  } else {
    return a >= b - ScalarTraits<double>::tolerance;
  }
}

/// a > b by more than the tolerance.
template <Scalar T>
bool definitely_greater(const T& a, const T& b) {
  return !approx_geq(b, a);
}

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.convert_to<double>(); }

template <Scalar T>
T from_double(double v);

template <>
inline double from_double<double>(double v) {
  return v;
}

inline Rational parse_rational(std::string_view text);

/// Converts a double through its shortest round-trip decimal form, so that
/// 0.1 becomes 1/10 rather than the nearest binary fraction.
template <>
inline Rational from_double<Rational>(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
}

namespace detail {

inline Rational pow10(int e) {
  Rational r(1);
  for (int i = 0; i < e; ++i) r *= 10;
  return r;
}

inline Rational parse_decimal(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  int exp10 = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    auto tail = s.substr(e + 1);
    auto [ptr, ec] = std::from_chars(tail.data() + (tail.starts_with('+') ? 1 : 0),
                                     tail.data() + tail.size(), exp10);
    if (ec != std::errc{} || ptr != tail.data() + tail.size()) {
      throw InvalidArgument("malformed exponent in number: " + std::string(s));
    }
    s = s.substr(0, e);
  }
  std::string digits;
  int frac_digits = 0;
  bool seen_point = false;
  for (char c : s) {
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point) ++frac_digits;
    } else {
      throw InvalidArgument("malformed number: " + std::string(s));
    }
  }
  if (digits.empty()) throw InvalidArgument("malformed number: " + std::string(s));
  // A leading zero would make the GMP string constructor read octal.
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  Rational r{boost::multiprecision::mpz_int(digits)};
  exp10 -= frac_digits;
  if (exp10 >= 0) {
    r *= pow10(exp10);
  } else {
    r /= pow10(-exp10);
  }
  return neg ? Rational(-r) : r;
}

}  // namespace detail

/// Parses "p/q", a decimal ("0.125", "1e-3") or an integer into an exact rational.
inline Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw InvalidArgument("empty number");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = detail::parse_decimal(text.substr(0, slash));
    Rational den = detail::parse_decimal(text.substr(slash + 1));
    if (den == 0) throw InvalidArgument("zero denominator: " + std::string(text));
    return num / den;
  }
  return detail::parse_decimal(text);
}

template <Scalar T>
T parse_scalar(std::string_view text) {
  if constexpr (ScalarTraits<T>::exact) {
    return parse_rational(text);
  } else {
    return to_double(parse_rational(text));
  }
}

inline std::string to_string(const Rational& r) { return r.str(); }

/// Shortest round-trip decimal, locale independent.
inline std::string to_string(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace boxlab
