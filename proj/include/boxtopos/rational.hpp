#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "boxtopos/errors.hpp"

namespace boxtopos {

// All probability arithmetic is exact. Floats never enter a computation;
// they exist only as a display format behind an explicit flag.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Canonical form "num/den" in lowest terms, "/den" omitted for integers.
inline std::string to_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) {
    s += "/";
    s += denominator(r).str();
  }
  return s;
}

// Accepts "num", "-num", "num/den".
inline Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(text));
    const BigInt num(text.substr(0, slash));
    const BigInt den(text.substr(slash + 1));
    if (den == 0) throw InputError("rational with zero denominator: " + text);
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw InputError("cannot parse rational: '" + text + "'");
  }
}

// 12 significant digits, for --approx display only.
inline std::string to_decimal_string(const Rational& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", static_cast<double>(r));
  return buf;
}

}  // namespace boxtopos
