#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace crsched {

// All decision procedures run on exact rationals; the only floating point in
// the project lives in benchmark reporting. cpp_rational keeps itself in
// lowest terms with a positive denominator, which we rely on when printing.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Parses "p", "-p" or "p/q" (q > 0 after normalisation). Throws errc::parse.
Rational parse_rational(std::string_view text);

// Canonical rendering: "p" when the denominator is 1, else "p/q" in lowest
// terms. Round-trips through parse_rational.
std::string to_string(const Rational& r);

inline Rational make_rational(std::int64_t num, std::int64_t den) {
  return Rational(BigInt(num), BigInt(den));
}

}  // namespace crsched
