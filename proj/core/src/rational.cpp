#include "crsched/rational.hpp"

#include <cctype>

#include "crsched/errors.hpp"

namespace crsched {

namespace {

BigInt parse_int(std::string_view text, std::string_view whole) {
  if (text.empty()) fail(errc::parse, "empty integer in rational '" + std::string(whole) + "'");
  std::size_t i = 0;
  bool neg = false;
  if (text[0] == '-' || text[0] == '+') {
    neg = text[0] == '-';
    i = 1;
  }
  if (i == text.size()) fail(errc::parse, "sign without digits in rational '" + std::string(whole) + "'");
  BigInt value = 0;
  for (; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i])))
      fail(errc::parse, "invalid character in rational '" + std::string(whole) + "'");
    value = value * 10 + (text[i] - '0');
  }
  return neg ? -value : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::size_t slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text, text));
  const BigInt num = parse_int(text.substr(0, slash), text);
  const BigInt den = parse_int(text.substr(slash + 1), text);
  if (den == 0) fail(errc::parse, "zero denominator in rational '" + std::string(text) + "'");
  return Rational(num, den);
}

std::string to_string(const Rational& r) {
  const BigInt num = numerator(r);
  const BigInt den = denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace crsched
