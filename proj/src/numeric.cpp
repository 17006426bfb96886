#include "xfree/numeric.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "xfree/error.hpp"

namespace xfree {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

BigInt parse_signed(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw PreconditionError("not an integer: '" + std::string(s) + "'");
  BigInt v{std::string(s)};
  return neg ? BigInt(-v) : v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_signed(text.substr(0, slash));
    BigInt den = parse_signed(text.substr(slash + 1));
    if (den == 0) throw PreconditionError("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool neg = !whole.empty() && whole[0] == '-';
    if (!frac.empty() && !all_digits(frac)) throw PreconditionError("bad decimal '" + std::string(text) + "'");
    BigInt w = (whole.empty() || whole == "-" || whole == "+") ? BigInt(0) : parse_signed(whole);
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
    BigInt f = frac.empty() ? BigInt(0) : BigInt(std::string(frac));
    Rational mag = Rational(boost::multiprecision::abs(w)) + Rational(f, scale);
    return neg ? Rational(-mag) : mag;
  }
  return Rational(parse_signed(text));
}

std::string to_string(const Rational& q) {
  if (boost::multiprecision::denominator(q) == 1) return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

std::int64_t integer_root(std::int64_t x, int e) {
  if (x < 0 || e < 1) throw PreconditionError("integer_root: bad arguments");
  if (e == 1 || x < 2) return x;
  auto pow_le = [&](std::int64_t m) {
    __int128 acc = 1;
    for (int i = 0; i < e; ++i) {
      acc *= m;
      if (acc > x) return false;
    }
    return true;
  };
  auto guess = static_cast<std::int64_t>(std::pow(static_cast<long double>(x), 1.0L / e));
  if (guess < 0) guess = 0;
  while (guess > 0 && !pow_le(guess)) --guess;
  while (pow_le(guess + 1)) ++guess;
  return guess;
}

std::string format_real(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12Lg", v);
  return buf;
}

std::string format_real(const Real& v) { return format_real(v.convert_to<long double>()); }

}  // namespace xfree
