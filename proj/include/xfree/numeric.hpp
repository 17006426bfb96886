#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace xfree {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
// 113-bit mantissa; used wherever the container arithmetic needs headroom.
using Real = boost::multiprecision::cpp_bin_float_quad;

// Accepts "p", "p/q" or a finite decimal such as "0.25".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

std::int64_t gcd64(std::int64_t a, std::int64_t b);

// floor(x^(1/e)), exact.
std::int64_t integer_root(std::int64_t x, int e);

// Shortest-form "%.12g" formatting used by every CSV writer.
std::string format_real(long double v);
std::string format_real(const Real& v);

}  // namespace xfree
