#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "xfree/error.hpp"
#include "xfree/numeric.hpp"

using namespace xfree;

TEST_CASE("parse_rational accepts integers, fractions and decimals") {
  CHECK(parse_rational("7") == Rational(7));
  CHECK(parse_rational("-3/6") == Rational(-1, 2));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-1.5") == Rational(-3, 2));
  CHECK(parse_rational(".5") == Rational(1, 2));
  CHECK(to_string(parse_rational("4/6")) == "2/3");
  CHECK(to_string(parse_rational("10/5")) == "2");
}

TEST_CASE("parse_rational rejects junk") {
  CHECK_THROWS_AS(parse_rational("1/0"), PreconditionError);
  CHECK_THROWS_AS(parse_rational("abc"), PreconditionError);
  CHECK_THROWS_AS(parse_rational("1.2.3"), PreconditionError);
  CHECK_THROWS_AS(parse_rational(""), PreconditionError);
}

TEST_CASE("integer_root is the exact floor root") {
  CHECK(integer_root(100, 3) == 4);
  CHECK(integer_root(64, 3) == 4);
  CHECK(integer_root(63, 3) == 3);
  CHECK(integer_root(1, 5) == 1);
  CHECK(integer_root(0, 2) == 0);
  CHECK(integer_root(std::int64_t{1} << 62, 2) == (std::int64_t{1} << 31));
  CHECK(integer_root(999'999'999'999'999'999LL, 2) == 999'999'999);

  std::mt19937_64 rng(5);
  for (int t = 0; t < 2000; ++t) {
    const std::int64_t x = static_cast<std::int64_t>(rng() >> 2);
    const int e = 1 + static_cast<int>(rng() % 6);
    const std::int64_t r = integer_root(x, e);
    auto pw = [&](std::int64_t m) {
      __int128 a = 1;
      for (int i = 0; i < e; ++i) a *= m;
      return a;
    };
    CHECK(pw(r) <= x);
    CHECK(pw(r + 1) > x);
  }
}

TEST_CASE("format_real uses twelve significant digits") {
  CHECK(format_real(0.1L) == "0.1");
  CHECK(format_real(1.0L / 3.0L) == "0.333333333333");
  CHECK(format_real(12345678901234.0L) == "1.23456789012e+13");
  CHECK(format_real(Real(2)) == "2");
}
