#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "xfree/extremal.hpp"
#include "xfree/grid_set.hpp"
#include "xfree/numeric.hpp"
#include "xfree/pattern.hpp"

namespace xfree {

// Three distinct rationals a < b < c.
class RationalTriple {
 public:
  RationalTriple(Rational a, Rational b, Rational c);
  static RationalTriple from_points(const Pattern& p1d);  // first three points of a 1-D pattern

  const Rational& a() const noexcept { return a_; }
  const Rational& b() const noexcept { return b_; }
  const Rational& c() const noexcept { return c_; }

  // (b - a) / (c - b)
  Rational ratio() const { return (b_ - a_) / (c_ - b_); }
  // The primitive integer pattern similar to {a, b, c}.
  Pattern primitive() const;

 private:
  Rational a_, b_, c_;
};

struct BehrendOptions {
  std::uint64_t verify_cap = 20'000'000;  // largest grid on which freeness is checked
  std::uint64_t cube_cap = 50'000'000;    // largest digit cube [M]^N that is bucketed
  std::uint64_t injectivity_cap = 1'000'000;
};

struct Behrend1DCertificate {
  Rational a, b, c;
  Rational q;  // (b - a) / (c - b) = P/Q
  std::int64_t n = 0;
  int N = 0;
  std::int64_t M = 0;
  std::int64_t base = 0;  // digit base (P + Q) M
  std::int64_t radius_sq = 0;
  std::uint64_t shell_size = 0;
  std::vector<std::int64_t> set;  // sorted
  bool fallback = false;
  bool pigeonhole_ok = false;   // shell_size * (N M^2 - N + 1) >= M^N
  bool in_range = false;        // set within [1, n]
  bool injectivity_checked = false;
  bool injective = false;
  bool verification_run = false;
  bool verified = false;        // freeness confirmed by gamma_count
};

// Sphere-shell construction inside [n] avoiding copies of {a, b, c}.
Behrend1DCertificate behrend_1d(const RationalTriple& triple, std::int64_t n, const BehrendOptions& options = {});

// f(x) = sum x_i base^(i-1) is injective on [M]^N.
bool digit_map_injective(std::int64_t M, int N, std::int64_t base);

struct TriangleReduction {
  std::array<Point, 3> chosen;          // original points labelled x, y, z
  std::vector<Rational> x, y;           // after translating z to 0, scaling and orienting
  std::vector<Rational> weights;        // x_i - y_i, weights[pivot] == 1
  int pivot = 0;                        // coordinate playing the role of the last index
  std::int64_t max_denominator = 1;     // max denominator of the non-pivot weights
  Rational t;
};

// p must have exactly three points.
TriangleReduction compute_t(const Pattern& p);

struct LiftOptions {
  bool all_triples = false;
  BehrendOptions behrend{};
};

struct LiftCertificate {
  Pattern original;
  std::array<Point, 3> triple;  // 3-subset the construction was built from
  std::int64_t requested_n = 0;
  std::int64_t effective_n = 0;
  bool one_dimensional = false;
  bool fallback = false;
  TriangleReduction reduction;
  Behrend1DCertificate inner;     // S' inside [effective_n / 4]
  GridSet set;                    // S inside [requested_n]^d
  std::uint64_t core_prefix_count = 0;
  std::uint64_t core_size = 0;
  bool verification_run = false;
  bool verified = false;
};

LiftCertificate behrend_lift(const Pattern& p, std::int64_t n, const LiftOptions& options = {});

struct BehrendRow {
  std::int64_t n = 0;
  std::int64_t effective_n = 0;
  std::uint64_t set_size = 0;
  long double density = 0;
  long double empirical_c = 0;  // NaN when n = 1
  bool verified = false;
  RNumberRecord record;
};

std::vector<BehrendRow> lower_bound_table(const Pattern& p, const std::vector<std::int64_t>& ns,
                                          const LiftOptions& options = {});

std::string certificate_text(const Behrend1DCertificate& c);
std::string certificate_text(const LiftCertificate& c);
std::string density_table_csv(const std::vector<BehrendRow>& rows);

}  // namespace xfree
