#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "xfree/numeric.hpp"

namespace xfree {

using Point = std::vector<std::int64_t>;

// A finite point set X in Z^d with |X| >= 3. Construct through parse_pattern,
// Pattern::from_points or normalize; all of them validate the invariants.
class Pattern {
 public:
  Pattern() = default;
  static Pattern from_points(int d, std::vector<Point> points);

  int dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<Point>& points() const noexcept { return points_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }

  // w_i = max x_i - min x_i
  const std::vector<std::int64_t>& widths() const noexcept { return widths_; }
  std::int64_t max_width() const noexcept;
  bool primitive() const noexcept { return primitive_; }

  std::string to_text() const;

  friend bool operator==(const Pattern&, const Pattern&) = default;

 private:
  int d_ = 0;
  std::vector<Point> points_;
  std::vector<std::int64_t> widths_;
  bool primitive_ = false;
};

// Reads the pattern file format: "d k" header, then k rows of d integers.
// '#' lines are comments. Points are kept in file order.
Pattern parse_pattern(std::string_view text);
Pattern load_pattern(const std::string& path);

// Translate to componentwise minimum 0, divide by the gcd of all coordinate
// differences and sort lexicographically.
Pattern normalize(const Pattern& p);

// Primitive 1-D pattern similar to {0, t, 1}; t must not be 0 or 1.
Pattern triple_to_primitive(const Rational& t);

// Stable SHA-256-derived identifier of the normalized pattern.
std::string pattern_hash(const Pattern& p);

// Named patterns used throughout the tests and the CLI.
Pattern arithmetic_progression(int k);
Pattern corner(int d);

}  // namespace xfree
