#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xfree/pattern.hpp"

namespace xfree {

// Subset of [n]^d with dense bit membership. Coordinates are 1-based;
// index(x) = sum (x_i - 1) n^(i-1).
class GridSet {
 public:
  GridSet() = default;
  GridSet(std::int64_t n, int d);

  static GridSet full(std::int64_t n, int d);
  static GridSet from_points(std::int64_t n, int d, std::span<const Point> points);
  static GridSet from_mask(std::int64_t n, std::uint64_t mask);  // d = 1, element i+1 <-> bit i

  std::int64_t side() const noexcept { return n_; }
  int dim() const noexcept { return d_; }
  std::uint64_t cell_count() const noexcept { return cells_; }
  std::uint64_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  std::uint64_t index(std::span<const std::int64_t> x) const;
  Point point(std::uint64_t index) const;
  bool in_grid(std::span<const std::int64_t> x) const;

  bool test(std::uint64_t index) const noexcept { return (bits_[index >> 6] >> (index & 63)) & 1u; }
  bool contains(std::span<const std::int64_t> x) const { return in_grid(x) && test(index(x)); }
  void set(std::uint64_t index);
  void reset(std::uint64_t index);
  void insert(std::span<const std::int64_t> x) { set(index(x)); }
  void erase(std::span<const std::int64_t> x) { reset(index(x)); }

  std::vector<std::uint64_t> indices() const;
  std::vector<Point> points() const;

  const std::vector<std::uint64_t>& words() const noexcept { return bits_; }

  friend bool operator==(const GridSet& a, const GridSet& b) {
    return a.n_ == b.n_ && a.d_ == b.d_ && a.bits_ == b.bits_;
  }

 private:
  std::int64_t n_ = 0;
  int d_ = 0;
  std::uint64_t cells_ = 0;
  std::uint64_t size_ = 0;
  std::vector<std::uint64_t> bits_;
};

// Text format: "# n=<n> d=<d>" header, then one lexicographically sorted point
// per line.
void write_grid_set(std::ostream& os, const GridSet& s);
std::string grid_set_text(const GridSet& s);
GridSet parse_grid_set(std::string_view text);
GridSet load_grid_set(const std::string& path);

std::uint64_t checked_power(std::int64_t n, int d);

}  // namespace xfree
