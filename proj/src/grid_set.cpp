#include "xfree/grid_set.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "xfree/error.hpp"

namespace xfree {

std::uint64_t checked_power(std::int64_t n, int d) {
  if (n < 0) throw PreconditionError("negative grid side");
  unsigned __int128 acc = 1;
  for (int i = 0; i < d; ++i) {
    acc *= static_cast<unsigned __int128>(n);
    if (acc > (static_cast<unsigned __int128>(1) << 62)) throw BudgetError("grid size n^d overflows");
  }
  return static_cast<std::uint64_t>(acc);
}

GridSet::GridSet(std::int64_t n, int d) : n_(n), d_(d) {
  if (d < 1) throw PreconditionError("grid dimension must be positive");
  if (n < 0) throw PreconditionError("grid side must be non-negative");
  cells_ = checked_power(n, d);
  bits_.assign((cells_ + 63) / 64, 0);
}

GridSet GridSet::full(std::int64_t n, int d) {
  GridSet s(n, d);
  for (std::uint64_t w = 0; w < s.bits_.size(); ++w) s.bits_[w] = ~std::uint64_t{0};
  if (s.cells_ % 64) s.bits_.back() = (std::uint64_t{1} << (s.cells_ % 64)) - 1;
  s.size_ = s.cells_;
  return s;
}

GridSet GridSet::from_points(std::int64_t n, int d, std::span<const Point> points) {
  GridSet s(n, d);
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != d || !s.in_grid(p)) throw PreconditionError("point outside [n]^d");
    s.insert(p);
  }
  return s;
}

GridSet GridSet::from_mask(std::int64_t n, std::uint64_t mask) {
  GridSet s(n, 1);
  for (std::int64_t i = 0; i < n && i < 64; ++i)
    if ((mask >> i) & 1u) s.set(static_cast<std::uint64_t>(i));
  return s;
}

bool GridSet::in_grid(std::span<const std::int64_t> x) const {
  if (static_cast<int>(x.size()) != d_) return false;
  for (auto c : x)
    if (c < 1 || c > n_) return false;
  return true;
}

std::uint64_t GridSet::index(std::span<const std::int64_t> x) const {
  std::uint64_t idx = 0;
  for (int i = d_ - 1; i >= 0; --i) idx = idx * static_cast<std::uint64_t>(n_) + static_cast<std::uint64_t>(x[i] - 1);
  return idx;
}

Point GridSet::point(std::uint64_t index) const {
  Point p(d_);
  for (int i = 0; i < d_; ++i) {
    p[i] = static_cast<std::int64_t>(index % static_cast<std::uint64_t>(n_)) + 1;
    index /= static_cast<std::uint64_t>(n_);
  }
  return p;
}

void GridSet::set(std::uint64_t index) {
  std::uint64_t& w = bits_[index >> 6];
  const std::uint64_t m = std::uint64_t{1} << (index & 63);
  if (!(w & m)) {
    w |= m;
    ++size_;
  }
}

void GridSet::reset(std::uint64_t index) {
  std::uint64_t& w = bits_[index >> 6];
  const std::uint64_t m = std::uint64_t{1} << (index & 63);
  if (w & m) {
    w &= ~m;
    --size_;
  }
}

std::vector<std::uint64_t> GridSet::indices() const {
  std::vector<std::uint64_t> out;
  out.reserve(size_);
  for (std::uint64_t w = 0; w < bits_.size(); ++w) {
    std::uint64_t word = bits_[w];
    while (word) {
      out.push_back(w * 64 + static_cast<std::uint64_t>(std::countr_zero(word)));
      word &= word - 1;
    }
  }
  return out;
}

std::vector<Point> GridSet::points() const {
  std::vector<Point> out;
  out.reserve(size_);
  for (auto idx : indices()) out.push_back(point(idx));
  std::sort(out.begin(), out.end());
  return out;
}

void write_grid_set(std::ostream& os, const GridSet& s) {
  os << "# n=" << s.side() << " d=" << s.dim() << '\n';
  for (const auto& p : s.points()) {
    for (int i = 0; i < s.dim(); ++i) os << (i ? " " : "") << p[i];
    os << '\n';
  }
}

std::string grid_set_text(const GridSet& s) {
  std::ostringstream os;
  write_grid_set(os, s);
  return os.str();
}

GridSet parse_grid_set(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::int64_t n = -1;
  int d = -1;
  std::vector<Point> pts;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (n < 0) {
        long long nn = 0;
        int dd = 0;
        if (std::sscanf(line.c_str(), "# n=%lld d=%d", &nn, &dd) == 2) {
          n = nn;
          d = dd;
        }
      }
      continue;
    }
    if (n < 0) throw ParseError(ParseErrorCode::Malformed, line_no, "grid set needs a '# n=<n> d=<d>' header");
    std::istringstream row(line);
    Point p;
    std::int64_t v;
    while (row >> v) p.push_back(v);
    if (!row.eof()) throw ParseError(ParseErrorCode::Malformed, line_no, "bad coordinate");
    if (static_cast<int>(p.size()) != d) throw ParseError(ParseErrorCode::WrongArity, line_no, "wrong number of coordinates");
    pts.push_back(std::move(p));
  }
  if (n < 0) throw ParseError(ParseErrorCode::Malformed, line_no, "missing grid set header");
  GridSet s(n, d);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!s.in_grid(pts[i])) throw ParseError(ParseErrorCode::Malformed, 0, "point outside [n]^d");
    s.insert(pts[i]);
  }
  return s;
}

GridSet load_grid_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open grid set file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_grid_set(ss.str());
}

}  // namespace xfree
