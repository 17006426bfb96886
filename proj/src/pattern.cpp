#include "xfree/pattern.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "xfree/error.hpp"

namespace xfree {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_nonneg(std::string_view tok, std::int64_t& out) {
  if (tok.empty() || tok[0] == '-' || tok[0] == '+') return false;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

bool is_canonical(int d, const std::vector<Point>& pts) {
  if (!std::is_sorted(pts.begin(), pts.end())) return false;
  std::int64_t g = 0;
  for (int i = 0; i < d; ++i) {
    std::int64_t lo = pts[0][i];
    for (const auto& p : pts) lo = std::min(lo, p[i]);
    if (lo != 0) return false;
    for (const auto& p : pts) g = std::gcd(g, p[i] - pts[0][i]);
  }
  return g == 1;
}

}  // namespace

Pattern Pattern::from_points(int d, std::vector<Point> points) {
  if (d < 1) throw PreconditionError("pattern dimension must be positive");
  if (points.size() < 3) throw PreconditionError("pattern needs at least 3 points");
  for (const auto& p : points)
    if (static_cast<int>(p.size()) != d) throw PreconditionError("pattern point has wrong arity");
  std::set<Point> seen(points.begin(), points.end());
  if (seen.size() != points.size()) throw PreconditionError("pattern has duplicate points");

  Pattern out;
  out.d_ = d;
  out.widths_.assign(d, 0);
  for (int i = 0; i < d; ++i) {
    auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                        [i](const Point& a, const Point& b) { return a[i] < b[i]; });
    out.widths_[i] = (*hi)[i] - (*lo)[i];
  }
  out.primitive_ = is_canonical(d, points);
  out.points_ = std::move(points);
  return out;
}

std::int64_t Pattern::max_width() const noexcept { return *std::max_element(widths_.begin(), widths_.end()); }

std::string Pattern::to_text() const {
  std::ostringstream os;
  os << d_ << ' ' << points_.size() << '\n';
  for (const auto& p : points_) {
    for (int i = 0; i < d_; ++i) os << (i ? " " : "") << p[i];
    os << '\n';
  }
  return os.str();
}

Pattern parse_pattern(std::string_view text) {
  int line_no = 0;
  int header_line = 0;
  std::int64_t d = -1, k = -1;
  std::vector<Point> points;
  std::set<Point> seen;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (!line.empty() && line[0] == '#') continue;
    auto toks = split_ws(line);
    if (toks.empty()) {
      if (pos > text.size()) break;
      continue;
    }

    if (d < 0) {
      if (toks.size() != 2 || !parse_nonneg(toks[0], d) || !parse_nonneg(toks[1], k) || d < 1)
        throw ParseError(ParseErrorCode::Malformed, line_no, "header must be 'd k' with positive integers");
      if (k < 3) throw ParseError(ParseErrorCode::TooFewPoints, line_no, "pattern needs at least 3 points");
      header_line = line_no;
      continue;
    }
    if (static_cast<std::int64_t>(points.size()) == k)
      throw ParseError(ParseErrorCode::Malformed, line_no, "unexpected content after " + std::to_string(k) + " points");
    if (static_cast<std::int64_t>(toks.size()) != d)
      throw ParseError(ParseErrorCode::WrongArity, line_no,
                       "expected " + std::to_string(d) + " coordinates, got " + std::to_string(toks.size()));
    Point p(static_cast<std::size_t>(d));
    for (std::int64_t i = 0; i < d; ++i)
      if (!parse_nonneg(toks[i], p[i]))
        throw ParseError(ParseErrorCode::Malformed, line_no, "bad coordinate '" + std::string(toks[i]) + "'");
    if (!seen.insert(p).second) throw ParseError(ParseErrorCode::DuplicatePoint, line_no, "duplicate point");
    points.push_back(std::move(p));
  }

  if (d < 0) throw ParseError(ParseErrorCode::Malformed, line_no, "missing header");
  if (static_cast<std::int64_t>(points.size()) != k)
    throw ParseError(ParseErrorCode::Malformed, header_line,
                     "header announces " + std::to_string(k) + " points, found " + std::to_string(points.size()));
  return Pattern::from_points(static_cast<int>(d), std::move(points));
}

Pattern load_pattern(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open pattern file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_pattern(ss.str());
}

Pattern normalize(const Pattern& p) {
  const int d = p.dim();
  std::vector<Point> pts = p.points();
  std::int64_t g = 0;
  for (int i = 0; i < d; ++i) {
    std::int64_t lo = pts[0][i];
    for (const auto& x : pts) lo = std::min(lo, x[i]);
    for (auto& x : pts) x[i] -= lo;
    // differences from a fixed base point generate the same gcd as all pairs
    for (const auto& x : pts) g = std::gcd(g, x[i] - pts[0][i]);
  }
  if (g > 1)
    for (auto& x : pts)
      for (auto& c : x) c /= g;
  std::sort(pts.begin(), pts.end());
  return Pattern::from_points(d, std::move(pts));
}

Pattern triple_to_primitive(const Rational& t) {
  if (t == 0 || t == 1) throw PreconditionError("degenerate triple: t must differ from 0 and 1");
  std::vector<Rational> vals{Rational(0), t, Rational(1)};
  std::sort(vals.begin(), vals.end());
  BigInt lcm = 1;
  for (const auto& v : vals) lcm = boost::multiprecision::lcm(lcm, boost::multiprecision::denominator(v));
  std::vector<Point> pts;
  for (const auto& v : vals) {
    Rational scaled = (v - vals[0]) * lcm;
    pts.push_back({boost::multiprecision::numerator(scaled).convert_to<std::int64_t>()});
  }
  return normalize(Pattern::from_points(1, std::move(pts)));
}

std::string pattern_hash(const Pattern& p) {
  const std::string text = normalize(p).to_text();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < 16 && i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

Pattern arithmetic_progression(int k) {
  std::vector<Point> pts;
  for (int i = 0; i < k; ++i) pts.push_back({i});
  return Pattern::from_points(1, std::move(pts));
}

Pattern corner(int d) {
  std::vector<Point> pts;
  pts.emplace_back(d, 0);
  for (int i = d - 1; i >= 0; --i) {
    Point e(d, 0);
    e[i] = 1;
    pts.push_back(std::move(e));
  }
  return Pattern::from_points(d, std::move(pts));
}

}  // namespace xfree
