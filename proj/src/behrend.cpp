#include "xfree/behrend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "xfree/copies.hpp"
#include "xfree/error.hpp"

namespace xfree {

namespace mp = boost::multiprecision;

RationalTriple::RationalTriple(Rational a, Rational b, Rational c) : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
  if (!(a_ < b_ && b_ < c_)) throw PreconditionError("triple must satisfy a < b < c");
}

RationalTriple RationalTriple::from_points(const Pattern& p1d) {
  if (p1d.dim() != 1 || p1d.size() < 3) throw PreconditionError("expected a 1-D pattern with at least three points");
  std::vector<std::int64_t> v{p1d[0][0], p1d[1][0], p1d[2][0]};
  std::sort(v.begin(), v.end());
  return {Rational(v[0]), Rational(v[1]), Rational(v[2])};
}

Pattern RationalTriple::primitive() const { return triple_to_primitive((b_ - a_) / (c_ - a_)); }

bool digit_map_injective(std::int64_t M, int N, std::int64_t base) {
  std::vector<std::int64_t> values;
  std::vector<std::int64_t> digit(N, 1);
  for (;;) {
    std::int64_t f = 0, pw = 1;
    for (int i = 0; i < N; ++i) {
      f += digit[i] * pw;
      pw *= base;
    }
    values.push_back(f);
    int i = 0;
    while (i < N && digit[i] == M) digit[i++] = 1;
    if (i == N) break;
    ++digit[i];
  }
  std::sort(values.begin(), values.end());
  return std::adjacent_find(values.begin(), values.end()) == values.end();
}

namespace {

std::uint64_t ipow(std::int64_t b, int e) {
  unsigned __int128 acc = 1;
  for (int i = 0; i < e; ++i) {
    acc *= static_cast<unsigned __int128>(b);
    if (acc > static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max())) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

void run_verification(Behrend1DCertificate& c, const BehrendOptions& options) {
  if (static_cast<std::uint64_t>(c.n) > options.verify_cap) return;
  GridSet s(c.n, 1);
  for (auto v : c.set) s.set(static_cast<std::uint64_t>(v - 1));
  c.verification_run = true;
  c.verified = is_x_free(s, RationalTriple(c.a, c.b, c.c).primitive());
}

}  // namespace

Behrend1DCertificate behrend_1d(const RationalTriple& triple, std::int64_t n, const BehrendOptions& options) {
  if (n < 1) throw PreconditionError("behrend_1d needs n >= 1");
  Behrend1DCertificate c;
  c.a = triple.a();
  c.b = triple.b();
  c.c = triple.c();
  c.q = triple.ratio();
  c.n = n;

  const std::int64_t P = mp::numerator(c.q).convert_to<std::int64_t>();
  const std::int64_t Q = mp::denominator(c.q).convert_to<std::int64_t>();
  c.N = n < 2 ? 1 : std::max(1, static_cast<int>(std::ceil(std::sqrt(std::log(static_cast<long double>(n))))));
  // largest M with ((P + Q) M)^N <= n
  c.M = integer_root(n, c.N) / (P + Q);
  c.base = (P + Q) * c.M;

  if (c.M < 2) {
    c.fallback = true;
    c.set = {1};
    c.shell_size = 1;
    c.in_range = true;
    c.pigeonhole_ok = true;
    run_verification(c, options);
    return c;
  }

  const std::uint64_t cube = ipow(c.M, c.N);
  if (cube > options.cube_cap)
    throw BudgetError("digit cube M^N = " + std::to_string(cube) + " exceeds cap " + std::to_string(options.cube_cap));

  const std::int64_t lo = c.N, hi = static_cast<std::int64_t>(c.N) * c.M * c.M;
  std::vector<std::uint64_t> shell(hi - lo + 1, 0);
  std::vector<std::int64_t> digit(c.N, 1);
  auto for_each_vector = [&](auto&& fn) {
    std::fill(digit.begin(), digit.end(), 1);
    for (;;) {
      fn();
      int i = 0;
      while (i < c.N && digit[i] == c.M) digit[i++] = 1;
      if (i == c.N) return;
      ++digit[i];
    }
  };
  auto norm = [&] {
    std::int64_t s = 0;
    for (auto x : digit) s += x * x;
    return s;
  };
  for_each_vector([&] { ++shell[norm() - lo]; });

  // largest shell, smallest radius on ties
  std::size_t pick = 0;
  for (std::size_t i = 1; i < shell.size(); ++i)
    if (shell[i] > shell[pick]) pick = i;
  c.radius_sq = lo + static_cast<std::int64_t>(pick);
  c.shell_size = shell[pick];

  for_each_vector([&] {
    if (norm() != c.radius_sq) return;
    std::int64_t f = 0, pw = 1;
    for (auto x : digit) {
      f += x * pw;
      pw *= c.base;
    }
    c.set.push_back(f);
  });
  std::sort(c.set.begin(), c.set.end());

  c.pigeonhole_ok = static_cast<unsigned __int128>(c.shell_size) * static_cast<unsigned __int128>(hi - lo + 1) >= cube;
  c.in_range = c.set.front() >= 1 && c.set.back() <= n;
  if (cube <= options.injectivity_cap) {
    c.injectivity_checked = true;
    c.injective = digit_map_injective(c.M, c.N, c.base);
  }
  run_verification(c, options);
  return c;
}

TriangleReduction compute_t(const Pattern& p) {
  if (p.size() != 3) throw PreconditionError("compute_t needs exactly three points");
  const int d = p.dim();
  static constexpr int labelings[3][3] = {{1, 2, 0}, {0, 2, 1}, {0, 1, 2}};  // {x, y, z}

  for (const auto& lab : labelings) {
    const Point& px = p[lab[0]];
    const Point& py = p[lab[1]];
    const Point& pz = p[lab[2]];
    std::int64_t xdot = 0, ydot = 0;
    for (int i = 0; i < d; ++i) {
      const std::int64_t xi = px[i] - pz[i], yi = py[i] - pz[i];
      xdot += xi * (xi - yi);
      ydot += yi * (xi - yi);
    }
    if (xdot == 0 || ydot == 0) continue;

    TriangleReduction red;
    red.chosen = {px, py, pz};
    int pivot = 0;
    std::int64_t best = -1;
    for (int i = 0; i < d; ++i) {
      const std::int64_t diff = std::abs((px[i] - pz[i]) - (py[i] - pz[i]));
      if (diff >= best) {
        best = diff;
        pivot = i;
      }
    }
    const std::int64_t signed_diff = px[pivot] - py[pivot];
    const Rational scale(std::abs(signed_diff));
    red.x.resize(d);
    red.y.resize(d);
    for (int i = 0; i < d; ++i) {
      red.x[i] = Rational(px[i] - pz[i]) / scale;
      red.y[i] = Rational(py[i] - pz[i]) / scale;
    }
    if (signed_diff < 0) std::swap(red.x, red.y);
    red.pivot = pivot;
    red.weights.resize(d);
    Rational num = 0, den = 0;
    for (int i = 0; i < d; ++i) {
      red.weights[i] = red.x[i] - red.y[i];
      num += red.y[i] * (red.y[i] - red.x[i]);
      den += red.weights[i] * red.weights[i];
      if (i != pivot)
        red.max_denominator = std::max(red.max_denominator, mp::denominator(red.weights[i]).convert_to<std::int64_t>());
    }
    red.t = num / den;
    if (red.t == 0 || red.t == 1 || red.weights[pivot] != 1)
      throw std::logic_error("compute_t: degenerate reduction survived the angle test");
    return red;
  }
  throw std::logic_error("compute_t: no labelling avoids a right angle at x and y");
}

namespace {

std::vector<std::array<std::size_t, 3>> three_subsets(std::size_t k, bool all) {
  std::vector<std::array<std::size_t, 3>> out;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      for (std::size_t l = j + 1; l < k; ++l) {
        out.push_back({i, j, l});
        if (!all) return out;
      }
  return out;
}

LiftCertificate lift_one(const Pattern& original, const std::array<std::size_t, 3>& pick, std::int64_t n,
                         const LiftOptions& options) {
  const int d = original.dim();
  LiftCertificate cert;
  cert.original = original;
  cert.triple = {original[pick[0]], original[pick[1]], original[pick[2]]};
  cert.requested_n = n;
  cert.set = GridSet(n, d);

  if (d == 1) {
    cert.one_dimensional = true;
    cert.effective_n = n;
    std::array<std::int64_t, 3> v{cert.triple[0][0], cert.triple[1][0], cert.triple[2][0]};
    std::sort(v.begin(), v.end());
    cert.inner = behrend_1d(RationalTriple(Rational(v[0]), Rational(v[1]), Rational(v[2])), n, options.behrend);
    cert.fallback = cert.inner.fallback;
    for (auto a : cert.inner.set) cert.set.set(static_cast<std::uint64_t>(a - 1));
  } else {
    const std::int64_t unit = 4 * static_cast<std::int64_t>(d - 1);
    cert.effective_n = n - n % unit;
    const Pattern tri = Pattern::from_points(d, {cert.triple[0], cert.triple[1], cert.triple[2]});
    cert.reduction = compute_t(tri);

    if (cert.effective_n == 0) {
      cert.fallback = true;
      if (n >= 1) cert.set.insert(Point(d, 1));
    } else {
      const std::int64_t quarter = cert.effective_n / 4, half = cert.effective_n / 2;
      std::vector<Rational> vals{Rational(0), cert.reduction.t, Rational(1)};
      std::sort(vals.begin(), vals.end());
      cert.inner = behrend_1d(RationalTriple(vals[0], vals[1], vals[2]), quarter, options.behrend);
      cert.fallback = cert.inner.fallback;

      // integer weights W = D * w, with w[pivot] = 1
      BigInt lcm = 1;
      for (const auto& w : cert.reduction.weights) lcm = mp::lcm(lcm, mp::denominator(w));
      const std::int64_t D = lcm.convert_to<std::int64_t>();
      std::vector<std::int64_t> W(d);
      for (int i = 0; i < d; ++i) W[i] = mp::numerator(Rational(cert.reduction.weights[i] * D)).convert_to<std::int64_t>();
      const int pivot = cert.reduction.pivot;

      std::vector<int> free_axes;
      for (int i = 0; i < d; ++i)
        if (i != pivot) free_axes.push_back(i);
      Point s(d, 1);
      for (;;) {
        __int128 scaled = 0;
        for (int i : free_axes) scaled += static_cast<__int128>(s[i] - half) * W[i];
        if (scaled % D == 0) {
          const std::int64_t partial = static_cast<std::int64_t>(scaled / D);
          const bool core = partial >= -quarter && partial <= 0;
          if (core) ++cert.core_prefix_count;
          for (auto a : cert.inner.set) {
            // sum (s_i - n/2) w_i = a fixes the pivot coordinate uniquely
            const std::int64_t sp = a - partial + half;
            if (sp < 1 || sp > cert.effective_n) continue;
            s[pivot] = sp;
            cert.set.insert(s);
            if (core) ++cert.core_size;
          }
          s[pivot] = 1;
        }
        std::size_t j = free_axes.size();
        while (j > 0 && s[free_axes[j - 1]] == cert.effective_n) s[free_axes[--j]] = 1;
        if (j == 0) break;
        ++s[free_axes[j - 1]];
      }
    }
  }

  if (cert.set.cell_count() <= options.behrend.verify_cap) {
    cert.verification_run = true;
    cert.verified = is_x_free(cert.set, normalize(original));
  }
  return cert;
}

}  // namespace

LiftCertificate behrend_lift(const Pattern& p, std::int64_t n, const LiftOptions& options) {
  if (n < 1) throw PreconditionError("behrend_lift needs n >= 1");
  const Pattern canon = normalize(p);
  std::optional<LiftCertificate> best;
  for (const auto& pick : three_subsets(canon.size(), options.all_triples)) {
    LiftCertificate c = lift_one(canon, pick, n, options);
    if (!best) {
      best = std::move(c);
      continue;
    }
    const bool c_ok = c.verified || !c.verification_run;
    const bool b_ok = best->verified || !best->verification_run;
    if ((c_ok && !b_ok) || (c_ok == b_ok && c.set.size() > best->set.size())) best = std::move(c);
  }
  return *best;
}

std::vector<BehrendRow> lower_bound_table(const Pattern& p, const std::vector<std::int64_t>& ns, const LiftOptions& options) {
  const Pattern canon = normalize(p);
  std::vector<BehrendRow> rows;
  for (auto n : ns) {
    LiftCertificate c = behrend_lift(canon, n, options);
    BehrendRow row;
    row.n = n;
    row.effective_n = c.effective_n;
    row.set_size = c.set.size();
    row.verified = c.verified;
    const long double cells = std::pow(static_cast<long double>(n), canon.dim());
    row.density = static_cast<long double>(row.set_size) / cells;
    row.empirical_c = n > 1 ? -std::log(row.density) / std::sqrt(std::log(static_cast<long double>(n)))
                            : std::numeric_limits<long double>::quiet_NaN();
    row.record.pattern_id = pattern_hash(canon);
    row.record.n = n;
    row.record.d = canon.dim();
    row.record.lower = row.set_size;
    row.record.upper = c.set.cell_count();
    row.record.exact = false;
    row.record.provenance = Provenance::Behrend;
    row.record.witness = std::move(c.set);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string join(const std::vector<Rational>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + to_string(v[i]);
  return s;
}

std::string join(const Point& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

std::string certificate_text(const Behrend1DCertificate& c) {
  std::ostringstream os;
  os << "triple = " << to_string(c.a) << ' ' << to_string(c.b) << ' ' << to_string(c.c) << '\n'
     << "q = " << to_string(c.q) << '\n'
     << "n = " << c.n << '\n'
     << "N = " << c.N << '\n'
     << "M = " << c.M << '\n'
     << "base = " << c.base << '\n'
     << "radius_sq = " << c.radius_sq << '\n'
     << "shell_size = " << c.shell_size << '\n'
     << "set_size = " << c.set.size() << '\n'
     << "fallback = " << c.fallback << '\n'
     << "pigeonhole_ok = " << c.pigeonhole_ok << '\n'
     << "in_range = " << c.in_range << '\n'
     << "injectivity_checked = " << c.injectivity_checked << '\n'
     << "injective = " << c.injective << '\n'
     << "verification_run = " << c.verification_run << '\n'
     << "verified = " << c.verified << '\n';
  return os.str();
}

std::string certificate_text(const LiftCertificate& c) {
  std::ostringstream os;
  os << "pattern_id = " << pattern_hash(c.original) << '\n'
     << "triple = " << join(c.triple[0]) << " | " << join(c.triple[1]) << " | " << join(c.triple[2]) << '\n'
     << "requested_n = " << c.requested_n << '\n'
     << "effective_n = " << c.effective_n << '\n'
     << "one_dimensional = " << c.one_dimensional << '\n';
  if (!c.one_dimensional) {
    os << "x = " << join(c.reduction.x) << '\n'
       << "y = " << join(c.reduction.y) << '\n'
       << "weights = " << join(c.reduction.weights) << '\n'
       << "pivot = " << c.reduction.pivot << '\n'
       << "q = " << c.reduction.max_denominator << '\n'
       << "t = " << to_string(c.reduction.t) << '\n'
       << "core_prefix_count = " << c.core_prefix_count << '\n'
       << "core_size = " << c.core_size << '\n';
  }
  os << "fallback = " << c.fallback << '\n'
     << "set_size = " << c.set.size() << '\n'
     << "verification_run = " << c.verification_run << '\n'
     << "verified = " << c.verified << '\n'
     << "[inner]\n"
     << certificate_text(c.inner);
  return os.str();
}

std::string density_table_csv(const std::vector<BehrendRow>& rows) {
  std::ostringstream os;
  os << "n,effective_n,set_size,density,empirical_c,verified\n";
  for (const auto& r : rows)
    os << r.n << ',' << r.effective_n << ',' << r.set_size << ',' << format_real(r.density) << ','
       << format_real(r.empirical_c) << ',' << (r.verified ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace xfree
