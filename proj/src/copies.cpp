#include "xfree/copies.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <unordered_map>

#include "xfree/error.hpp"

namespace xfree {

namespace {

void require_primitive(const Pattern& p) {
  if (!p.primitive()) throw PreconditionError("pattern must be in primitive form (normalize it first)");
}

// Grid-index offset of each pattern point relative to the base point.
std::vector<std::uint64_t> point_offsets(const Pattern& p, std::int64_t n) {
  std::vector<std::uint64_t> off;
  off.reserve(p.size());
  for (const auto& x : p.points()) {
    std::uint64_t o = 0;
    for (int i = p.dim() - 1; i >= 0; --i) o = o * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(x[i]);
    off.push_back(o);
  }
  return off;
}

template <class Visit>
void walk(const Pattern& p, std::int64_t n, Visit&& visit) {
  require_primitive(p);
  const int d = p.dim();
  const auto& w = p.widths();
  const auto off = point_offsets(p, n);
  std::vector<std::uint64_t> stride(d, 1);
  for (int i = 1; i < d; ++i) stride[i] = stride[i - 1] * static_cast<std::uint64_t>(n);

  std::vector<std::int64_t> extent(d);
  Point b(d);
  for (std::int64_t r = 1;; ++r) {
    for (int i = 0; i < d; ++i) extent[i] = n - r * w[i];
    if (std::any_of(extent.begin(), extent.end(), [](std::int64_t e) { return e <= 0; })) return;
    std::fill(b.begin(), b.end(), 1);
    for (;;) {
      std::uint64_t base = 0;
      for (int i = 0; i < d; ++i) base += static_cast<std::uint64_t>(b[i] - 1) * stride[i];
      if (!visit(b, r, base, off)) return;
      // odometer, last coordinate fastest
      int i = d - 1;
      while (i >= 0 && b[i] == extent[i]) b[i--] = 1;
      if (i < 0) break;
      ++b[i];
    }
  }
}

}  // namespace

void for_each_copy(const Pattern& p, std::int64_t n, const std::function<bool(const CopyPlacement&)>& visit) {
  CopyPlacement c;
  walk(p, n, [&](const Point& b, std::int64_t r, std::uint64_t, const std::vector<std::uint64_t>&) {
    c.base = b;
    c.ratio = r;
    return visit(c);
  });
}

void for_each_copy_indices(const Pattern& p, std::int64_t n,
                           const std::function<bool(std::span<const std::uint64_t>)>& visit) {
  std::vector<std::uint64_t> idx(p.size());
  walk(p, n, [&](const Point&, std::int64_t r, std::uint64_t base, const std::vector<std::uint64_t>& off) {
    for (std::size_t j = 0; j < off.size(); ++j) idx[j] = base + static_cast<std::uint64_t>(r) * off[j];
    return visit(idx);
  });
}

std::vector<CopyPlacement> enumerate_copies(const Pattern& p, std::int64_t n) {
  std::vector<CopyPlacement> out;
  for_each_copy(p, n, [&](const CopyPlacement& c) {
    out.push_back(c);
    return true;
  });
  return out;
}

std::uint64_t count_copies_closed_form(const Pattern& p, std::int64_t n) {
  require_primitive(p);
  unsigned __int128 total = 0;
  for (std::int64_t r = 1;; ++r) {
    unsigned __int128 term = 1;
    for (auto wi : p.widths()) {
      const std::int64_t e = n - r * wi;
      if (e <= 0) {
        term = 0;
        break;
      }
      term *= static_cast<unsigned __int128>(e);
    }
    if (term == 0) break;
    total += term;
    if (total > static_cast<unsigned __int128>(UINT64_MAX)) throw BudgetError("copy count overflows 64 bits");
  }
  return static_cast<std::uint64_t>(total);
}

std::vector<Point> copy_points(const Pattern& p, const CopyPlacement& c) {
  std::vector<Point> out;
  for (const auto& x : p.points()) {
    Point y(p.dim());
    for (int i = 0; i < p.dim(); ++i) y[i] = c.base[i] + c.ratio * x[i];
    out.push_back(std::move(y));
  }
  return out;
}

namespace {

std::uint64_t gamma_scan(const GridSet& a, const Pattern& p, std::uint64_t stop_at) {
  std::uint64_t count = 0;
  walk(p, a.side(), [&](const Point&, std::int64_t r, std::uint64_t base, const std::vector<std::uint64_t>& off) {
    for (auto o : off)
      if (!a.test(base + static_cast<std::uint64_t>(r) * o)) return true;
    ++count;
    return stop_at == 0 || count < stop_at;
  });
  return count;
}

std::uint64_t gamma_anchored(const GridSet& a, const Pattern& p, std::uint64_t stop_at) {
  require_primitive(p);
  const int d = p.dim();
  const std::int64_t n = a.side();
  const Point& x0 = p[0];
  const auto& w = p.widths();
  const auto off = point_offsets(p, n);
  std::uint64_t base_off = off[0];

  std::uint64_t count = 0;
  for (auto anchor : a.indices()) {
    const Point y = a.point(anchor);
    // valid ratios form [1, rmax]: b_i = y_i - r x0_i >= 1 and b_i + r w_i <= n
    std::int64_t rmax = n;
    for (int i = 0; i < d; ++i) {
      if (x0[i] > 0) rmax = std::min(rmax, (y[i] - 1) / x0[i]);
      if (w[i] > x0[i]) rmax = std::min(rmax, (n - y[i]) / (w[i] - x0[i]));
    }
    for (std::int64_t r = 1; r <= rmax; ++r) {
      const std::uint64_t base = anchor - static_cast<std::uint64_t>(r) * base_off;
      bool all = true;
      for (std::size_t j = 1; j < off.size() && all; ++j) all = a.test(base + static_cast<std::uint64_t>(r) * off[j]);
      if (all && ++count == stop_at) return count;
    }
  }
  return count;
}

std::uint64_t gamma_pairs(const GridSet& a, const Pattern& p, std::uint64_t stop_at) {
  const int d = p.dim();
  Point step(d);
  int lead = -1;
  for (int i = 0; i < d; ++i) {
    step[i] = p[1][i] - p[0][i];
    if (lead < 0 && step[i] != 0) lead = i;
  }
  const auto members = a.points();
  std::uint64_t count = 0;
  Point y(d);
  for (const auto& u : members) {
    for (const auto& v : members) {
      const std::int64_t delta = v[lead] - u[lead];
      if (delta % step[lead] != 0) continue;
      const std::int64_t r = delta / step[lead];
      if (r < 1) continue;
      bool ok = true;
      for (int i = 0; i < d && ok; ++i) ok = v[i] - u[i] == r * step[i];
      if (!ok) continue;
      for (std::size_t j = 2; j < p.size() && ok; ++j) {
        for (int i = 0; i < d; ++i) y[i] = u[i] + r * (p[j][i] - p[0][i]);
        ok = a.contains(y);
      }
      if (ok && ++count == stop_at) return count;
    }
  }
  return count;
}

}  // namespace

std::uint64_t gamma_count(const GridSet& a, const Pattern& p, std::uint64_t stop_at, GammaStrategy strategy) {
  require_primitive(p);
  if (p.dim() != a.dim()) throw PreconditionError("pattern and set dimensions differ");
  if (a.size() < p.size()) return 0;
  if (strategy == GammaStrategy::Automatic) {
    const long double members = static_cast<long double>(a.size());
    const long double scan = static_cast<long double>(count_copies_closed_form(p, a.side()));
    const long double walk_cost = members * static_cast<long double>(a.side()) / static_cast<long double>(p.max_width());
    const long double pairs = 4 * members * members;
    strategy = GammaStrategy::PlacementScan;
    long double best = scan;
    if (walk_cost < best) {
      strategy = GammaStrategy::AnchorWalk;
      best = walk_cost;
    }
    if (pairs < best) strategy = GammaStrategy::AnchorPairs;
  }
  switch (strategy) {
    case GammaStrategy::AnchorWalk: return gamma_anchored(a, p, stop_at);
    case GammaStrategy::AnchorPairs: return gamma_pairs(a, p, stop_at);
    default: return gamma_scan(a, p, stop_at);
  }
}

bool is_x_free(const GridSet& a, const Pattern& p) { return gamma_count(a, p, 1) == 0; }

namespace {

struct SubsetKey {
  std::array<std::uint64_t, 8> v{};
  bool operator==(const SubsetKey&) const = default;
};

struct SubsetKeyHash {
  std::size_t operator()(const SubsetKey& k) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto x : k.v) {
      h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

void check_caps(const Pattern& p, std::int64_t n, const EnumerationCaps& caps) {
  const std::uint64_t vertices = checked_power(n, p.dim());
  if (vertices > caps.max_vertices)
    throw BudgetError("n^d = " + std::to_string(vertices) + " exceeds vertex cap " + std::to_string(caps.max_vertices));
  const std::uint64_t edges = count_copies_closed_form(p, n);
  if (edges > caps.max_edges)
    throw BudgetError("|E| = " + std::to_string(edges) + " exceeds edge cap " + std::to_string(caps.max_edges));
}

}  // namespace

HypergraphSummary codegree_stats(const Pattern& p, std::int64_t n, const EnumerationCaps& caps) {
  require_primitive(p);
  if (p.size() > 8) throw PreconditionError("co-degree statistics support |X| <= 8");
  check_caps(p, n, caps);

  const int k = static_cast<int>(p.size());
  HypergraphSummary s;
  s.n = n;
  s.d = p.dim();
  s.k = k;
  s.vertex_count = checked_power(n, p.dim());
  s.codegree.assign(k + 1, 0);

  std::vector<std::unordered_map<SubsetKey, std::uint32_t, SubsetKeyHash>> counts(k + 1);
  std::vector<std::uint64_t> sorted(k);
  for_each_copy_indices(p, n, [&](std::span<const std::uint64_t> idx) {
    ++s.edge_count;
    std::copy(idx.begin(), idx.end(), sorted.begin());
    std::sort(sorted.begin(), sorted.end());
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
      const int j = std::popcount(mask);
      if (j < 2) continue;
      SubsetKey key;
      int t = 0;
      for (int i = 0; i < k; ++i)
        if (mask >> i & 1u) key.v[t++] = sorted[i];
      auto& c = ++counts[j][key];
      s.codegree[j] = std::max<std::uint64_t>(s.codegree[j], c);
    }
    return true;
  });

  if (s.vertex_count > 0) {
    s.avg_degree = static_cast<long double>(k) * static_cast<long double>(s.edge_count) / static_cast<long double>(s.vertex_count);
    s.gamma_estimate = s.avg_degree / static_cast<long double>(n);
  }
  return s;
}

CopiesHypergraph build_copies_hypergraph(const Pattern& p, std::int64_t n, const EnumerationCaps& caps) {
  require_primitive(p);
  check_caps(p, n, caps);
  CopiesHypergraph h;
  h.vertex_count = static_cast<std::uint32_t>(checked_power(n, p.dim()));
  h.k = static_cast<int>(p.size());
  for_each_copy_indices(p, n, [&](std::span<const std::uint64_t> idx) {
    for (auto v : idx) h.vertices.push_back(static_cast<std::uint32_t>(v));
    return true;
  });
  h.incidence_offset.assign(h.vertex_count + 1, 0);
  for (auto v : h.vertices) ++h.incidence_offset[v + 1];
  for (std::uint32_t v = 0; v < h.vertex_count; ++v) h.incidence_offset[v + 1] += h.incidence_offset[v];
  h.incidence.resize(h.vertices.size());
  std::vector<std::uint32_t> fill(h.incidence_offset.begin(), h.incidence_offset.end() - 1);
  for (std::size_t e = 0; e < h.edge_count(); ++e)
    for (auto v : h.edge(e)) h.incidence[fill[v]++] = static_cast<std::uint32_t>(e);
  return h;
}

}  // namespace xfree
