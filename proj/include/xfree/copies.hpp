#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "xfree/grid_set.hpp"
#include "xfree/pattern.hpp"

namespace xfree {

// One non-trivial copy b + r*X of a primitive pattern.
struct CopyPlacement {
  Point base;
  std::int64_t ratio = 0;

  friend bool operator==(const CopyPlacement&, const CopyPlacement&) = default;
};

// Calls visit for every copy of p inside [n]^d, ordered by ratio and then
// lexicographically by base. Returning false from visit stops the walk.
void for_each_copy(const Pattern& p, std::int64_t n, const std::function<bool(const CopyPlacement&)>& visit);

// Same walk, but hands over the grid indices of the k points (in pattern order).
void for_each_copy_indices(const Pattern& p, std::int64_t n,
                           const std::function<bool(std::span<const std::uint64_t>)>& visit);

std::vector<CopyPlacement> enumerate_copies(const Pattern& p, std::int64_t n);

// sum_{r>=1} prod_i max(0, n - r w_i)
std::uint64_t count_copies_closed_form(const Pattern& p, std::int64_t n);

std::vector<Point> copy_points(const Pattern& p, const CopyPlacement& c);

enum class GammaStrategy {
  Automatic,
  PlacementScan,  // every placement, k membership tests each
  AnchorWalk,     // each member of A as the image of the first pattern point, all ratios
  AnchorPairs,    // each ordered pair of members as images of the first two pattern points
};

// Number of copies of p fully inside A. Stops once `stop_at` copies are found
// (0 = count all).
std::uint64_t gamma_count(const GridSet& a, const Pattern& p, std::uint64_t stop_at = 0,
                          GammaStrategy strategy = GammaStrategy::Automatic);

bool is_x_free(const GridSet& a, const Pattern& p);

struct HypergraphSummary {
  std::int64_t n = 0;
  int d = 0;
  int k = 0;
  std::uint64_t edge_count = 0;
  std::uint64_t vertex_count = 0;
  long double avg_degree = 0;       // k |E| / n^d
  std::vector<std::uint64_t> codegree;  // codegree[j] = Delta_j for j = 2..k
  long double gamma_estimate = 0;   // avg_degree / n
};

struct EnumerationCaps {
  std::uint64_t max_vertices = 1'000'000;
  std::uint64_t max_edges = 2'000'000;
};

HypergraphSummary codegree_stats(const Pattern& p, std::int64_t n, const EnumerationCaps& caps = {});

// The copies hypergraph on [n]^d in CSR form; edge e occupies
// vertices[e*k .. e*k+k) in pattern order.
struct CopiesHypergraph {
  std::uint32_t vertex_count = 0;
  int k = 0;
  std::vector<std::uint32_t> vertices;
  std::vector<std::uint32_t> incidence_offset;  // size vertex_count + 1
  std::vector<std::uint32_t> incidence;         // edge ids touching each vertex

  std::size_t edge_count() const noexcept { return k ? vertices.size() / k : 0; }
  std::span<const std::uint32_t> edge(std::size_t e) const { return {vertices.data() + e * k, static_cast<std::size_t>(k)}; }
  std::span<const std::uint32_t> edges_at(std::uint32_t v) const {
    return {incidence.data() + incidence_offset[v], incidence_offset[v + 1] - incidence_offset[v]};
  }
};

CopiesHypergraph build_copies_hypergraph(const Pattern& p, std::int64_t n, const EnumerationCaps& caps = {});

}  // namespace xfree
