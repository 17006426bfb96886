#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "xfree/copies.hpp"
#include "xfree/grid_set.hpp"
#include "xfree/numeric.hpp"
#include "xfree/pattern.hpp"

namespace xfree {

enum class Provenance { Exhaustive, BranchAndBound, Greedy, Behrend, User };

std::string to_string(Provenance p);
Provenance parse_provenance(const std::string& s);

// What is known about r_X(n).
struct RNumberRecord {
  std::string pattern_id;
  std::int64_t n = 0;
  int d = 1;
  std::uint64_t lower = 0;
  std::uint64_t upper = 0;
  bool exact = false;
  std::optional<GridSet> witness;
  Provenance provenance = Provenance::User;
};

struct SolverOptions {
  std::uint64_t node_budget = 200'000'000;
  int workers = 1;
  EnumerationCaps caps{};
};

// Maximum independent set of the copies hypergraph by branch and bound.
// On budget exhaustion the record carries the best bounds with exact = false.
RNumberRecord solve_rx_exact(const Pattern& p, std::int64_t n, const SolverOptions& options = {});

// Seeded random-order greedy insertion; always X-free.
RNumberRecord greedy_lower_bound(const Pattern& p, std::int64_t n, std::uint64_t seed,
                                 const EnumerationCaps& caps = {});

struct CountRecord {
  std::string pattern_id;
  std::int64_t n = 0;
  BigInt count;
  long double log2_count = 0;
  std::optional<long double> ratio_to_r;  // log2(count) / r_X(n) when r is exact
};

struct CountOptions {
  std::uint64_t max_vertices = 36;
  std::uint64_t node_budget = 4'000'000'000ULL;
};

// Number of X-free subsets of [n]^d, the empty set included.
CountRecord count_xfree_subsets(const Pattern& p, std::int64_t n, const CountOptions& options = {},
                                std::optional<std::uint64_t> exact_r = std::nullopt);

bool verify_witness(const GridSet& a, const Pattern& p, std::uint64_t claimed);

}  // namespace xfree
