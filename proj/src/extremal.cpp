#include "xfree/extremal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include "xfree/error.hpp"
#include "xfree/rng.hpp"

namespace xfree {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Exhaustive: return "exhaustive";
    case Provenance::BranchAndBound: return "branch-and-bound";
    case Provenance::Greedy: return "greedy";
    case Provenance::Behrend: return "behrend";
    case Provenance::User: return "user";
  }
  return "user";
}

Provenance parse_provenance(const std::string& s) {
  if (s == "exhaustive") return Provenance::Exhaustive;
  if (s == "branch-and-bound") return Provenance::BranchAndBound;
  if (s == "greedy") return Provenance::Greedy;
  if (s == "behrend") return Provenance::Behrend;
  if (s == "user") return Provenance::User;
  throw PreconditionError("unknown provenance '" + s + "'");
}

namespace {

GridSet to_grid_set(const std::vector<std::uint8_t>& in, std::int64_t n, int d) {
  GridSet s(n, d);
  for (std::uint64_t v = 0; v < in.size(); ++v)
    if (in[v]) s.set(v);
  return s;
}

std::vector<std::uint8_t> greedy_fill(const CopiesHypergraph& h, std::uint64_t seed) {
  const CounterRng rng(seed);
  std::vector<std::uint32_t> order(h.vertex_count);
  std::iota(order.begin(), order.end(), 0u);
  for (std::uint32_t i = h.vertex_count; i > 1; --i) std::swap(order[i - 1], order[rng.uniform(i, 0, i)]);

  std::vector<std::uint8_t> in(h.vertex_count, 0);
  for (auto v : order) {
    bool completes = false;
    for (auto e : h.edges_at(v)) {
      bool others = true;
      for (auto u : h.edge(e))
        if (u != v && !in[u]) {
          others = false;
          break;
        }
      if (others) {
        completes = true;
        break;
      }
    }
    if (!completes) in[v] = 1;
  }
  return in;
}

struct Incumbent {
  std::atomic<std::uint64_t> best{0};
  std::mutex mutex;
  std::vector<std::uint8_t> witness;

  void offer(std::uint64_t size, const std::vector<std::uint8_t>& set) {
    std::lock_guard lock(mutex);
    if (size > best.load()) {
      best.store(size);
      witness = set;
    }
  }
};

// Search state: S (in_set) shrinks by removals, fixed vertices may not be removed.
// An edge is violated while all its vertices are in S.
class Search {
 public:
  Search(const CopiesHypergraph& h, Incumbent& inc, std::atomic<std::uint64_t>& nodes, std::uint64_t budget)
      : h_(h), inc_(inc), nodes_(nodes), budget_(budget) {
    const std::size_t m = h.edge_count();
    in_.assign(h.vertex_count, 1);
    fixed_.assign(h.vertex_count, 0);
    size_ = h.vertex_count;
    count_in_.assign(m, static_cast<std::uint8_t>(h.k));
    removable_.assign(m, static_cast<std::uint8_t>(h.k));
    pos_.resize(m);
    viol_.resize(m);
    std::iota(viol_.begin(), viol_.end(), 0u);
    std::iota(pos_.begin(), pos_.end(), 0);
    stamp_.assign(h.vertex_count, 0);
  }

  void remove(std::uint32_t v) {
    in_[v] = 0;
    --size_;
    for (auto e : h_.edges_at(v)) {
      if (count_in_[e] == h_.k) drop_violated(e);
      --count_in_[e];
    }
  }
  void restore(std::uint32_t v) {
    in_[v] = 1;
    ++size_;
    for (auto e : h_.edges_at(v))
      if (++count_in_[e] == h_.k) push_violated(e);
  }
  void fix(std::uint32_t v) {
    fixed_[v] = 1;
    for (auto e : h_.edges_at(v)) --removable_[e];
  }
  void unfix(std::uint32_t v) {
    fixed_[v] = 0;
    for (auto e : h_.edges_at(v)) ++removable_[e];
  }

  bool aborted() const { return aborted_; }

  // Upper bound on the best completion; nullopt if some violated edge has no
  // removable vertex left.
  std::optional<std::uint64_t> bound() {
    ++epoch_;
    std::uint64_t packing = 0;
    for (auto e : viol_) {
      if (removable_[e] == 0) return std::nullopt;
      bool disjoint = true;
      for (auto u : h_.edge(e))
        if (!fixed_[u] && stamp_[u] == epoch_) {
          disjoint = false;
          break;
        }
      if (!disjoint) continue;
      ++packing;
      for (auto u : h_.edge(e))
        if (!fixed_[u]) stamp_[u] = epoch_;
    }
    return size_ - packing;
  }

  // Branching edge: fewest removable vertices, ties by edge id (stream order).
  std::uint32_t pick() const {
    std::uint32_t best = viol_.front();
    for (auto e : viol_)
      if (removable_[e] < removable_[best] || (removable_[e] == removable_[best] && e < best)) best = e;
    return best;
  }

  void dfs() {
    if (nodes_.fetch_add(1, std::memory_order_relaxed) >= budget_) {
      aborted_ = true;
      return;
    }
    if (viol_.empty()) {
      if (size_ > inc_.best.load()) inc_.offer(size_, in_);
      return;
    }
    auto ub = bound();
    if (!ub || *ub <= inc_.best.load()) return;

    const std::uint32_t e = pick();
    std::vector<std::uint32_t> branch;
    for (auto u : h_.edge(e))
      if (!fixed_[u]) branch.push_back(u);
    std::size_t fixed_count = 0;
    for (auto v : branch) {
      remove(v);
      dfs();
      restore(v);
      if (aborted_) break;
      fix(v);
      ++fixed_count;
    }
    for (std::size_t i = 0; i < fixed_count; ++i) unfix(branch[i]);
  }

  // Collects the subproblems `depth` levels below the current node.
  struct Subproblem {
    std::vector<std::uint32_t> removed;
    std::vector<std::uint32_t> fixed;
  };
  void expand(int depth, std::vector<std::uint32_t>& removed, std::vector<std::uint32_t>& fixed,
              std::vector<Subproblem>& out) {
    if (viol_.empty()) {
      if (size_ > inc_.best.load()) inc_.offer(size_, in_);
      return;
    }
    auto ub = bound();
    if (!ub || *ub <= inc_.best.load()) return;
    if (depth == 0) {
      out.push_back({removed, fixed});
      return;
    }
    const std::uint32_t e = pick();
    std::vector<std::uint32_t> branch;
    for (auto u : h_.edge(e))
      if (!fixed_[u]) branch.push_back(u);
    std::size_t fixed_count = 0;
    for (auto v : branch) {
      remove(v);
      removed.push_back(v);
      expand(depth - 1, removed, fixed, out);
      removed.pop_back();
      restore(v);
      fix(v);
      fixed.push_back(v);
      ++fixed_count;
    }
    for (std::size_t i = 0; i < fixed_count; ++i) {
      unfix(branch[i]);
      fixed.pop_back();
    }
  }

 private:
  void drop_violated(std::uint32_t e) {
    const std::int32_t p = pos_[e];
    const std::uint32_t last = viol_.back();
    viol_[p] = last;
    pos_[last] = p;
    viol_.pop_back();
    pos_[e] = -1;
  }
  void push_violated(std::uint32_t e) {
    pos_[e] = static_cast<std::int32_t>(viol_.size());
    viol_.push_back(e);
  }

  const CopiesHypergraph& h_;
  Incumbent& inc_;
  std::atomic<std::uint64_t>& nodes_;
  std::uint64_t budget_;
  bool aborted_ = false;

  std::vector<std::uint8_t> in_, fixed_;
  std::uint64_t size_ = 0;
  std::vector<std::uint8_t> count_in_, removable_;
  std::vector<std::int32_t> pos_;
  std::vector<std::uint32_t> viol_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
};

}  // namespace

RNumberRecord solve_rx_exact(const Pattern& p, std::int64_t n, const SolverOptions& options) {
  if (!p.primitive()) throw PreconditionError("solve_rx_exact needs a primitive pattern");
  if (p.size() > 255) throw PreconditionError("pattern too large");
  const CopiesHypergraph h = build_copies_hypergraph(p, n, options.caps);

  Incumbent inc;
  {
    auto seed_set = greedy_fill(h, 0);
    inc.offer(static_cast<std::uint64_t>(std::count(seed_set.begin(), seed_set.end(), 1)), seed_set);
    if (h.vertex_count == 0) inc.witness.clear();
  }
  std::atomic<std::uint64_t> nodes{0};
  bool aborted = false;

  Search root(h, inc, nodes, options.node_budget);
  std::uint64_t root_bound = h.vertex_count;
  if (auto ub = root.bound()) root_bound = *ub;

  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    root.dfs();
    aborted = root.aborted();
  } else {
    std::vector<Search::Subproblem> frontier;
    for (int depth = 1; depth <= 12; ++depth) {
      frontier.clear();
      std::vector<std::uint32_t> removed, fixed;
      root.expand(depth, removed, fixed, frontier);
      if (frontier.size() >= static_cast<std::size_t>(4 * workers)) break;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> any_aborted{false};
    auto work = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= frontier.size()) return;
        Search s(h, inc, nodes, options.node_budget);
        for (auto v : frontier[i].fixed) s.fix(v);
        for (auto v : frontier[i].removed) s.remove(v);
        s.dfs();
        if (s.aborted()) any_aborted = true;
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    aborted = any_aborted;
  }

  RNumberRecord rec;
  rec.pattern_id = pattern_hash(p);
  rec.n = n;
  rec.d = p.dim();
  rec.lower = inc.best.load();
  rec.exact = !aborted;
  rec.upper = aborted ? std::max(root_bound, rec.lower) : rec.lower;
  rec.provenance = Provenance::BranchAndBound;
  rec.witness = to_grid_set(inc.witness.empty() ? std::vector<std::uint8_t>(h.vertex_count, 0) : inc.witness, n, p.dim());
  return rec;
}

RNumberRecord greedy_lower_bound(const Pattern& p, std::int64_t n, std::uint64_t seed, const EnumerationCaps& caps) {
  if (!p.primitive()) throw PreconditionError("greedy_lower_bound needs a primitive pattern");
  const CopiesHypergraph h = build_copies_hypergraph(p, n, caps);
  auto in = greedy_fill(h, seed);
  RNumberRecord rec;
  rec.pattern_id = pattern_hash(p);
  rec.n = n;
  rec.d = p.dim();
  rec.witness = to_grid_set(in, n, p.dim());
  rec.lower = rec.witness->size();
  rec.upper = h.vertex_count;
  rec.exact = rec.lower == rec.upper;
  rec.provenance = Provenance::Greedy;
  return rec;
}

namespace {

class IndependentSetCounter {
 public:
  IndependentSetCounter(const CopiesHypergraph& h, std::uint64_t budget) : h_(h), budget_(budget) {
    dead_.assign(h.edge_count(), 0);
    in_.assign(h.vertex_count, 0);
    by_max_.resize(h.vertex_count);
    for (std::size_t e = 0; e < h.edge_count(); ++e) {
      auto ed = h.edge(e);
      by_max_[*std::max_element(ed.begin(), ed.end())].push_back(static_cast<std::uint32_t>(e));
    }
    alive_ = h.edge_count();
  }

  BigInt count(std::uint32_t v) {
    if (++nodes_ > budget_) throw BudgetError("count_xfree_subsets exceeded node budget " + std::to_string(budget_));
    // every edge whose maximum vertex is below v is decided, so no live edge
    // means the remaining vertices are unconstrained
    if (alive_ == 0) return BigInt(1) << (h_.vertex_count - v);

    BigInt total = 0;
    for (auto e : h_.edges_at(v))
      if (dead_[e]++ == 0) --alive_;
    total += count(v + 1);
    for (auto e : h_.edges_at(v))
      if (--dead_[e] == 0) ++alive_;

    bool completes = false;
    for (auto e : by_max_[v])
      if (dead_[e] == 0) {
        completes = true;
        break;
      }
    if (!completes) {
      in_[v] = 1;
      total += count(v + 1);
      in_[v] = 0;
    }
    return total;
  }

 private:
  const CopiesHypergraph& h_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::size_t alive_ = 0;
  std::vector<std::uint32_t> dead_;
  std::vector<std::uint8_t> in_;
  std::vector<std::vector<std::uint32_t>> by_max_;
};

}  // namespace

CountRecord count_xfree_subsets(const Pattern& p, std::int64_t n, const CountOptions& options,
                                std::optional<std::uint64_t> exact_r) {
  if (!p.primitive()) throw PreconditionError("count_xfree_subsets needs a primitive pattern");
  const std::uint64_t vertices = checked_power(n, p.dim());
  if (vertices > options.max_vertices)
    throw BudgetError("n^d = " + std::to_string(vertices) + " exceeds counting cap " + std::to_string(options.max_vertices));
  const CopiesHypergraph h = build_copies_hypergraph(p, n);
  IndependentSetCounter counter(h, options.node_budget);

  CountRecord rec;
  rec.pattern_id = pattern_hash(p);
  rec.n = n;
  rec.count = counter.count(0);
  rec.log2_count = std::log2(rec.count.convert_to<long double>());
  if (exact_r && *exact_r > 0) rec.ratio_to_r = rec.log2_count / static_cast<long double>(*exact_r);
  return rec;
}

bool verify_witness(const GridSet& a, const Pattern& p, std::uint64_t claimed) {
  return a.size() == claimed && is_x_free(a, normalize(p));
}

}  // namespace xfree
