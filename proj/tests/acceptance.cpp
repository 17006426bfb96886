// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "xfree/behrend.hpp"
#include "xfree/cli.hpp"
#include "xfree/container.hpp"
#include "xfree/copies.hpp"
#include "xfree/error.hpp"
#include "xfree/extremal.hpp"
#include "xfree/supersat.hpp"

using namespace xfree;
namespace mp = boost::multiprecision;

namespace {

struct Check {
  std::ostringstream notes;
  bool ok = true;
  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes << " [failed: " << what << "]";
    }
  }
};

oracle::Pts to_oracle(const Pattern& p) { return oracle::Pts(p.points().begin(), p.points().end()); }

const Pattern ap3 = arithmetic_progression(3);

void ac1(Check& c) {
  for (std::int64_t n = 1; n <= 12; ++n) {
    const auto r = solve_rx_exact(ap3, n);
    c.expect(r.exact && r.lower == static_cast<std::uint64_t>(oracle::exhaustive_r(to_oracle(ap3), n)),
             "AP3 n=" + std::to_string(n));
  }
  const Pattern c2 = corner(2);
  for (std::int64_t n = 1; n <= 4; ++n) {
    const auto r = solve_rx_exact(c2, n);
    c.expect(r.exact && r.lower == static_cast<std::uint64_t>(oracle::exhaustive_r(to_oracle(c2), n)),
             "corner n=" + std::to_string(n));
  }
  c.expect(solve_rx_exact(ap3, 8).lower == 4, "r(8)=4");
  c.expect(solve_rx_exact(ap3, 9).lower == 5, "r(9)=5");
  c.expect(solve_rx_exact(c2, 2).lower == 3, "r_corner(2)=3");
  c.notes << " AP3 n<=12, corner n<=4";
}

void ac2(Check& c) {
  for (std::int64_t n = 1; n <= 12; ++n)
    c.expect(count_xfree_subsets(ap3, n).count == oracle::exhaustive_count(to_oracle(ap3), n),
             "AP3 n=" + std::to_string(n));
  const Pattern c2 = corner(2);
  for (std::int64_t n = 1; n <= 3; ++n)
    c.expect(count_xfree_subsets(c2, n).count == oracle::exhaustive_count(to_oracle(c2), n),
             "corner n=" + std::to_string(n));
  c.expect(count_xfree_subsets(ap3, 3).count == 7, "count(3)=7");
  c.expect(count_xfree_subsets(ap3, 4).count == 13, "count(4)=13");
  c.expect(count_xfree_subsets(c2, 2).count == 14, "corner count(2)=14");
}

void ac3(Check& c) {
  long double worst = 0;
  for (std::int64_t n = 4; n <= 14; ++n) {
    const auto r = solve_rx_exact(ap3, n);
    c.expect(r.exact, "exact r n=" + std::to_string(n));
    const auto rec = count_xfree_subsets(ap3, n, {}, r.lower);
    c.expect(rec.ratio_to_r.has_value(), "ratio present");
    const long double ratio = std::log2(rec.count.convert_to<long double>()) / r.lower;
    c.expect(std::fabs(ratio - rec.ratio_to_r.value_or(-1)) < 1e-12L, "ratio consistent n=" + std::to_string(n));
    c.expect(ratio < 4, "ratio < 4 at n=" + std::to_string(n));
    worst = std::max(worst, ratio);
  }
  c.notes << " max log2(count)/r = " << std::setprecision(6) << static_cast<double>(worst);
}

void ac4(Check& c) {
  const std::vector<Pattern> battery = {ap3,
                                        Pattern::from_points(1, {{0}, {1}, {3}}),
                                        Pattern::from_points(1, {{0}, {2}, {3}}),
                                        corner(2),
                                        corner(3),
                                        arithmetic_progression(4)};
  for (const auto& p : battery) {
    for (std::int64_t n = 1; n <= 50; ++n)
      c.expect(count_copies_closed_form(p, n) == enumerate_copies(p, n).size(), p.to_text() + " n=" + std::to_string(n));
    const std::uint64_t k = p.size();
    for (std::int64_t n = 1; n <= 20; ++n) {
      const auto s = codegree_stats(p, n);
      c.expect(s.codegree[2] <= k * (k - 1), "co-degree bound n=" + std::to_string(n));
    }
  }
  c.notes << " 6 patterns, n<=50";
}

void ac5(Check& c) {
  const RationalTriple t(Rational(0), Rational(1), Rational(2));
  const auto small = behrend_1d(t, 100);
  c.expect(small.N == 3 && small.M == 2, "N=3, M=2 at n=100");
  c.expect(small.set.size() == 3 && small.verified, "size-3 verified set at n=100");
  c.expect(!oracle::has_scaled_triple(small.set, 0, 1, 2), "oracle freeness at n=100");
  for (std::int64_t n : {1'000, 10'000, 100'000}) {
    const auto b = behrend_1d(t, n);
    const std::string tag = " n=" + std::to_string(n);
    c.expect(b.verification_run && b.verified, "verified" + tag);
    c.expect(b.in_range, "in range" + tag);
    const long double cube = std::pow(static_cast<long double>(b.M), b.N);
    const long double bound = cube / (b.N * b.M * b.M - b.N + 1);
    c.expect(b.set.size() >= bound, "pigeonhole" + tag);
    if (cube <= 1e6) {
      c.expect(b.injectivity_checked && b.injective, "injective" + tag);
      c.expect(digit_map_injective(b.M, b.N, b.base), "independent injectivity" + tag);
    }
    c.notes << tag << ":" << b.set.size();
  }
}

void ac6(Check& c) {
  const Pattern c2 = corner(2);
  c.expect(compute_t(c2).t == Rational(1, 2), "t(corner) = 1/2");
  const auto cert = behrend_lift(c2, 40);
  c.expect(cert.verification_run && cert.verified, "library verification");
  const auto pts = cert.set.points();
  c.expect(oracle::brute_gamma(oracle::Pts(pts.begin(), pts.end()), to_oracle(c2)) == 0, "oracle enumeration");
  c.expect(cert.core_size == cert.core_prefix_count * cert.inner.set.size(), "core size = prefixes x |S'|");
  std::uint64_t diagonal_points = 0;
  for (const auto& a : cert.inner.set)
    for (const auto& q : pts)
      if (q[1] - q[0] == a) ++diagonal_points;
  c.expect(diagonal_points == cert.set.size(), "set is a union of diagonals over S'");
  c.notes << " |S|=" << cert.set.size() << " core=" << cert.core_prefix_count << "x" << cert.inner.set.size();
}

void ac7(Check& c) {
  std::mt19937_64 rng(2024);
  for (std::int64_t n = 1; n <= 12; ++n) {
    const auto r = solve_rx_exact(ap3, n);
    c.expect(check_supersat_trivial(GridSet::full(n, 1), ap3, r).holds, "full grid n=" + std::to_string(n));
  }
  const auto r12 = solve_rx_exact(ap3, 12);
  for (int i = 0; i < 200; ++i) {
    const GridSet a = GridSet::from_mask(12, rng() & 0xfff);
    const auto res = check_supersat_trivial(a, ap3, r12);
    const auto pts = a.points();
    c.expect(res.holds, "random subset");
    c.expect(res.gamma == oracle::brute_gamma(oracle::Pts(pts.begin(), pts.end()), to_oracle(ap3)), "gamma oracle");
  }

  const GridSet full30 = GridSet::full(30, 1);
  const auto r30 = solve_rx_exact(ap3, 30);
  const auto e = exact_expected_gamma(full30, ap3, 3, r30);
  c.expect(e.mean_gamma == 1, "E[Gamma] = 1 on n=30, M=3");
  const auto mc30 = estimate_expected_gamma(full30, ap3, 3, 10'000, 1, r30);
  c.expect(std::fabs(mc30.mean - 1) <= 3 * mc30.stderr_mean, "Monte Carlo n=30");

  int audited = 1;
  bool audits_ok = e.size_ok;
  for (const auto& pa : e.per_prime) audits_ok = audits_ok && pa.inner_ok;
  const auto r50 = solve_rx_exact(ap3, 50);
  for (int t = 0; t < 4; ++t) {
    GridSet a(50, 1);
    for (std::uint64_t i = 0; i < 50; ++i)
      if (rng() % 5 != 0) a.set(i);
    for (std::int64_t M : {2, 3, 4}) {
      try {
        subgrid_setup(a, ap3, M, r50);
      } catch (const PreconditionError&) {
        continue;
      }
      const auto ex = exact_expected_gamma(a, ap3, M, r50);
      const auto mc = estimate_expected_gamma(a, ap3, M, 10'000, 100 + t, r50);
      const long double want = ex.mean_gamma.convert_to<long double>();
      c.expect(std::fabs(mc.mean - want) <= 3 * mc.stderr_mean + 1e-12L, "Monte Carlo on random A in [50]");
      audits_ok = audits_ok && ex.size_ok;
      for (const auto& pa : ex.per_prime) audits_ok = audits_ok && pa.inner_ok;
      ++audited;
    }
  }
  c.expect(audits_ok, "E|A_b| and |A cap I_p| audits");
  c.expect(audited > 1, "random admissible instances found");
  c.notes << " " << audited << " admissible instances audited";
}

void ac8(Check& c) {
  const auto low = verify_pnt_constant(2, 10);
  c.expect(!low.holds && low.first_violation == 2, "violation at l=2");
  c.expect(verify_pnt_constant(3, 1'000'000).holds, "holds on [3, 10^6]");
}

void ac9(Check& c) {
  HypergraphSummary toy;
  toy.n = 3;
  toy.d = 1;
  toy.k = 3;
  toy.edge_count = 1;
  toy.vertex_count = 3;
  toy.avg_degree = 1;
  toy.codegree = {0, 0, 1, 1};
  c.expect(delta_tau(toy, Real(1) / 2) == 16, "toy = 16");

  long double worst = 0;
  int points = 0;
  for (std::int64_t n : {50, 500, 5'000, 50'000, 500'000})
    for (long double frac : {1.0L, 0.25L})
      for (long double g : {0.375L, 1.0L}) {
        RProvider pr(ap3);
        pr.set_override(n, static_cast<std::uint64_t>(n * frac));
        auto params = epsilon_tau_schedule(ap3, n, pr, Real(g));
        check_container_hypotheses(params);
        const Real ratio = bounded_delta(params) * 12 * 6 / params.epsilon;
        const long double dev = std::fabs(static_cast<long double>(ratio) - 1);
        worst = std::max(worst, dev);
        c.expect(dev < 1e-9L && params.hyp_delta, "bounded equality");
        ++points;
      }
  c.expect(points == 20, "20-point sweep");

  const Real gamma = estimate_gamma_const(ap3, 3, 30).gamma;
  for (std::int64_t n = 3; n <= 30; ++n) {
    RProvider pr(ap3);
    pr.add_record(solve_rx_exact(ap3, n));
    auto exact = epsilon_tau_schedule(ap3, n, pr, gamma);
    auto bounded = exact;
    check_container_hypotheses(exact, codegree_stats(ap3, n));
    check_container_hypotheses(bounded);
    c.expect(exact.delta_value <= bounded.delta_value, "exact <= bounded n=" + std::to_string(n));
  }
  c.notes << " max |ratio-1| = " << std::scientific << std::setprecision(2) << static_cast<double>(worst);
}

void ac10(Check& c) {
  RProvider table(ap3);
  std::vector<std::int64_t> r(21);
  for (std::int64_t n = 1; n <= 20; ++n) {
    const auto rec = solve_rx_exact(ap3, n);
    table.add_record(rec);
    r[n] = static_cast<std::int64_t>(rec.lower);
  }
  auto half = [](std::int64_t n) { return (n + 1) / 2; };
  const auto rep = filter_sequence(table, half, Rational(1, 2), 1, 1, 20);
  std::vector<std::int64_t> expected;
  for (std::int64_t n = 1; n <= 20; ++n) {
    const std::int64_t m = (n + 1) / 2;
    // r(n)/n >= (1/2) r(m)/m  <=>  2 r(n) m >= r(m) n
    if (2 * r[n] * m >= r[m] * n) expected.push_back(n);
  }
  c.expect(rep.accepted() == expected, "matches recomputation");

  RProvider constant(ap3);
  constant.set_override([](std::int64_t n) { return std::optional<std::uint64_t>(n); });
  c.expect(filter_sequence(constant, half, Rational(1, 2), 1, 1, 20).accepted().size() == 20, "constant density");
  c.expect(filter_sequence(table, half, Rational(0), 1, 1, 20).accepted().size() == 20, "alpha = 0");
  c.notes << " accepted " << expected.size() << "/20";
}

void ac11(Check& c) {
  const auto dir = std::filesystem::temp_directory_path() / ("xfree_acceptance_" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  const std::string pat = (dir / "ap3.pattern").string();
  std::ofstream(pat) << ap3.to_text();
  const std::vector<std::string> args = {"supersat-sample", "--pattern", pat,  "--n",    "30",  "--m",
                                         "3", "--samples", "1000", "--seed", "42", "--cache", (dir / "cache").string()};
  std::ostringstream o1, o2, e1, e2;
  const int s1 = run_cli(args, o1, e1), s2 = run_cli(args, o2, e2);
  c.expect(s1 == 0 && s2 == 0, "supersat-sample exit");
  c.expect(!o1.str().empty() && o1.str() == o2.str(), "byte-identical CSV");
  std::filesystem::remove_all(dir);

  const std::vector<std::pair<Pattern, std::int64_t>> cases = {{ap3, 30}, {corner(2), 5}, {arithmetic_progression(4), 24}};
  for (const auto& [p, nmax] : cases)
    for (std::int64_t n = 1; n <= nmax; ++n) {
      std::vector<RNumberRecord> recs;
      for (int w : {1, 2, 8}) {
        SolverOptions so;
        so.workers = w;
        recs.push_back(solve_rx_exact(p, n, so));
      }
      for (const auto& r : recs)
        c.expect(r.exact && r.lower == recs[0].lower && r.upper == recs[0].upper,
                 "workers agree n=" + std::to_string(n));
    }
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    const char* title;
    double limit_s;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> all = {
      {"AC1", "exact extremal values", 60, ac1},
      {"AC2", "exact counting", 60, ac2},
      {"AC3", "counting shape ratio", 120, ac3},
      {"AC4", "copy engine equivalence", 60, ac4},
      {"AC5", "Behrend 1-D", 120, ac5},
      {"AC6", "Behrend lift", 60, ac6},
      {"AC7", "supersaturation audits", 120, ac7},
      {"AC8", "prime counting constant", 10, ac8},
      {"AC9", "container arithmetic", 30, ac9},
      {"AC10", "sequence filter", 5, ac10},
      {"AC11", "reproducibility", 60, ac11},
  };
  int failed = 0;
  for (const auto& crit : all) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
      crit.run(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.notes << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > crit.limit_s) {
      c.ok = false;
      c.notes << " [over time limit " << crit.limit_s << "s]";
    }
    failed += !c.ok;
    std::cout << crit.name << ' ' << (c.ok ? "PASS" : "FAIL") << "  " << crit.title << " (" << std::fixed
              << std::setprecision(2) << secs << "s)" << c.notes.str() << std::endl;
  }
  std::cout << (failed ? "acceptance: FAILED " + std::to_string(failed) : std::string("acceptance: all passed")) << '\n';
  return failed ? 1 : 0;
}
