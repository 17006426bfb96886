#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "xfree/container.hpp"
#include "xfree/copies.hpp"
#include "xfree/error.hpp"

using namespace xfree;
namespace mp = boost::multiprecision;

namespace {

HypergraphSummary single_edge() {
  HypergraphSummary s;
  s.k = 3;
  s.d = 1;
  s.n = 3;
  s.edge_count = 1;
  s.vertex_count = 3;
  s.avg_degree = 1;
  s.codegree = {0, 0, 1, 1};
  return s;
}

long double rel(const Real& a, const Real& b) { return static_cast<long double>(mp::abs(a - b) / mp::abs(b)); }

const Pattern ap3 = arithmetic_progression(3);

}  // namespace

TEST_CASE("delta on the single-edge toy") {
  CHECK(delta_tau(single_edge(), Real(1) / 2) == Real(16));
  CHECK(delta_tau(single_edge(), Real(1)) == Real(6));
}

TEST_CASE("delta is linear in the co-degrees and decreasing in tau") {
  auto s = single_edge();
  s.codegree = {0, 0, 5, 3};
  const Real base = delta_tau(s, Real(0.3));
  auto twice = s;
  for (auto& c : twice.codegree) c *= 2;
  CHECK(rel(delta_tau(twice, Real(0.3)), 2 * base) < 1e-30L);
  Real prev = delta_tau(s, Real(0.01));
  for (int i = 1; i <= 40; ++i) {
    const Real cur = delta_tau(s, Real(0.01) * mp::pow(Real(1.5), i));
    CHECK(cur < prev);
    CHECK(cur > 0);
    prev = cur;
  }
}

TEST_CASE("delta preconditions") {
  auto s = single_edge();
  CHECK_THROWS_AS(delta_tau(s, Real(0)), PreconditionError);
  s.avg_degree = 0;
  CHECK_THROWS_AS(delta_tau(s, Real(1)), PreconditionError);
  auto big = single_edge();
  big.k = 9;
  big.codegree.assign(10, 1);
  CHECK_THROWS_AS(delta_tau(big, Real(1)), PreconditionError);
}

TEST_CASE("epsilon and tau schedule") {
  RProvider full(ap3);
  full.set_override([](std::int64_t n) { return std::optional<std::uint64_t>(n); });
  const auto deg = epsilon_tau_schedule(ap3, 1000, full, Real(1));
  const long double ln = std::log(1000.0L);
  CHECK(std::fabs(static_cast<long double>(deg.epsilon) / (std::pow(ln, 7) / 3000.0L) - 1) < 1e-15L);

  RProvider tenth(ap3);
  tenth.set_override(10'000, 1000);
  const auto c = epsilon_tau_schedule(ap3, 10'000, tenth, Real(1));
  const long double l4 = std::log(10000.0L);
  const long double want = std::pow(l4, 7) / 10000.0L / 3.0L * 1000.0L;
  CHECK(std::fabs(static_cast<long double>(c.epsilon) / want - 1) < 1e-15L);
  CHECK(c.r.value == 1000);
  CHECK(c.r.provenance == Provenance::User);
  const Real tau3 = Real(12 * 6) * mp::pow(Real(2), 9) * 27 / (Real(10'000) * c.epsilon);
  CHECK(rel(mp::pow(c.tau, 2), tau3) < 1e-25L);

  Real prev = 0;
  for (std::uint64_t r = 10'000; r >= 100; r /= 2) {
    RProvider pr(ap3);
    pr.set_override(10'000, r);
    const auto e = epsilon_tau_schedule(ap3, 10'000, pr, Real(1)).epsilon;
    CHECK(e > prev);
    prev = e;
  }
  RProvider miss(ap3);
  CHECK_THROWS_AS(epsilon_tau_schedule(ap3, 100, miss, Real(1)), PreconditionError);
  CHECK_THROWS_AS(epsilon_tau_schedule(ap3, 100, full, Real(0)), PreconditionError);
}

TEST_CASE("gamma constant") {
  const auto g = estimate_gamma_const(ap3, 10, 100);
  REQUIRE(g.analytic_floor);
  CHECK(*g.analytic_floor == Real(3) / 8);
  CHECK(g.gamma == Real(3) / 8);
  CHECK(g.measured_min >= *g.analytic_floor);
  for (std::int64_t n = 10; n <= 100; ++n) {
    std::uint64_t edges = 0;
    for (std::int64_t r = 1; 2 * r < n; ++r) edges += n - 2 * r;
    CHECK(g.gamma <= Real(3 * edges) / (n * n));
  }
  const auto c = estimate_gamma_const(corner(2), 2, 30);
  REQUIRE(c.analytic_floor);
  CHECK(*c.analytic_floor == Real(3) / 8);
  CHECK(c.measured_min >= *c.analytic_floor);

  const auto one = estimate_gamma_const(ap3, 3, 3);
  CHECK_FALSE(one.analytic_floor);
  CHECK(one.gamma == Real(1) / 3);
  CHECK_THROWS_AS(estimate_gamma_const(ap3, 5, 4), PreconditionError);
}

TEST_CASE("bounded delta meets the target with equality") {
  int points = 0;
  for (std::int64_t n : {100, 1000, 10'000, 100'000, 1'000'000}) {
    for (long double frac : {1.0L, 0.5L}) {
      for (long double g : {0.375L, 0.75L}) {
        RProvider pr(ap3);
        pr.set_override(n, static_cast<std::uint64_t>(n * frac));
        auto c = epsilon_tau_schedule(ap3, n, pr, Real(g));
        check_container_hypotheses(c);
        CHECK(c.delta_mode == DeltaMode::Bounded);
        CHECK(std::fabs(static_cast<long double>(c.delta_ratio) - 1) < 1e-9L);
        CHECK(c.hyp_delta);
        ++points;
      }
    }
  }
  CHECK(points == 20);
}

TEST_CASE("small n reports the tau hypothesis honestly") {
  RProvider pr(ap3);
  pr.add_record(solve_rx_exact(ap3, 10));
  auto c = epsilon_tau_schedule(ap3, 10, pr, Real(3) / 8);
  check_container_hypotheses(c);
  CHECK(c.tau >= Real(1) / 2);
  CHECK_FALSE(c.hyp_tau);
}

TEST_CASE("exact delta never exceeds the bound") {
  const Real gamma = estimate_gamma_const(ap3, 3, 30).gamma;
  for (std::int64_t n = 3; n <= 30; ++n) {
    RProvider pr(ap3);
    pr.add_record(solve_rx_exact(ap3, n));
    auto exact = epsilon_tau_schedule(ap3, n, pr, gamma);
    auto bounded = exact;
    const auto summary = codegree_stats(ap3, n);
    CHECK(summary.codegree[2] <= 6);
    check_container_hypotheses(exact, summary);
    check_container_hypotheses(bounded);
    CHECK(exact.delta_mode == DeltaMode::Exact);
    CHECK(exact.delta_value <= bounded.delta_value);
  }
}

TEST_CASE("counting budgets against exact counts") {
  {
    RProvider pr(ap3);
    pr.add_record(solve_rx_exact(ap3, 4));
    auto c = epsilon_tau_schedule(ap3, 4, pr, Real(3) / 8);
    counting_budget(c, Rational(1, 2), BigInt(13));
    REQUIRE(c.true_exponent);
    CHECK(std::fabs(static_cast<long double>(*c.true_exponent) - std::log(13.0L)) < 1e-15L);
    CHECK(*c.true_exponent < c.total_exponent_budget);
    CHECK(c.size_cap == Real(8 * 3));
  }
  {
    const Pattern c2 = corner(2);
    RProvider pr(c2);
    pr.add_record(solve_rx_exact(c2, 3));
    auto c = epsilon_tau_schedule(c2, 3, pr, Real(3) / 8);
    counting_budget(c, Rational(1, 2));
    CHECK_FALSE(c.true_exponent);
    counting_budget(c, Rational(1, 2), BigInt(296));
    CHECK(*c.true_exponent < c.total_exponent_budget);
    CHECK(c.c_cap == Real(1000 * 3 * 216));
  }
  for (std::int64_t n = 3; n <= 12; ++n) {
    RProvider pr(ap3);
    pr.add_record(solve_rx_exact(ap3, n));
    auto c = epsilon_tau_schedule(ap3, n, pr, Real(3) / 8);
    counting_budget(c, Rational(1, 2), count_xfree_subsets(ap3, n).count);
    CHECK(*c.true_exponent <= c.total_exponent_budget);
  }
}

TEST_CASE("container csv") {
  RProvider pr(ap3);
  pr.add_record(solve_rx_exact(ap3, 8));
  auto c = epsilon_tau_schedule(ap3, 8, pr, Real(3) / 8);
  const std::string header =
      "n,k,r_value,r_provenance,gamma,epsilon,tau,delta_mode,delta_value,hyp_tau,hyp_delta,logC_budget,size_cap,"
      "total_exponent_budget,true_exponent\n";
  const std::string csv = container_csv({c});
  CHECK(csv.rfind(header, 0) == 0);
  CHECK(csv.find("\n8,3,4,") != std::string::npos);
  CHECK(csv.find(",none,") != std::string::npos);
}
