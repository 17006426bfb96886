#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "xfree/extremal.hpp"
#include "xfree/grid_set.hpp"
#include "xfree/numeric.hpp"
#include "xfree/pattern.hpp"
#include "xfree/r_provider.hpp"

namespace xfree {

inline constexpr std::int64_t kDefaultSieveCap = 100'000'000;
inline constexpr std::int64_t kDefaultL0 = 3;

std::vector<std::int64_t> primes_up_to(std::int64_t limit, std::int64_t cap = kDefaultSieveCap);
std::uint64_t prime_pi(std::int64_t l, std::int64_t cap = kDefaultSieveCap);

struct PntCheck {
  bool holds = false;
  std::optional<std::int64_t> first_violation;
};

// pi(l) >= l / (2 ln l) for every l in [l0, lmax].
PntCheck verify_pnt_constant(std::int64_t l0, std::int64_t lmax, std::int64_t cap = kDefaultSieveCap);

struct TrivialCheck {
  std::uint64_t gamma = 0;
  std::int64_t deficit = 0;  // |A| - r_X(n)
  bool holds = false;
};

// Gamma(A) >= |A| - r_X(n); r must be exact for (p, A.side()).
TrivialCheck check_supersat_trivial(const GridSet& a, const Pattern& p, const RNumberRecord& r_exact);

// Validated setup shared by the sampling, expectation and prime checks.
struct SubgridSetup {
  std::int64_t n = 0;
  int d = 0;
  std::int64_t M = 0;
  std::uint64_t set_size = 0;
  std::int64_t prime_bound = 0;        // floor(|A| / (4 d n^{d-1} M))
  std::vector<std::int64_t> primes;    // admissible primes, ascending
  bool density_condition = false;        // |A| > 4 l0 d n^{d-1} M
  bool r_certified = false;            // |A| > r_X(n) proven by the record's upper bound
  bool conditionally_admissible = false;  // only |A| > lower bound is known
};

SubgridSetup subgrid_setup(const GridSet& a, const Pattern& p, std::int64_t M, const RNumberRecord& r_n,
                           std::int64_t l0 = kDefaultL0);

struct SupersatSample {
  std::uint64_t index = 0;
  std::int64_t prime = 0;
  Point base;  // in {0, ..., n - M p - 1}^d
  std::uint64_t size_ab = 0;
  std::uint64_t gamma_ab = 0;
};

// A_b in the sub-grid's own [M]^d coordinates.
GridSet restrict_to_subgrid(const GridSet& a, std::int64_t prime, const Point& base, std::int64_t M);

class SubgridSampler {
 public:
  SubgridSampler(const GridSet& a, const Pattern& p, std::int64_t M, const RNumberRecord& r_n, std::uint64_t seed,
                 std::int64_t l0 = kDefaultL0);

  // Sample number `index`; a pure function of (seed, index).
  SupersatSample sample(std::uint64_t index) const;
  const SubgridSetup& setup() const noexcept { return setup_; }

 private:
  const GridSet& a_;
  Pattern p_;
  SubgridSetup setup_;
  std::uint64_t seed_;
};

SupersatSample sample_subgrid(const GridSet& a, const Pattern& p, std::int64_t M, std::uint64_t seed,
                              const RNumberRecord& r_n, std::int64_t l0 = kDefaultL0);

struct PrimeAudit {
  std::int64_t prime = 0;
  Rational mean_size_ab;
  Rational mean_gamma_ab;
  std::uint64_t inner_count = 0;  // |A ∩ I_p|, I_p = {1, ..., n - M p - 1}^d
  bool inner_ok = false;          // inner_count > |A| / 2
};

struct ExactExpectation {
  Rational mean_gamma;
  Rational mean_size;
  Rational size_floor;   // (|A|/2) M^d / n^d
  bool size_ok = false;  // mean_size >= size_floor
  std::vector<PrimeAudit> per_prime;
  SubgridSetup setup;
};

ExactExpectation exact_expected_gamma(const GridSet& a, const Pattern& p, std::int64_t M, const RNumberRecord& r_n,
                                      std::uint64_t budget = 500'000'000, std::int64_t l0 = kDefaultL0);

struct MonteCarloEstimate {
  std::uint64_t samples = 0;
  long double mean = 0;
  long double stderr_mean = 0;
};

MonteCarloEstimate estimate_expected_gamma(const GridSet& a, const Pattern& p, std::int64_t M, std::uint64_t samples,
                                           std::uint64_t seed, const RNumberRecord& r_n,
                                           std::int64_t l0 = kDefaultL0);

struct PrimeSupersatCheck {
  std::uint64_t gamma = 0;
  long double rhs = 0;
  bool holds = false;
};

// Gamma(A) >= (|A| / (11 d ln^2 n)) (n / M) (|A| / (2 n^d) - r_X(M) / M^d).
// Requires |A| > max(4 l0 d n^{d-1} M, r_X(n)) and an exact r_X(M).
PrimeSupersatCheck check_supersat_prime(const GridSet& a, const Pattern& p, std::int64_t M, const RNumberRecord& r_n,
                                        const RNumberRecord& r_m, std::int64_t l0 = kDefaultL0);

// max(2, floor((n / ln^{3k} n) (r / n^d)^{k+2}))
std::int64_t m_of_n(const Pattern& p, std::int64_t n, const RProvider& r);

// exp(-5 c^2 k / 2) / 2, as the exact rational value of the long double.
Rational alpha_default(long double c_hat, int k);

struct FilterRow {
  std::int64_t n = 0;
  std::int64_t m = 0;
  RValue r_n;
  RValue r_m;
  bool accepted = false;
};

struct SequenceFilterReport {
  Rational alpha;
  std::int64_t n_min = 0;
  std::int64_t n_max = 0;
  std::vector<FilterRow> rows;
  std::vector<std::int64_t> accepted() const;
};

// Accepts n iff r(n) / n^d >= alpha r(m(n)) / m(n)^d, compared exactly.
SequenceFilterReport filter_sequence(const RProvider& r, const std::function<std::int64_t(std::int64_t)>& m_map,
                                     const Rational& alpha, int d, std::int64_t n_min, std::int64_t n_max);

struct SequenceSupersatCheck {
  Real gamma;
  Real rhs;
  bool holds = false;
};

// (ln^{3k-2} n / (3d)) (n^d / r)^k n^d
Real supersat_seq_rhs(std::int64_t n, int d, int k, std::uint64_t r_n);

// Requires |A| >= (4/alpha) r_X(n) with exact r.
SequenceSupersatCheck check_supersat_seq(const GridSet& a, const Pattern& p, const Rational& alpha,
                                         const RNumberRecord& r_n);
// Same comparison with a supplied copy count in place of Gamma(A).
SequenceSupersatCheck check_supersat_seq(const Real& gamma, std::uint64_t set_size, std::int64_t n, int d, int k,
                                         const Rational& alpha, std::uint64_t r_n);

std::string samples_csv(const std::vector<SupersatSample>& samples, int d);
std::string expectation_csv(const ExactExpectation& e);
std::string filter_csv(const SequenceFilterReport& report);

}  // namespace xfree
