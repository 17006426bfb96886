#include "xfree/supersat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "xfree/copies.hpp"
#include "xfree/error.hpp"
#include "xfree/rng.hpp"

namespace xfree {

namespace mp = boost::multiprecision;

std::vector<std::int64_t> primes_up_to(std::int64_t limit, std::int64_t cap) {
  if (limit > cap) throw BudgetError("sieve limit " + std::to_string(limit) + " exceeds cap " + std::to_string(cap));
  std::vector<std::int64_t> out;
  if (limit < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  for (std::int64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::int64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

std::uint64_t prime_pi(std::int64_t l, std::int64_t cap) {
  if (l < 2) throw PreconditionError("prime_pi needs l >= 2");
  return primes_up_to(l, cap).size();
}

PntCheck verify_pnt_constant(std::int64_t l0, std::int64_t lmax, std::int64_t cap) {
  if (l0 < 2 || l0 > lmax) throw PreconditionError("need 2 <= l0 <= lmax");
  const auto primes = primes_up_to(lmax, cap);
  PntCheck out;
  std::size_t pi = 0;
  for (std::int64_t l = 2; l <= lmax; ++l) {
    while (pi < primes.size() && primes[pi] <= l) ++pi;
    if (l < l0) continue;
    // log rounded toward zero
    const long double lg = std::nextafter(std::log(static_cast<long double>(l)), 0.0L);
    if (2.0L * static_cast<long double>(pi) * lg < static_cast<long double>(l)) {
      out.first_violation = l;
      return out;
    }
  }
  out.holds = true;
  return out;
}

namespace {

void require_matching(const RNumberRecord& r, const Pattern& canon, std::int64_t n, const char* what) {
  if (r.n != n) throw PreconditionError(std::string(what) + ": record is for n = " + std::to_string(r.n));
  if (!r.pattern_id.empty() && r.pattern_id != pattern_hash(canon))
    throw PreconditionError(std::string(what) + ": record belongs to a different pattern");
}

std::uint64_t pow_u(std::int64_t n, int e) { return checked_power(n, e); }

}  // namespace

TrivialCheck check_supersat_trivial(const GridSet& a, const Pattern& p, const RNumberRecord& r_exact) {
  const Pattern canon = normalize(p);
  require_matching(r_exact, canon, a.side(), "r_X(n)");
  if (!r_exact.exact) throw PreconditionError("trivial supersaturation needs an exact r_X(n)");
  TrivialCheck c;
  c.gamma = gamma_count(a, canon);
  c.deficit = static_cast<std::int64_t>(a.size()) - static_cast<std::int64_t>(r_exact.lower);
  c.holds = static_cast<std::int64_t>(c.gamma) >= c.deficit;
  return c;
}

SubgridSetup subgrid_setup(const GridSet& a, const Pattern& p, std::int64_t M, const RNumberRecord& r_n,
                           std::int64_t l0) {
  const Pattern canon = normalize(p);
  if (canon.dim() != a.dim()) throw PreconditionError("pattern and set dimensions differ");
  if (M < 2) throw PreconditionError("sub-grid side M must be at least 2");
  require_matching(r_n, canon, a.side(), "r_X(n)");
  SubgridSetup s;
  s.n = a.side();
  s.d = a.dim();
  s.M = M;
  s.set_size = a.size();
  if (s.set_size == 0) throw PreconditionError("|A| > max(4 l0 d n^(d-1) M, r_X(n)) fails: A is empty");

  const unsigned __int128 unit = static_cast<unsigned __int128>(4) * s.d * pow_u(s.n, s.d - 1) * static_cast<std::uint64_t>(M);
  s.prime_bound = static_cast<std::int64_t>(s.set_size / unit);
  s.density_condition = s.set_size > unit * static_cast<std::uint64_t>(l0);
  if (r_n.upper < s.set_size) {
    s.r_certified = true;
  } else if (r_n.lower < s.set_size) {
    s.conditionally_admissible = true;
  } else {
    throw PreconditionError("|A| > r_X(n) fails: |A| = " + std::to_string(s.set_size) +
                            " but r_X(n) >= " + std::to_string(r_n.lower));
  }
  s.primes = primes_up_to(s.prime_bound);
  if (s.primes.empty())
    throw PreconditionError("no admissible prime: |A| / (4 d n^(d-1) M) = " + std::to_string(s.prime_bound) + " < 2");
  return s;
}

GridSet restrict_to_subgrid(const GridSet& a, std::int64_t prime, const Point& base, std::int64_t M) {
  const int d = a.dim();
  GridSet sub(M, d);
  Point j(d, 1), y(d);
  for (std::uint64_t idx = 0; idx < sub.cell_count(); ++idx) {
    for (int i = 0; i < d; ++i) y[i] = base[i] + prime * j[i];
    if (a.contains(y)) sub.set(idx);
    for (int i = 0; i < d; ++i) {
      if (j[i] < M) {
        ++j[i];
        break;
      }
      j[i] = 1;
    }
  }
  return sub;
}

SubgridSampler::SubgridSampler(const GridSet& a, const Pattern& p, std::int64_t M, const RNumberRecord& r_n,
                               std::uint64_t seed, std::int64_t l0)
    : a_(a), p_(normalize(p)), setup_(subgrid_setup(a, p, M, r_n, l0)), seed_(seed) {}

SupersatSample SubgridSampler::sample(std::uint64_t index) const {
  const CounterRng rng(seed_);
  SupersatSample s;
  s.index = index;
  s.prime = setup_.primes[rng.uniform(setup_.primes.size(), 0, index)];
  const std::uint64_t span = static_cast<std::uint64_t>(setup_.n - setup_.M * s.prime);
  s.base.resize(setup_.d);
  for (int i = 0; i < setup_.d; ++i) s.base[i] = static_cast<std::int64_t>(rng.uniform(span, 1 + i, index));
  const GridSet sub = restrict_to_subgrid(a_, s.prime, s.base, setup_.M);
  s.size_ab = sub.size();
  s.gamma_ab = gamma_count(sub, p_);
  return s;
}

SupersatSample sample_subgrid(const GridSet& a, const Pattern& p, std::int64_t M, std::uint64_t seed,
                              const RNumberRecord& r_n, std::int64_t l0) {
  return SubgridSampler(a, p, M, r_n, seed, l0).sample(0);
}

ExactExpectation exact_expected_gamma(const GridSet& a, const Pattern& p, std::int64_t M, const RNumberRecord& r_n,
                                      std::uint64_t budget, std::int64_t l0) {
  ExactExpectation e;
  e.setup = subgrid_setup(a, p, M, r_n, l0);
  const Pattern canon = normalize(p);
  const auto& s = e.setup;
  const std::uint64_t sub_cells = pow_u(M, s.d);

  unsigned __int128 work = 0;
  for (auto q : s.primes) work += static_cast<unsigned __int128>(pow_u(s.n - M * q, s.d)) * sub_cells;
  if (work > budget) throw BudgetError("exact expectation needs more than " + std::to_string(budget) + " cell visits");

  const auto members = a.points();
  for (auto q : s.primes) {
    const std::int64_t span = s.n - M * q;
    PrimeAudit audit;
    audit.prime = q;
    std::uint64_t size_sum = 0, gamma_sum = 0, bases = 0;
    Point b(s.d, 0);
    for (;;) {
      const GridSet sub = restrict_to_subgrid(a, q, b, M);
      size_sum += sub.size();
      gamma_sum += gamma_count(sub, canon);
      ++bases;
      int i = 0;
      while (i < s.d && b[i] == span - 1) b[i++] = 0;
      if (i == s.d) break;
      ++b[i];
    }
    audit.mean_size_ab = Rational(size_sum, bases);
    audit.mean_gamma_ab = Rational(gamma_sum, bases);
    for (const auto& x : members)
      if (std::all_of(x.begin(), x.end(), [&](std::int64_t c) { return c <= span - 1; })) ++audit.inner_count;
    audit.inner_ok = 2 * audit.inner_count > s.set_size;
    e.mean_gamma += audit.mean_gamma_ab;
    e.mean_size += audit.mean_size_ab;
    e.per_prime.push_back(std::move(audit));
  }
  const Rational primes(static_cast<std::uint64_t>(s.primes.size()));
  e.mean_gamma /= primes;
  e.mean_size /= primes;
  e.size_floor = Rational(BigInt(s.set_size) * sub_cells, BigInt(2) * pow_u(s.n, s.d));
  e.size_ok = e.mean_size >= e.size_floor;
  return e;
}

MonteCarloEstimate estimate_expected_gamma(const GridSet& a, const Pattern& p, std::int64_t M, std::uint64_t samples,
                                           std::uint64_t seed, const RNumberRecord& r_n, std::int64_t l0) {
  if (samples == 0) throw PreconditionError("sample count must be positive");
  const SubgridSampler sampler(a, p, M, r_n, seed, l0);
  MonteCarloEstimate est;
  est.samples = samples;
  long double mean = 0, m2 = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const long double g = static_cast<long double>(sampler.sample(i).gamma_ab);
    const long double delta = g - mean;
    mean += delta / static_cast<long double>(i + 1);
    m2 += delta * (g - mean);
  }
  est.mean = mean;
  if (samples > 1) {
    const long double var = m2 / static_cast<long double>(samples - 1);
    est.stderr_mean = std::sqrt(var / static_cast<long double>(samples));
  }
  return est;
}

PrimeSupersatCheck check_supersat_prime(const GridSet& a, const Pattern& p, std::int64_t M, const RNumberRecord& r_n,
                                        const RNumberRecord& r_m, std::int64_t l0) {
  const SubgridSetup s = subgrid_setup(a, p, M, r_n, l0);
  if (!s.density_condition)
    throw PreconditionError("|A| > 4 l0 d n^(d-1) M fails: |A| = " + std::to_string(s.set_size));
  if (!s.r_certified) throw PreconditionError("|A| > r_X(n) is not certified by the supplied record");
  const Pattern canon = normalize(p);
  require_matching(r_m, canon, M, "r_X(M)");
  if (!r_m.exact) throw PreconditionError("r_X(M) must be exact");

  const long double n = static_cast<long double>(s.n), m = static_cast<long double>(M);
  const long double size = static_cast<long double>(s.set_size);
  const long double ln = std::log(n);
  const long double density_gap =
      size / (2.0L * std::pow(n, s.d)) - static_cast<long double>(r_m.lower) / std::pow(m, s.d);
  PrimeSupersatCheck c;
  c.rhs = size / (11.0L * s.d * ln * ln) * (n / m) * density_gap;
  c.gamma = gamma_count(a, canon);
  c.holds = static_cast<long double>(c.gamma) >= c.rhs;
  return c;
}

std::int64_t m_of_n(const Pattern& p, std::int64_t n, const RProvider& r) {
  if (n < 3) throw PreconditionError("m(n) needs n >= 3");
  const int k = static_cast<int>(p.size());
  const RValue rv = r.get(n);
  const Real nn(n);
  const Real density = Real(rv.value) / mp::pow(nn, p.dim());
  const Real value = nn / mp::pow(mp::log(nn), 3 * k) * mp::pow(density, k + 2);
  const Real fl = mp::floor(value);
  if (fl < 2) return 2;
  return fl.convert_to<std::int64_t>();
}

Rational alpha_default(long double c_hat, int k) {
  if (!(c_hat > 0)) throw PreconditionError("c_hat must be positive");
  if (k < 1) throw PreconditionError("k must be positive");
  const long double v = std::exp(-5.0L * c_hat * c_hat * k / 2.0L) / 2.0L;
  if (v == 0) throw PreconditionError("alpha underflows for c_hat = " + format_real(c_hat));
  int e = 0;
  const long double frac = std::frexp(v, &e);
  const auto mant = static_cast<std::uint64_t>(std::ldexp(frac, 64));
  Rational out(mant);
  const int shift = e - 64;
  if (shift >= 0) out *= Rational(BigInt(1) << shift);
  else out /= Rational(BigInt(1) << -shift);
  return out;
}

std::vector<std::int64_t> SequenceFilterReport::accepted() const {
  std::vector<std::int64_t> out;
  for (const auto& row : rows)
    if (row.accepted) out.push_back(row.n);
  return out;
}

SequenceFilterReport filter_sequence(const RProvider& r, const std::function<std::int64_t(std::int64_t)>& m_map,
                                     const Rational& alpha, int d, std::int64_t n_min, std::int64_t n_max) {
  if (n_min < 1 || n_min > n_max) throw PreconditionError("need 1 <= n_min <= n_max");
  if (alpha < 0) throw PreconditionError("alpha must be non-negative");
  SequenceFilterReport rep;
  rep.alpha = alpha;
  rep.n_min = n_min;
  rep.n_max = n_max;
  for (std::int64_t n = n_min; n <= n_max; ++n) {
    FilterRow row;
    row.n = n;
    row.m = m_map(n);
    if (row.m < 1 || row.m > n) throw PreconditionError("m(" + std::to_string(n) + ") must lie in [1, n]");
    row.r_n = r.get(n);
    row.r_m = r.get(row.m);
    const Rational lhs(BigInt(row.r_n.value) * BigInt(pow_u(row.m, d)));
    const Rational rhs = alpha * Rational(BigInt(row.r_m.value) * BigInt(pow_u(n, d)));
    row.accepted = lhs >= rhs;
    rep.rows.push_back(row);
  }
  return rep;
}

Real supersat_seq_rhs(std::int64_t n, int d, int k, std::uint64_t r_n) {
  if (r_n == 0) throw PreconditionError("r_X(n) must be positive");
  const Real nn(n);
  const Real cells = mp::pow(nn, d);
  return mp::pow(mp::log(nn), 3 * k - 2) / (3 * d) * mp::pow(cells / Real(r_n), k) * cells;
}

SequenceSupersatCheck check_supersat_seq(const Real& gamma, std::uint64_t set_size, std::int64_t n, int d, int k,
                                         const Rational& alpha, std::uint64_t r_n) {
  if (alpha <= 0) throw PreconditionError("alpha must be positive");
  if (Rational(set_size) * alpha < Rational(4 * static_cast<std::int64_t>(r_n)))
    throw PreconditionError("|A| >= (4/alpha) r_X(n) fails");
  SequenceSupersatCheck c;
  c.gamma = gamma;
  c.rhs = supersat_seq_rhs(n, d, k, r_n);
  c.holds = c.gamma >= c.rhs;
  return c;
}

SequenceSupersatCheck check_supersat_seq(const GridSet& a, const Pattern& p, const Rational& alpha,
                                         const RNumberRecord& r_n) {
  const Pattern canon = normalize(p);
  require_matching(r_n, canon, a.side(), "r_X(n)");
  if (!r_n.exact) throw PreconditionError("r_X(n) must be exact");
  // precondition before the (possibly expensive) count
  check_supersat_seq(Real(0), a.size(), a.side(), a.dim(), static_cast<int>(canon.size()), alpha, r_n.lower);
  return check_supersat_seq(Real(gamma_count(a, canon)), a.size(), a.side(), a.dim(), static_cast<int>(canon.size()),
                            alpha, r_n.lower);
}

std::string samples_csv(const std::vector<SupersatSample>& samples, int d) {
  std::ostringstream os;
  os << "p";
  for (int i = 1; i <= d; ++i) os << ",b" << i;
  os << ",size_ab,gamma_ab\n";
  for (const auto& s : samples) {
    os << s.prime;
    for (auto b : s.base) os << ',' << b;
    os << ',' << s.size_ab << ',' << s.gamma_ab << '\n';
  }
  return os.str();
}

std::string expectation_csv(const ExactExpectation& e) {
  std::ostringstream os;
  os << "prime,exact_mean_ab,exact_mean_gamma\n";
  for (const auto& a : e.per_prime)
    os << a.prime << ',' << format_real(a.mean_size_ab.convert_to<long double>()) << ','
       << format_real(a.mean_gamma_ab.convert_to<long double>()) << '\n';
  return os.str();
}

std::string filter_csv(const SequenceFilterReport& report) {
  std::ostringstream os;
  os << "n,m_n,r_n,r_mn,accepted\n";
  for (const auto& r : report.rows)
    os << r.n << ',' << r.m << ',' << r.r_n.value << ',' << r.r_m.value << ',' << (r.accepted ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace xfree
