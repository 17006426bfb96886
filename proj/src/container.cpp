#include "xfree/container.hpp"

#include <sstream>

#include "xfree/error.hpp"

namespace xfree {

namespace mp = boost::multiprecision;

namespace {

Real factorial(int k) {
  Real f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

int choose2(int j) { return j * (j - 1) / 2; }

void require_k(int k) {
  if (k < 2 || k > kMaxContainerK) throw PreconditionError("container arithmetic supports 2 <= |X| <= 8");
}

}  // namespace

Real delta_tau(const HypergraphSummary& s, const Real& tau) {
  require_k(s.k);
  if (!(tau > 0)) throw PreconditionError("tau must be positive");
  if (!(s.avg_degree > 0)) throw PreconditionError("average degree is zero (no copies)");
  if (static_cast<int>(s.codegree.size()) < s.k + 1) throw PreconditionError("summary lacks co-degrees up to k");
  Real sum = 0;
  for (int j = 2; j <= s.k; ++j) {
    if (s.codegree[j] == 0) continue;
    sum += mp::ldexp(Real(s.codegree[j]), -choose2(j - 1)) / mp::pow(tau, j - 1);
  }
  return mp::ldexp(sum / Real(s.avg_degree), choose2(s.k) - 1);
}

std::string to_string(DeltaMode m) {
  switch (m) {
    case DeltaMode::Exact: return "exact";
    case DeltaMode::Bounded: return "bounded";
    default: return "none";
  }
}

ContainerParams epsilon_tau_schedule(const Pattern& p, std::int64_t n, const RProvider& r, const Real& gamma) {
  const int k = static_cast<int>(p.size());
  require_k(k);
  if (n < 3) throw PreconditionError("schedule needs n >= 3");
  if (!(gamma > 0)) throw PreconditionError("gamma must be positive");
  ContainerParams c;
  c.n = n;
  c.d = p.dim();
  c.k = k;
  c.r = r.get(n);
  if (c.r.value == 0) throw PreconditionError("r-value must be positive");
  c.gamma = gamma;

  const Real ln_n = mp::log(Real(n));
  const Real log_eps = -mp::log(Real(3 * c.d)) + (3 * k - 2) * mp::log(ln_n) - ln_n +
                       k * (c.d * ln_n - mp::log(Real(c.r.value)));
  c.epsilon = mp::exp(log_eps);
  const Real log_tau_num = mp::log(Real(12)) + mp::log(factorial(k)) + Real(k * k) * mp::log(Real(2)) +
                           3 * mp::log(Real(k));
  const Real log_tau = (log_tau_num - mp::log(gamma) - ln_n - log_eps) / (k - 1);
  c.tau = mp::exp(log_tau);
  return c;
}

GammaEstimate estimate_gamma_const(const Pattern& p, std::int64_t n_min, std::int64_t n_max) {
  if (n_min < 1 || n_min > n_max) throw PreconditionError("empty n range");
  const Pattern canon = normalize(p);
  const int k = static_cast<int>(canon.size());
  const int d = canon.dim();
  GammaEstimate g;
  bool first = true;
  for (std::int64_t n = n_min; n <= n_max; ++n) {
    const Real edges(count_copies_closed_form(canon, n));
    const Real ratio = Real(k) * edges / mp::pow(Real(n), d + 1);
    if (first || ratio < g.measured_min) g.measured_min = ratio;
    first = false;
  }
  if (!(g.measured_min > 0)) throw PreconditionError("the range contains an n without copies");
  g.gamma = g.measured_min;
  if (n_min >= 2 * canon.max_width()) {
    g.analytic_floor = mp::ldexp(Real(k), -(d + 1)) / canon.max_width();
    if (*g.analytic_floor < g.gamma) g.gamma = *g.analytic_floor;
  }
  return g;
}

Real bounded_delta(const ContainerParams& c) {
  return mp::ldexp(Real(c.k) * c.k * c.k, c.k * c.k) / (mp::pow(c.tau, c.k - 1) * c.gamma * c.n);
}

void check_container_hypotheses(ContainerParams& c, const std::optional<HypergraphSummary>& summary) {
  require_k(c.k);
  const Real kfact = factorial(c.k);
  const Real target = c.epsilon / (12 * kfact);
  c.hyp_tau = c.tau < 1 / (200 * c.k * kfact * kfact);
  if (summary) {
    c.delta_mode = DeltaMode::Exact;
    c.delta_value = delta_tau(*summary, c.tau);
    c.delta_ratio = c.delta_value / target;
    c.hyp_delta = c.delta_value <= target;
  } else {
    c.delta_mode = DeltaMode::Bounded;
    c.delta_value = bounded_delta(c);
    c.delta_ratio = c.delta_value / target;
    c.hyp_delta = c.delta_ratio <= Real(1) + Real(1e-9);
  }
}

void counting_budget(ContainerParams& c, const Rational& alpha, const std::optional<BigInt>& exact_count) {
  require_k(c.k);
  if (!(alpha > 0)) throw PreconditionError("alpha must be positive");
  const Real kfact = factorial(c.k);
  c.c_cap = 1000 * c.k * kfact * kfact * kfact;
  c.logC_budget = c.c_cap * mp::pow(Real(c.n), c.d) * c.tau * mp::log(1 / c.epsilon) * mp::log(1 / c.tau);
  const Real a = Real(mp::numerator(alpha)) / Real(mp::denominator(alpha));
  c.size_cap = 4 / a * Real(c.r.value);
  c.total_exponent_budget = (c.logC_budget > 0 ? c.logC_budget : Real(0)) + c.size_cap * mp::log(Real(2));
  if (exact_count) {
    if (*exact_count <= 0) throw PreconditionError("count must be positive");
    c.true_exponent = mp::log(Real(*exact_count));
  } else {
    c.true_exponent.reset();
  }
}

std::string container_csv(const std::vector<ContainerParams>& rows) {
  std::ostringstream os;
  os << "n,k,r_value,r_provenance,gamma,epsilon,tau,delta_mode,delta_value,hyp_tau,hyp_delta,logC_budget,size_cap,"
        "total_exponent_budget,true_exponent\n";
  for (const auto& c : rows) {
    os << c.n << ',' << c.k << ',' << c.r.value << ',' << to_string(c.r.provenance) << ',' << format_real(c.gamma) << ','
       << format_real(c.epsilon) << ',' << format_real(c.tau) << ',' << to_string(c.delta_mode) << ','
       << (c.delta_mode == DeltaMode::None ? std::string() : format_real(c.delta_value)) << ',' << (c.hyp_tau ? 1 : 0)
       << ',' << (c.hyp_delta ? 1 : 0) << ',' << format_real(c.logC_budget) << ',' << format_real(c.size_cap) << ','
       << format_real(c.total_exponent_budget) << ',' << (c.true_exponent ? format_real(*c.true_exponent) : std::string())
       << '\n';
  }
  return os.str();
}

}  // namespace xfree
