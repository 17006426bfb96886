#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xfree/copies.hpp"
#include "xfree/numeric.hpp"
#include "xfree/pattern.hpp"
#include "xfree/r_provider.hpp"

namespace xfree {

inline constexpr int kMaxContainerK = 8;

// 2^{C(k,2)-1} sum_{j=2..k} 2^{-C(j-1,2)} Delta_j / (tau^{j-1} avg_degree)
Real delta_tau(const HypergraphSummary& s, const Real& tau);

enum class DeltaMode { None, Exact, Bounded };
std::string to_string(DeltaMode m);

struct ContainerParams {
  std::int64_t n = 0;
  int d = 0;
  int k = 0;
  RValue r;
  Real gamma;
  Real epsilon;
  Real tau;
  DeltaMode delta_mode = DeltaMode::None;
  Real delta_value;
  Real delta_ratio;  // delta_value * 12 k! / epsilon
  bool hyp_tau = false;
  bool hyp_delta = false;
  Real c_cap;        // 1000 k k!^3
  Real logC_budget;  // c n^d tau ln(1/eps) ln(1/tau)
  Real size_cap;     // (4/alpha) r
  Real total_exponent_budget;
  std::optional<Real> true_exponent;  // ln(count) when an exact count is known
};

ContainerParams epsilon_tau_schedule(const Pattern& p, std::int64_t n, const RProvider& r, const Real& gamma);

struct GammaEstimate {
  Real gamma;
  Real measured_min;
  std::optional<Real> analytic_floor;  // k / (2^{d+1} w_max), when every n >= 2 w_max
};

GammaEstimate estimate_gamma_const(const Pattern& p, std::int64_t n_min, std::int64_t n_max);

// 2^{k^2} k^3 / (tau^{k-1} gamma n)
Real bounded_delta(const ContainerParams& params);

// Fills delta_mode, delta_value, delta_ratio and both hypothesis flags. With a
// summary the exact functional is used, otherwise the bound.
void check_container_hypotheses(ContainerParams& params, const std::optional<HypergraphSummary>& summary = std::nullopt);

// Fills c_cap, logC_budget, size_cap, total_exponent_budget and, given an
// exact count, true_exponent.
void counting_budget(ContainerParams& params, const Rational& alpha, const std::optional<BigInt>& exact_count = std::nullopt);

std::string container_csv(const std::vector<ContainerParams>& rows);

}  // namespace xfree
