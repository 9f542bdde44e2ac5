#pragma once

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>

#include "unite/combinatorics.hpp"
#include "unite/errors.hpp"
#include "unite/estimators.hpp"
#include "unite/outcomes.hpp"

namespace unite {

struct VarianceBoundInputs {
  std::size_t n = 1;
  double y_max = 0.0;  // max |Y|, or max |Y - f| for the DR estimators
  double p = 0.5;
  std::size_t beta = 1;
  std::size_t d_m = 1;  // max |M_i|
  std::size_t d_n = 1;  // max |N_i|
  double sigma = 0.0;   // noise standard deviation
};

inline void validate(const VarianceBoundInputs& in) {
  detail::require(in.n >= 1 && in.beta >= 1 && in.d_m >= 1 && in.d_n >= 1,
                  "VarianceBoundInputs: counts must be >= 1");
  if (!(in.p > 0.0 && in.p < 1.0)) throw PositivityViolation("VarianceBoundInputs: p must be in (0, 1)");
  detail::require(in.sigma >= 0.0, "VarianceBoundInputs: sigma must be >= 0");
}

// Signal term (1/n) Y_max^2 (p(1-p))^-beta d_M^(beta+1) d_N^(beta+1) plus
// noise term (sigma^2/n) d_M^(2 beta) d_N^(-beta) (p(1-p))^-beta.
// The noise term's d_N exponent is taken as published even though it makes
// the bound shrink in the true degree.
inline double variance_upper_bound(const VarianceBoundInputs& in) {
  validate(in);
  const double n = static_cast<double>(in.n);
  const double b = static_cast<double>(in.beta);
  const double dm = static_cast<double>(in.d_m);
  const double dn = static_cast<double>(in.d_n);
  const double inv_pq = std::pow(in.p * (1.0 - in.p), -b);
  const double signal = in.y_max * in.y_max / n * inv_pq * std::pow(dm, b + 1.0) * std::pow(dn, b + 1.0);
  const double noise = in.sigma * in.sigma / n * std::pow(dm, 2.0 * b) * std::pow(dn, -b) * inv_pq;
  return signal + noise;
}

struct Interval {
  double lo;
  double hi;
};

inline double normal_quantile(double q) {
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), q);
}

inline Interval wald_interval(double estimate, double variance_bound, double alpha) {
  detail::require(alpha > 0.0 && alpha < 1.0, "wald_interval: alpha must be in (0, 1)");
  detail::require(variance_bound >= 0.0, "wald_interval: variance must be >= 0");
  const double half = normal_quantile(1.0 - alpha / 2.0) * std::sqrt(variance_bound);
  return {estimate - half, estimate + half};
}

// C max(p, 1-p) / (k+1)!
inline double bias_bound_nonlinear(double c, std::size_t k, double p) {
  detail::require(k >= 1, "bias_bound_nonlinear: k must be >= 1");
  detail::require(c >= 0.0, "bias_bound_nonlinear: C must be >= 0");
  return c * std::max(p, 1.0 - p) / factorial(k + 1);
}

// Bound C on the (k+1)-th directional derivative D^(k+1) g_i[z, ..., z]
// over the unit cube for a multilinear motif model whose Taylor remainder
// after order k consists exactly of its size-(k+1) motifs: each such
// monomial contributes (k+1)! |c_{i,S}|. Motifs larger than k+1 are rejected.
inline double remainder_derivative_bound(const MotifModel& m, std::size_t k) {
  double c = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    double node = 0.0;
    for (const auto& mo : m.motifs[i]) {
      if (mo.set.size() > k + 1) {
        throw ArgumentError("remainder_derivative_bound: motif larger than k+1");
      }
      if (mo.set.size() == k + 1) node += std::abs(mo.c);
    }
    c = std::max(c, node * factorial(k + 1));
  }
  return c;
}

// ============================================================================
// EstimateReport
// ============================================================================

struct EstimateReport {
  EstimatorId estimator_id = EstimatorId::unite_lin;
  double estimate = 0.0;
  std::optional<double> variance_bound;
  std::optional<Interval> interval;
  double alpha = 0.05;
};

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Estimate with a conservative Wald interval. Without the true graph the
// true degree is bounded by max |M_i|, valid whenever M covers N.
inline EstimateReport report_with_interval(EstimatorId id, double estimate,
                                           const VarianceBoundInputs& in, double alpha) {
  EstimateReport r;
  r.estimator_id = id;
  r.estimate = estimate;
  r.alpha = alpha;
  r.variance_bound = variance_upper_bound(in);
  r.interval = wald_interval(estimate, *r.variance_bound, alpha);
  return r;
}

}  // namespace unite
