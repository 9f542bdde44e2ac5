#pragma once

// GATE estimators over observed (Y, z) and a neighborhood model M.
//
// With rho_j = z_j / p and rho'_j = (1 - z_j) / (1 - p), the UNITE family
// weights each outcome by a bracket over subsets S of M_i with |S| <= beta:
//
//   w_i = sum_S prod_{j in S} (rho_j - 1) - prod_{j in S} (rho'_j - 1)
//
// The inner sums are elementary symmetric polynomials of the per-node
// factors, so w_i costs O(|M_i| * beta) rather than C(|M_i|, beta).
// For beta = 1 the bracket collapses to sum_j (rho_j - rho'_j), which is
// also the linear weight; the first-order term is always computed in that
// form.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unite/assign.hpp"
#include "unite/errors.hpp"
#include "unite/graph.hpp"

namespace unite {

enum class EstimatorId {
  ht,
  unite_lin,
  unite_wis1,
  unite_dr,
  unite_beta,
  unite_beta_wis,
  unite_beta_dr,
  dm,
  poly,
};

inline constexpr EstimatorId kAllEstimators[] = {
    EstimatorId::ht,         EstimatorId::unite_lin,      EstimatorId::unite_wis1,
    EstimatorId::unite_dr,   EstimatorId::unite_beta,     EstimatorId::unite_beta_wis,
    EstimatorId::unite_beta_dr, EstimatorId::dm,          EstimatorId::poly,
};

inline std::string_view to_string(EstimatorId id) {
  switch (id) {
    case EstimatorId::ht: return "ht";
    case EstimatorId::unite_lin: return "unite_lin";
    case EstimatorId::unite_wis1: return "unite_wis1";
    case EstimatorId::unite_dr: return "unite_dr";
    case EstimatorId::unite_beta: return "unite_beta";
    case EstimatorId::unite_beta_wis: return "unite_beta_wis";
    case EstimatorId::unite_beta_dr: return "unite_beta_dr";
    case EstimatorId::dm: return "dm";
    case EstimatorId::poly: return "poly";
  }
  return "?";
}

inline std::optional<EstimatorId> parse_estimator(std::string_view s) {
  for (auto id : kAllEstimators)
    if (to_string(id) == s) return id;
  return std::nullopt;
}

inline bool is_self_normalized(EstimatorId id) {
  return id == EstimatorId::unite_wis1 || id == EstimatorId::unite_beta_wis;
}

// ============================================================================
// Weights
// ============================================================================

struct Weights {
  std::vector<double> rho;
  std::vector<double> rho_prime;
  bool normalized = false;
  double denom = 1.0;        // D
  double denom_prime = 1.0;  // D'
};

inline constexpr double kDegenerateTolerance = 1e-12;

inline Weights raw_weights(const Assignment& z) {
  const double p = z.p();
  Weights w;
  w.rho.resize(z.size());
  w.rho_prime.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double zi = static_cast<double>(z[i]);
    w.rho[i] = zi / p;
    w.rho_prime[i] = (1.0 - zi) / (1.0 - p);
  }
  return w;
}

// rho / D and rho' / D' with D = (1/n) sum_j (1/|M_j|) sum_{k in M_j} rho_k.
inline Weights normalized_weights(const Assignment& z, const NeighborhoodModel& m) {
  detail::require_same_size(z.size(), m.size(), "normalized_weights");
  Weights w = raw_weights(z);
  const std::size_t n = m.size();
  double d = 0.0, dp = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& mj = m.candidates(j);
    double s = 0.0, sp = 0.0;
    for (auto k : mj) {
      s += w.rho[k];
      sp += w.rho_prime[k];
    }
    d += s / static_cast<double>(mj.size());
    dp += sp / static_cast<double>(mj.size());
  }
  d /= static_cast<double>(n);
  dp /= static_cast<double>(n);
  if (d <= kDegenerateTolerance || dp <= kDegenerateTolerance) {
    throw DegenerateAssignment("normalized_weights: empty " +
                               std::string(d <= kDegenerateTolerance ? "treatment" : "control") +
                               " arm, self-normalizer vanished");
  }
  for (auto& r : w.rho) r /= d;
  for (auto& r : w.rho_prime) r /= dp;
  w.normalized = true;
  w.denom = d;
  w.denom_prime = dp;
  return w;
}

// ============================================================================
// Symmetric polynomials and the motif bracket
// ============================================================================

// e_0..e_top of `values`, top = min(beta, |values|).
inline std::vector<double> elementary_symmetric(std::span<const double> values, std::size_t beta) {
  const std::size_t top = std::min(beta, values.size());
  std::vector<double> e(top + 1, 0.0);
  e[0] = 1.0;
  std::size_t seen = 0;
  for (double v : values) {
    ++seen;
    for (std::size_t r = std::min(top, seen); r >= 1; --r) e[r] += e[r - 1] * v;
  }
  return e;
}

// e_1 + ... + e_min(beta, len).
inline double sym_poly_partial_sums(std::span<const double> values, std::size_t beta) {
  detail::require(beta >= 1, "sym_poly_partial_sums: beta must be >= 1");
  const auto e = elementary_symmetric(values, beta);
  double s = 0.0;
  for (std::size_t r = 1; r < e.size(); ++r) s += e[r];
  return s;
}

namespace detail {

inline double motif_bracket(const NodeSet& mi, const Weights& w, std::size_t beta,
                            std::vector<double>& a, std::vector<double>& b) {
  double first = 0.0;
  for (auto j : mi) first += w.rho[j] - w.rho_prime[j];
  if (beta == 1) return first;
  a.clear();
  b.clear();
  for (auto j : mi) {
    a.push_back(w.rho[j] - 1.0);
    b.push_back(w.rho_prime[j] - 1.0);
  }
  const auto ea = elementary_symmetric(a, beta);
  const auto eb = elementary_symmetric(b, beta);
  double higher = 0.0;
  for (std::size_t r = 2; r < ea.size(); ++r) higher += ea[r] - eb[r];
  return first + higher;
}

inline std::vector<double> motif_brackets(const NeighborhoodModel& m, const Weights& w,
                                          std::size_t beta) {
  require(beta >= 1, "beta must be >= 1");
  std::vector<double> out(m.size());
  std::vector<double> a, b;
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = motif_bracket(m.candidates(i), w, beta, a, b);
  return out;
}

inline double weighted_mean(std::span<const double> y, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * w[i];
  return s / static_cast<double>(y.size());
}

inline void check_inputs(std::span<const double> y, const Assignment& z, const NeighborhoodModel& m,
                         const char* what) {
  require_same_size(y.size(), z.size(), what);
  require_same_size(y.size(), m.size(), what);
  require(!y.empty(), std::string(what) + ": empty input");
}

}  // namespace detail

// ============================================================================
// Estimators
// ============================================================================

// Exposure products over the supplied neighborhoods.
inline double horvitz_thompson(std::span<const double> y, const Assignment& z,
                               const NeighborhoodModel& nb) {
  detail::check_inputs(y, z, nb, "horvitz_thompson");
  const double p = z.p();
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double treat = 1.0, ctrl = 1.0;
    for (auto j : nb.candidates(i)) {
      const double zj = static_cast<double>(z[j]);
      treat *= zj / p;
      ctrl *= (1.0 - zj) / (1.0 - p);
    }
    s += y[i] * (treat - ctrl);
  }
  return s / static_cast<double>(y.size());
}

inline double unite_beta(std::span<const double> y, const Assignment& z, const NeighborhoodModel& m,
                         std::size_t beta) {
  detail::check_inputs(y, z, m, "unite_beta");
  const auto w = detail::motif_brackets(m, raw_weights(z), beta);
  return detail::weighted_mean(y, w);
}

inline double unite_lin(std::span<const double> y, const Assignment& z, const NeighborhoodModel& m) {
  return unite_beta(y, z, m, 1);
}

inline double unite_beta_wis(std::span<const double> y, const Assignment& z,
                             const NeighborhoodModel& m, std::size_t beta) {
  detail::check_inputs(y, z, m, "unite_beta_wis");
  const auto w = detail::motif_brackets(m, normalized_weights(z, m), beta);
  return detail::weighted_mean(y, w);
}

inline double unite_wis1(std::span<const double> y, const Assignment& z, const NeighborhoodModel& m) {
  return unite_beta_wis(y, z, m, 1);
}

// (1/n) sum_i [f1_i - f0_i + (Y_i - f1_i) sum_{M_i} rho_j - (Y_i - f0_i) sum_{M_i} rho'_j]
inline double unite_dr(std::span<const double> y, const Assignment& z, const NeighborhoodModel& m,
                       std::span<const double> f0, std::span<const double> f1) {
  detail::check_inputs(y, z, m, "unite_dr");
  detail::require_same_size(f0.size(), y.size(), "unite_dr: f0");
  detail::require_same_size(f1.size(), y.size(), "unite_dr: f1");
  const auto w = raw_weights(z);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double sr = 0.0, srp = 0.0;
    for (auto j : m.candidates(i)) {
      sr += w.rho[j];
      srp += w.rho_prime[j];
    }
    s += f1[i] - f0[i] + (y[i] - f1[i]) * sr - (y[i] - f0[i]) * srp;
  }
  return s / static_cast<double>(y.size());
}

// Residual Y~_i = Y_i - z_i f1_i - (1 - z_i) f0_i weighted by the beta
// bracket, plus the model-implied effect (1/n) sum (f1 - f0).
inline double unite_beta_dr(std::span<const double> y, const Assignment& z,
                            const NeighborhoodModel& m, std::size_t beta,
                            std::span<const double> f0, std::span<const double> f1) {
  detail::check_inputs(y, z, m, "unite_beta_dr");
  detail::require_same_size(f0.size(), y.size(), "unite_beta_dr: f0");
  detail::require_same_size(f1.size(), y.size(), "unite_beta_dr: f1");
  const auto w = detail::motif_brackets(m, raw_weights(z), beta);
  const std::size_t n = y.size();
  std::vector<double> resid(n);
  double model_effect = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double zi = static_cast<double>(z[i]);
    resid[i] = y[i] - zi * f1[i] - (1.0 - zi) * f0[i];
    model_effect += f1[i] - f0[i];
  }
  return detail::weighted_mean(resid, w) + model_effect / static_cast<double>(n);
}

inline double difference_in_means(std::span<const double> y, const Assignment& z) {
  detail::require_same_size(y.size(), z.size(), "difference_in_means");
  double s1 = 0.0, s0 = 0.0;
  std::size_t n1 = 0, n0 = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (z[i]) {
      s1 += y[i];
      ++n1;
    } else {
      s0 += y[i];
      ++n0;
    }
  }
  if (n1 == 0 || n0 == 0) throw DegenerateAssignment("difference_in_means: empty arm");
  return s1 / static_cast<double>(n1) - s0 / static_cast<double>(n0);
}

// Fraction of treated non-self true neighbors; 0 for isolated nodes.
inline std::vector<double> treated_neighbor_fraction(const Assignment& z, const InterferenceGraph& g) {
  std::vector<double> t(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& nb = g.neighbors(i);
    if (nb.size() <= 1) continue;
    double c = 0.0;
    for (auto j : nb)
      if (j != i) c += static_cast<double>(z[j]);
    t[i] = c / static_cast<double>(nb.size() - 1);
  }
  return t;
}

// OLS of Y on [1, z, t] (degree 1) or [1, z, t, t^2, z t] (degree 2) using
// the true graph; returns prediction at (z=1, t=1) minus at (z=0, t=0).
inline double poly_regression_oracle(std::span<const double> y, const Assignment& z,
                                     const InterferenceGraph& g, std::size_t degree) {
  detail::require_same_size(y.size(), z.size(), "poly_regression_oracle");
  detail::require_same_size(y.size(), g.size(), "poly_regression_oracle");
  detail::require(degree == 1 || degree == 2, "poly_regression_oracle: degree must be 1 or 2");
  const auto n = static_cast<Eigen::Index>(y.size());
  const Eigen::Index k = degree == 1 ? 3 : 5;
  const auto t = treated_neighbor_fraction(z, g);
  Eigen::MatrixXd x(n, k);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double zi = static_cast<double>(z[ui]);
    x(i, 0) = 1.0;
    x(i, 1) = zi;
    x(i, 2) = t[ui];
    if (degree == 2) {
      x(i, 3) = t[ui] * t[ui];
      x(i, 4) = zi * t[ui];
    }
    rhs(i) = y[ui];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) {
    throw RankDeficient("poly_regression_oracle: design matrix rank " + std::to_string(qr.rank()) +
                        " < " + std::to_string(k));
  }
  const Eigen::VectorXd coef = qr.solve(rhs);
  double effect = coef(1) + coef(2);
  if (degree == 2) effect += coef(3) + coef(4);
  return effect;
}

// ============================================================================
// Outcome-model helpers for the doubly robust estimators
// ============================================================================

struct ArmModels {
  std::vector<double> f0;
  std::vector<double> f1;
};

// Constant-per-arm models: f1 = mean(Y | z=1), f0 = mean(Y | z=0).
inline ArmModels fit_constant_arms(std::span<const double> y, const Assignment& z) {
  detail::require_same_size(y.size(), z.size(), "fit_constant_arms");
  double s1 = 0.0, s0 = 0.0;
  std::size_t n1 = 0, n0 = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (z[i]) {
      s1 += y[i];
      ++n1;
    } else {
      s0 += y[i];
      ++n0;
    }
  }
  if (n1 == 0 || n0 == 0) throw DegenerateAssignment("fit_constant_arms: empty arm");
  return {std::vector<double>(y.size(), s0 / static_cast<double>(n0)),
          std::vector<double>(y.size(), s1 / static_cast<double>(n1))};
}

// f0 = f1 = mean(Y). The first-order DR form is unbiased only when f0 = f1.
inline ArmModels fit_pooled_constant(std::span<const double> y) {
  detail::require(!y.empty(), "fit_pooled_constant: empty input");
  double s = 0.0;
  for (double v : y) s += v;
  const double mean = s / static_cast<double>(y.size());
  return {std::vector<double>(y.size(), mean), std::vector<double>(y.size(), mean)};
}

// ============================================================================
// Dispatch
// ============================================================================

struct EstimatorOptions {
  std::size_t beta = 1;
  // When empty, unite_dr uses fit_pooled_constant and unite_beta_dr uses
  // fit_constant_arms on the observed data.
  std::optional<ArmModels> arms;
  // Required by poly.
  const InterferenceGraph* graph = nullptr;
  std::size_t poly_degree = 2;
};

inline double estimate(EstimatorId id, std::span<const double> y, const Assignment& z,
                       const NeighborhoodModel& m, const EstimatorOptions& opt = {}) {
  switch (id) {
    case EstimatorId::ht: return horvitz_thompson(y, z, m);
    case EstimatorId::unite_lin: return unite_lin(y, z, m);
    case EstimatorId::unite_wis1: return unite_wis1(y, z, m);
    case EstimatorId::unite_beta: return unite_beta(y, z, m, opt.beta);
    case EstimatorId::unite_beta_wis: return unite_beta_wis(y, z, m, opt.beta);
    case EstimatorId::unite_dr: {
      const auto arms = opt.arms ? *opt.arms : fit_pooled_constant(y);
      return unite_dr(y, z, m, arms.f0, arms.f1);
    }
    case EstimatorId::unite_beta_dr: {
      const auto arms = opt.arms ? *opt.arms : fit_constant_arms(y, z);
      return unite_beta_dr(y, z, m, opt.beta, arms.f0, arms.f1);
    }
    case EstimatorId::dm: return difference_in_means(y, z);
    case EstimatorId::poly:
      if (opt.graph == nullptr) throw ArgumentError("poly estimator requires the true graph");
      return poly_regression_oracle(y, z, *opt.graph, opt.poly_degree);
  }
  throw ArgumentError("unknown estimator");
}

}  // namespace unite
