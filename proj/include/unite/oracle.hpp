#pragma once

// Exact verification by enumerating all 2^n Bernoulli(p) assignments.
//
// Everything here recomputes its quantities by brute force and never goes
// through the symmetric-polynomial path, so it can serve as an independent
// check on the estimators.

#include <algorithm>
#include <bit>
#include <cmath>
#include <iterator>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "unite/assign.hpp"
#include "unite/combinatorics.hpp"
#include "unite/errors.hpp"
#include "unite/estimators.hpp"
#include "unite/graph.hpp"
#include "unite/outcomes.hpp"

namespace unite {

inline constexpr std::size_t kEnumerationCap = 24;

struct EnumerationResult {
  double expectation = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
  double skipped_mass = 0.0;    // probability of assignments the estimator rejected
  std::size_t skipped = 0;
};

namespace detail {

inline std::vector<std::uint8_t> bits_of(std::uint64_t mask, std::size_t n) {
  std::vector<std::uint8_t> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = static_cast<std::uint8_t>((mask >> i) & 1U);
  return z;
}

inline double assignment_probability(std::uint64_t mask, std::size_t n, double p) {
  const auto k = static_cast<double>(std::popcount(mask));
  return std::pow(p, k) * std::pow(1.0 - p, static_cast<double>(n) - k);
}

inline bool skips_degenerate(EstimatorId id, const EstimatorOptions& opt) {
  return is_self_normalized(id) || id == EstimatorId::dm ||
         (id == EstimatorId::unite_beta_dr && !opt.arms);
}

}  // namespace detail

// Exact mean and variance of an estimator over the Bernoulli(p) design on a
// noise-free model. Estimators that need both arms (self-normalized, dm)
// are conditioned on the assignments where they are defined; the excluded
// probability mass is reported.
inline EnumerationResult enumerate_estimator(EstimatorId id, const OutcomeModel& model,
                                             const InterferenceGraph& g, const NeighborhoodModel& m,
                                             double p, const EstimatorOptions& opt = {}) {
  const std::size_t n = g.size();
  if (n > kEnumerationCap) {
    throw ArgumentError("enumerate_estimator: n=" + std::to_string(n) + " exceeds cap " +
                        std::to_string(kEnumerationCap));
  }
  detail::require_same_size(m.size(), n, "enumerate_estimator: neighborhoods");
  if (!(p > 0.0 && p < 1.0)) throw PositivityViolation("enumerate_estimator: p must be in (0, 1)");
  validate(model, g);
  EstimatorOptions local = opt;
  if (local.graph == nullptr) local.graph = &g;
  EnumerationResult r;
  double valid_mass = 0.0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    const double prob = detail::assignment_probability(mask, n, p);
    Assignment z(detail::bits_of(mask, n), p);
    const auto y = potential_outcomes(model, g, z.z());
    double est;
    try {
      est = estimate(id, y, z, m, local);
    } catch (const DegenerateAssignment&) {
      if (!detail::skips_degenerate(id, local)) throw;
      r.skipped_mass += prob;
      ++r.skipped;
      continue;
    }
    valid_mass += prob;
    r.expectation += prob * est;
    r.second_moment += prob * est * est;
  }
  r.expectation /= valid_mass;
  r.second_moment /= valid_mass;
  r.variance = std::max(0.0, r.second_moment - r.expectation * r.expectation);
  return r;
}

inline double exact_expectation(EstimatorId id, const OutcomeModel& model, const InterferenceGraph& g,
                                const NeighborhoodModel& m, double p,
                                const EstimatorOptions& opt = {}) {
  return enumerate_estimator(id, model, g, m, p, opt).expectation;
}

inline double exact_variance(EstimatorId id, const OutcomeModel& model, const InterferenceGraph& g,
                             const NeighborhoodModel& m, double p, const EstimatorOptions& opt = {}) {
  return enumerate_estimator(id, model, g, m, p, opt).variance;
}

// max_i |Y_i(z)| over every assignment.
inline double enumerate_y_max(const OutcomeModel& model, const InterferenceGraph& g) {
  const std::size_t n = g.size();
  if (n > kEnumerationCap) throw ArgumentError("enumerate_y_max: n exceeds cap");
  double ymax = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    const auto y = potential_outcomes(model, g, detail::bits_of(mask, n));
    for (double v : y) ymax = std::max(ymax, std::abs(v));
  }
  return ymax;
}

// beta-bracket computed by explicit enumeration of subsets S of M_i.
inline double unite_beta_by_subsets(std::span<const double> y, const Assignment& z,
                                    const NeighborhoodModel& m, std::size_t beta) {
  const double p = z.p();
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double w = 0.0;
    for (const auto& set : subsets_up_to(m.candidates(i), beta)) {
      double a = 1.0, b = 1.0;
      for (auto j : set) {
        const double zj = static_cast<double>(z[j]);
        a *= (zj - p) / p;
        b *= (p - zj) / (1.0 - p);
      }
      w += a - b;
    }
    s += y[i] * w;
  }
  return s / static_cast<double>(y.size());
}

// ============================================================================
// Attenuation under a neighborhood model that misses true neighbors
// ============================================================================

// E[prod_{S'} z_k * bracket_beta(M_i)] for |S'| = s, |S' cap M_i| = m:
//   p^s sum_{r=1}^{min(beta, m)} C(m, r) [((1-p)/p)^r - (-1)^r]
// which reduces to p^(s-m) when 1 <= m <= beta and to 0 when m = 0.
inline double attenuation_factor(std::size_t s, std::size_t m, double p, std::size_t beta) {
  if (m == 0) return 0.0;
  if (m <= beta) return std::pow(p, static_cast<double>(s - m));
  const double q = (1.0 - p) / p;
  double acc = 0.0;
  for (std::size_t r = 1; r <= std::min(beta, m); ++r) {
    const double sign = (r % 2 == 0) ? 1.0 : -1.0;
    acc += binomial(m, r) * (std::pow(q, static_cast<double>(r)) - sign);
  }
  return std::pow(p, static_cast<double>(s)) * acc;
}

// Closed-form E[unite_beta] for a motif model: each coefficient c_{i,S'} is
// scaled by attenuation_factor(|S'|, |S' cap M_i|).
inline double attenuation_expectation(const MotifModel& model, const NeighborhoodModel& m,
                                      double p, std::size_t beta) {
  detail::require_same_size(model.size(), m.size(), "attenuation_expectation");
  if (!(p > 0.0 && p < 1.0)) throw PositivityViolation("attenuation_expectation: p must be in (0, 1)");
  double total = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    for (const auto& mo : model.motifs[i]) {
      const auto inter = set_intersection(mo.set, m.candidates(i)).size();
      total += mo.c * attenuation_factor(mo.set.size(), inter, p, beta);
    }
  }
  return total / static_cast<double>(model.size());
}

// ============================================================================
// Lemma checks
// ============================================================================

enum class LemmaId {
  exp_prod,       // E[prod_S (z/p - (1-z)/(1-p)) prod_S' f(z)]
  corollary,      // exp_prod with f(z) = z
  help_beta,      // E[prod_S f_i(z_i) prod_S' (z - p)/p]
  help_beta_ctrl, // E[prod_S f_i(z_i) prod_S' (p - z)/(1 - p)]
  help_beta2,     // E[prod_S' z_k * bracket_beta(M)], M passed as `s`
  help_beta_cov,  // E[prod_T f_i prod_S (z-p)/p prod_S' (p-z)/(1-p)]
};

inline std::string_view to_string(LemmaId id) {
  switch (id) {
    case LemmaId::exp_prod: return "exp_prod";
    case LemmaId::corollary: return "corollary";
    case LemmaId::help_beta: return "help_beta";
    case LemmaId::help_beta_ctrl: return "help_beta_ctrl";
    case LemmaId::help_beta2: return "help_beta2";
    case LemmaId::help_beta_cov: return "help_beta_cov";
  }
  return "?";
}

// f(z) = a + b z
struct Affine {
  double a = 0.0;
  double b = 1.0;
  double operator()(double z) const { return a + b * z; }
  double mean(double p) const { return a + b * p; }
};

struct LemmaCase {
  LemmaId lemma = LemmaId::exp_prod;
  NodeSet s;
  NodeSet s_prime;
  NodeSet t;            // help_beta_cov only
  double p = 0.5;
  std::size_t n = 1;
  std::size_t beta = 1;  // help_beta2 only
  // Function per index (indexed by node); exp_prod uses f[0] for every index.
  std::vector<Affine> f;
};

struct LemmaValues {
  double lhs;
  double rhs;
};

namespace detail {

inline const Affine& f_at(const LemmaCase& c, std::size_t idx) {
  if (c.f.empty()) {
    static const Affine identity{};
    return identity;
  }
  return c.lemma == LemmaId::exp_prod ? c.f[0] : c.f.at(idx);
}

inline double lemma_integrand(const LemmaCase& c, const std::vector<std::uint8_t>& z) {
  const double p = c.p;
  auto ratio = [&](std::size_t j) {
    const double zj = z[j];
    return zj / p - (1.0 - zj) / (1.0 - p);
  };
  auto up = [&](std::size_t j) { return (z[j] - p) / p; };
  auto down = [&](std::size_t j) { return (p - z[j]) / (1.0 - p); };
  double v = 1.0;
  switch (c.lemma) {
    case LemmaId::exp_prod:
      for (auto j : c.s) v *= ratio(j);
      for (auto j : c.s_prime) v *= f_at(c, j)(z[j]);
      return v;
    case LemmaId::corollary:
      for (auto j : c.s) v *= ratio(j);
      for (auto j : c.s_prime) v *= z[j];
      return v;
    case LemmaId::help_beta:
      for (auto j : c.s) v *= f_at(c, j)(z[j]);
      for (auto j : c.s_prime) v *= up(j);
      return v;
    case LemmaId::help_beta_ctrl:
      for (auto j : c.s) v *= f_at(c, j)(z[j]);
      for (auto j : c.s_prime) v *= down(j);
      return v;
    case LemmaId::help_beta2: {
      for (auto k : c.s_prime) v *= z[k];
      double bracket = 0.0;
      for (const auto& set : subsets_up_to(c.s, c.beta)) {
        double a = 1.0, b = 1.0;
        for (auto j : set) {
          a *= up(j);
          b *= down(j);
        }
        bracket += a - b;
      }
      return v * bracket;
    }
    case LemmaId::help_beta_cov:
      for (auto j : c.t) v *= f_at(c, j)(z[j]);
      for (auto j : c.s) v *= up(j);
      for (auto j : c.s_prime) v *= down(j);
      return v;
  }
  return 0.0;
}

inline double lemma_closed_form(const LemmaCase& c) {
  const double p = c.p;
  switch (c.lemma) {
    case LemmaId::exp_prod: {
      if (!is_subset(c.s, c.s_prime)) return 0.0;
      const auto& f = f_at(c, 0);
      const auto both = set_intersection(c.s, c.s_prime).size();
      const auto only = set_difference(c.s_prime, c.s).size();
      return std::pow(f(1.0) - f(0.0), static_cast<double>(both)) *
             std::pow(f.mean(p), static_cast<double>(only));
    }
    case LemmaId::corollary:
      if (!is_subset(c.s, c.s_prime)) return 0.0;
      return std::pow(p, static_cast<double>(set_difference(c.s_prime, c.s).size()));
    case LemmaId::help_beta:
    case LemmaId::help_beta_ctrl: {
      if (!is_subset(c.s_prime, c.s)) return 0.0;
      double v = 1.0;
      for (auto i : set_difference(c.s, c.s_prime)) v *= f_at(c, i).mean(p);
      for (auto k : set_intersection(c.s, c.s_prime)) {
        const auto& f = f_at(c, k);
        v *= c.lemma == LemmaId::help_beta ? (1.0 - p) * (f(1.0) - f(0.0)) : p * (f(0.0) - f(1.0));
      }
      return v;
    }
    case LemmaId::help_beta2: {
      const auto m = set_intersection(c.s_prime, c.s).size();
      if (c.s_prime.empty()) return 0.0;
      if (is_subset(c.s_prime, c.s) && c.s_prime.size() <= c.beta) return 1.0;
      return attenuation_factor(c.s_prime.size(), m, p, c.beta);
    }
    case LemmaId::help_beta_cov: {
      NodeSet sym;
      std::set_symmetric_difference(c.s.begin(), c.s.end(), c.s_prime.begin(), c.s_prime.end(),
                                    std::back_inserter(sym));
      if (!is_subset(sym, c.t)) return 0.0;
      NodeSet s_or;
      std::set_union(c.s.begin(), c.s.end(), c.s_prime.begin(), c.s_prime.end(),
                     std::back_inserter(s_or));
      const auto s_and = set_intersection(c.s, c.s_prime);
      double v = 1.0;
      for (auto i : set_difference(c.t, s_or)) v *= f_at(c, i).mean(p);
      for (auto i : set_difference(set_intersection(c.t, c.s), c.s_prime)) {
        const auto& f = f_at(c, i);
        v *= (1.0 - p) * (f(1.0) - f(0.0));
      }
      for (auto i : set_difference(set_intersection(c.t, c.s_prime), c.s)) {
        const auto& f = f_at(c, i);
        v *= p * (f(0.0) - f(1.0));
      }
      for (auto i : set_intersection(c.t, s_and)) {
        const auto& f = f_at(c, i);
        v *= -(p * f(0.0) + (1.0 - p) * f(1.0));
      }
      for ([[maybe_unused]] auto i : set_difference(s_and, c.t)) v *= -1.0;
      return v;
    }
  }
  return 0.0;
}

}  // namespace detail

inline LemmaValues lemma_check(const LemmaCase& c) {
  detail::require(c.n <= 20, "lemma_check: n must be <= 20");
  if (!(c.p > 0.0 && c.p < 1.0)) throw PositivityViolation("lemma_check: p must be in (0, 1)");
  for (const auto* set : {&c.s, &c.s_prime, &c.t}) {
    for (auto j : *set) detail::require(j < c.n, "lemma_check: index outside [n]");
    detail::require(std::is_sorted(set->begin(), set->end()), "lemma_check: sets must be sorted");
  }
  double lhs = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << c.n); ++mask) {
    const auto z = detail::bits_of(mask, c.n);
    lhs += detail::assignment_probability(mask, c.n, c.p) * detail::lemma_integrand(c, z);
  }
  return {lhs, detail::lemma_closed_form(c)};
}

}  // namespace unite
