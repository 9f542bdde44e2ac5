#pragma once

// Randomized oracle checks: each check draws small instances, compares a
// library result against exact enumeration (or another independent path),
// and reports the worst discrepancy.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "unite/estimators.hpp"
#include "unite/graph.hpp"
#include "unite/inference.hpp"
#include "unite/oracle.hpp"
#include "unite/outcomes.hpp"
#include "unite/random.hpp"

namespace unite {

struct CheckResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double max_error = 0.0;  // worst observed discrepancy (or bound violation)
  double tolerance = 0.0;
  std::string first_failure;

  bool passed() const { return failures == 0 && cases > 0; }
};

struct VerifyOptions {
  std::size_t n_max = 12;
  std::size_t cases = 100;
  std::uint64_t seed = 20240601;
};

namespace verify {

// Random graph with at most `max_degree` non-self neighbors per node.
inline InterferenceGraph random_bounded_graph(std::size_t n, std::size_t max_degree, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double q = 0.15 + 0.6 * unit(rng);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  std::vector<std::size_t> deg(n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (auto [i, j] : pairs) {
    if (unit(rng) >= q || deg[i] >= max_degree || deg[j] >= max_degree) continue;
    ++deg[i];
    ++deg[j];
    edges.emplace_back(i, j);
  }
  return InterferenceGraph::from_edges(n, edges);
}

// N plus each non-member with a random per-instance probability.
inline NeighborhoodModel random_superset(const InterferenceGraph& g, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double extra = 0.4 * unit(rng);
  auto sets = g.sets();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      if (!g.contains(i, j) && unit(rng) < extra) sets[i].push_back(j);
  return NeighborhoodModel(std::move(sets));
}

// Deletes each non-self member with probability 1/2 and adds a few
// non-members, so M is in general neither a subset nor a superset of N.
inline NeighborhoodModel random_misspecified(const InterferenceGraph& g, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<NodeSet> sets(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (j == i) continue;
      if (g.contains(i, j) ? unit(rng) < 0.5 : unit(rng) < 0.1) sets[i].push_back(j);
    }
  }
  return NeighborhoodModel(std::move(sets));
}

// Indirect ratio 1 when the graph has edges, 0 otherwise.
inline double ratio_for(const InterferenceGraph& g) { return max_degree(g) > 1 ? 1.0 : 0.0; }

inline double random_p(Rng& rng) { return std::uniform_real_distribution<double>(0.25, 0.75)(rng); }

inline std::size_t random_n(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, std::max(lo, hi))(rng);
}

inline void record(CheckResult& c, double err, const std::string& what) {
  ++c.cases;
  if (std::isnan(err)) err = std::numeric_limits<double>::infinity();
  c.max_error = std::max(c.max_error, err);
  if (err > c.tolerance) {
    ++c.failures;
    if (c.first_failure.empty()) c.first_failure = what;
  }
}

}  // namespace verify

// Enumeration expectation equals the GATE for every estimator with an
// unbiasedness guarantee, on noiseless linear and motif models with M ⊇ N.
inline CheckResult check_unbiasedness(const VerifyOptions& o) {
  CheckResult c{"unbiasedness", 0, 0, 0.0, 1e-10, {}};
  Rng rng(derive_seed(o.seed, Stream::oracle, {1}));
  for (std::size_t k = 0; k < o.cases; ++k) {
    const auto n = verify::random_n(rng, 2, o.n_max);
    const auto g = verify::random_bounded_graph(n, 5, rng);
    const auto m = verify::random_superset(g, rng);
    const double p = verify::random_p(rng);
    const std::size_t order = k % 4 == 0 ? 1 : (k % 3) + 1;  // model motif order
    const bool linear = k % 2 == 0;
    const auto seed = rng();
    const OutcomeModel model = linear ? OutcomeModel(sample_linear_model(g, verify::ratio_for(g), seed))
                                      : OutcomeModel(sample_motif_model(g, order, verify::ratio_for(g), seed));
    const std::size_t beta0 = linear ? 1 : order;
    const double tau = gate_oracle(model, g);
    double worst = 0.0;
    std::string what;
    auto check = [&](EstimatorId id, const EstimatorOptions& opt, const std::string& label) {
      const double e = exact_expectation(id, model, g, m, p, opt);
      const double err = std::abs(e - tau);
      if (err > worst) {
        worst = err;
        what = label + " n=" + std::to_string(n) + " case " + std::to_string(k);
      }
    };
    EstimatorOptions opt;
    check(EstimatorId::ht, opt, "ht");
    if (beta0 == 1) {
      check(EstimatorId::unite_lin, opt, "unite_lin");
      EstimatorOptions dr;
      dr.arms = ArmModels{std::vector<double>(n, 7.0), std::vector<double>(n, 7.0)};
      check(EstimatorId::unite_dr, dr, "unite_dr");
    }
    for (std::size_t beta = beta0; beta <= 3; ++beta) {
      EstimatorOptions b;
      b.beta = beta;
      check(EstimatorId::unite_beta, b, "unite_beta(" + std::to_string(beta) + ")");
      b.arms = ArmModels{std::vector<double>(n, 7.0), std::vector<double>(n, -3.0)};
      check(EstimatorId::unite_beta_dr, b, "unite_beta_dr(" + std::to_string(beta) + ")");
    }
    verify::record(c, worst, what);
  }
  return c;
}

inline CheckResult check_beta_one_equivalence(const VerifyOptions& o, std::size_t inputs = 1000) {
  CheckResult c{"beta1_equals_lin", 0, 0, 0.0, 0.0, {}};
  Rng rng(derive_seed(o.seed, Stream::oracle, {2}));
  std::normal_distribution<double> normal(0.0, 3.0);
  for (std::size_t k = 0; k < inputs; ++k) {
    const auto n = verify::random_n(rng, 1, 60);
    const auto g = verify::random_bounded_graph(n, 8, rng);
    const auto m = k % 2 ? verify::random_superset(g, rng) : verify::random_misspecified(g, rng);
    const double p = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const auto z = bernoulli_assign(n, p, rng());
    std::vector<double> y(n);
    for (auto& v : y) v = normal(rng);
    const double a = unite_beta(y, z, m, 1), b = unite_lin(y, z, m);
    const bool same = a == b || (std::isnan(a) && std::isnan(b));
    verify::record(c, same ? 0.0 : std::abs(a - b) + 1e-300, "case " + std::to_string(k));
  }
  return c;
}

inline CheckResult check_symmetric_polynomial(const VerifyOptions& o) {
  CheckResult c{"sym_poly_vs_subsets", 0, 0, 0.0, 1e-12, {}};
  Rng rng(derive_seed(o.seed, Stream::oracle, {3}));
  std::normal_distribution<double> normal(0.0, 2.0);
  for (std::size_t k = 0; k < o.cases; ++k) {
    const auto n = verify::random_n(rng, 2, 14);
    const auto g = verify::random_bounded_graph(n, 9, rng);  // |M_i| <= 10
    const NeighborhoodModel m(g.sets());
    const double p = verify::random_p(rng);
    const auto z = bernoulli_assign(n, p, rng());
    std::vector<double> y(n);
    for (auto& v : y) v = normal(rng);
    const auto beta = verify::random_n(rng, 1, 4);
    const double a = unite_beta(y, z, m, beta);
    const double b = unite_beta_by_subsets(y, z, m, beta);
    verify::record(c, std::abs(a - b) / std::max(1.0, std::abs(b)),
                   "case " + std::to_string(k) + " beta " + std::to_string(beta));
  }
  return c;
}

inline LemmaCase random_lemma_case(LemmaId id, std::size_t n_max, Rng& rng) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  LemmaCase lc;
  lc.lemma = id;
  lc.n = verify::random_n(rng, 1, std::min<std::size_t>(n_max, 10));
  lc.p = verify::random_p(rng);
  lc.beta = verify::random_n(rng, 1, 3);
  auto subset = [&](double share) {
    NodeSet s;
    for (std::size_t j = 0; j < lc.n; ++j)
      if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < share) s.push_back(j);
    return s;
  };
  lc.s = subset(0.5);
  lc.s_prime = subset(0.5);
  lc.t = subset(0.6);
  // Bias draws toward the non-zero branches of the closed forms.
  const bool nest = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  if (nest) {
    switch (id) {
      case LemmaId::exp_prod:
      case LemmaId::corollary: lc.s = set_intersection(lc.s, lc.s_prime); break;
      case LemmaId::help_beta:
      case LemmaId::help_beta_ctrl:
      case LemmaId::help_beta2: lc.s_prime = set_intersection(lc.s_prime, lc.s); break;
      case LemmaId::help_beta_cov: {
        NodeSet sym;
        std::set_symmetric_difference(lc.s.begin(), lc.s.end(), lc.s_prime.begin(), lc.s_prime.end(),
                                      std::back_inserter(sym));
        NodeSet t;
        std::set_union(lc.t.begin(), lc.t.end(), sym.begin(), sym.end(), std::back_inserter(t));
        lc.t = t;
        break;
      }
    }
  }
  if (id == LemmaId::help_beta2 && nest && lc.s_prime.size() > lc.beta) lc.s_prime.resize(lc.beta);
  lc.f.resize(lc.n);
  for (auto& f : lc.f) f = Affine{coef(rng), coef(rng)};
  if (id == LemmaId::exp_prod && std::uniform_int_distribution<int>(0, 1)(rng)) {
    lc.f.assign(lc.n, Affine{1.0, 1.0});  // f(z) = 1 + z
  }
  return lc;
}

inline CheckResult check_lemma(LemmaId id, const VerifyOptions& o) {
  CheckResult c{"lemma_" + std::string(to_string(id)), 0, 0, 0.0, 1e-12, {}};
  Rng rng(derive_seed(o.seed, Stream::oracle, {4, static_cast<std::uint64_t>(id)}));
  for (std::size_t k = 0; k < o.cases; ++k) {
    const auto lc = random_lemma_case(id, o.n_max, rng);
    const auto v = lemma_check(lc);
    verify::record(c, std::abs(v.lhs - v.rhs), "case " + std::to_string(k));
  }
  return c;
}

// Closed-form attenuation vs enumeration for arbitrary (misspecified) M.
inline CheckResult check_attenuation(const VerifyOptions& o) {
  CheckResult c{"attenuation", 0, 0, 0.0, 1e-10, {}};
  {
    // Two mutually connected nodes, Y_0 = z_0 + z_1, Y_1 = z_1, M_i = {i}.
    std::vector<std::pair<std::size_t, std::size_t>> e{{0, 1}};
    const auto g = InterferenceGraph::from_edges(2, e);
    auto lin = zero_linear_model(g);
    lin.direct = {1.0, 1.0};
    indirect_coefficient(lin, 0, 1) = 1.0;
    const NeighborhoodModel self(std::vector<NodeSet>(2));
    const double enumerated = exact_expectation(EstimatorId::unite_lin, lin, g, self, 0.5);
    const double closed = attenuation_expectation(to_motif_model(lin), self, 0.5, 1);
    const double err = std::max({std::abs(enumerated - 1.0), std::abs(closed - 1.0),
                                 std::abs(gate_oracle(lin, g) - 1.5)});
    verify::record(c, err, "two-node case");
  }
  Rng rng(derive_seed(o.seed, Stream::oracle, {5}));
  for (std::size_t k = 0; k < o.cases; ++k) {
    const auto n = verify::random_n(rng, 2, std::min<std::size_t>(o.n_max, 10));
    const auto g = verify::random_bounded_graph(n, 5, rng);
    const auto m = verify::random_misspecified(g, rng);
    const double p = verify::random_p(rng);
    const auto order = verify::random_n(rng, 1, 3);
    const auto beta = verify::random_n(rng, 1, 3);
    const auto model = sample_motif_model(g, order, verify::ratio_for(g), rng());
    EstimatorOptions opt;
    opt.beta = beta;
    const double enumerated = exact_expectation(EstimatorId::unite_beta, model, g, m, p, opt);
    const double closed = attenuation_expectation(model, m, p, beta);
    verify::record(c, std::abs(enumerated - closed), "case " + std::to_string(k));
  }
  return c;
}

// Exact variance of unite_beta never exceeds the explicit bound.
inline CheckResult check_variance_dominance(const VerifyOptions& o) {
  CheckResult c{"variance_bound_dominance", 0, 0, 0.0, 0.0, {}};
  Rng rng(derive_seed(o.seed, Stream::oracle, {6}));
  for (std::size_t k = 0; k < o.cases; ++k) {
    const auto n = verify::random_n(rng, 2, std::min<std::size_t>(o.n_max, 10));
    const auto g = verify::random_bounded_graph(n, 5, rng);
    const auto m = verify::random_superset(g, rng);
    const double p = verify::random_p(rng);
    const auto beta = verify::random_n(rng, 1, 3);
    const OutcomeModel model = k % 2 ? OutcomeModel(sample_motif_model(g, beta, verify::ratio_for(g), rng()))
                                     : OutcomeModel(sample_linear_model(g, verify::ratio_for(g), rng()));
    EstimatorOptions opt;
    opt.beta = beta;
    const double var = exact_variance(EstimatorId::unite_beta, model, g, m, p, opt);
    const VarianceBoundInputs in{n, enumerate_y_max(model, g), p, beta, max_degree(m), max_degree(g), 0.0};
    const double bound = variance_upper_bound(in);
    verify::record(c, std::max(0.0, var - bound), "case " + std::to_string(k));
  }
  return c;
}

// |E[unite_beta(2)] - tau| <= bias_bound_nonlinear for order-3 motif models.
inline CheckResult check_nonlinear_bias_bound(const VerifyOptions& o, std::size_t instances = 50) {
  CheckResult c{"nonlinear_bias_bound", 0, 0, 0.0, 0.0, {}};
  Rng rng(derive_seed(o.seed, Stream::oracle, {7}));
  constexpr std::size_t k_order = 2;
  std::size_t informative = 0;
  for (std::size_t k = 0; k < instances; ++k) {
    const auto n = verify::random_n(rng, 3, std::min<std::size_t>(o.n_max, 10));
    const auto g = verify::random_bounded_graph(n, 5, rng);
    const auto m = neighborhood_model_from_truth(g);
    const double p = verify::random_p(rng);
    const auto model = sample_motif_model(g, 3, verify::ratio_for(g), rng());
    EstimatorOptions opt;
    opt.beta = k_order;
    const double bias = std::abs(exact_expectation(EstimatorId::unite_beta, model, g, m, p, opt) -
                                 gate_oracle(model, g));
    const double bound = bias_bound_nonlinear(remainder_derivative_bound(model, k_order), k_order, p);
    if (bias > 1e-9) ++informative;
    verify::record(c, std::max(0.0, bias - bound - 1e-12), "case " + std::to_string(k));
  }
  if (informative == 0) {
    ++c.failures;
    c.first_failure = "no instance had a third-order motif";
  }
  return c;
}

// Enumeration expectations of HT (true N) and unite_lin (M ⊇ N) coincide.
inline CheckResult check_ht_lin_equivalence(const VerifyOptions& o) {
  CheckResult c{"ht_lin_expectation", 0, 0, 0.0, 1e-10, {}};
  Rng rng(derive_seed(o.seed, Stream::oracle, {8}));
  for (std::size_t k = 0; k < o.cases; ++k) {
    const auto n = verify::random_n(rng, 2, std::min<std::size_t>(o.n_max, 10));
    const auto g = verify::random_bounded_graph(n, 5, rng);
    const auto m = verify::random_superset(g, rng);
    const double p = verify::random_p(rng);
    const OutcomeModel model = sample_linear_model(g, verify::ratio_for(g), rng());
    const double ht = exact_expectation(EstimatorId::ht, model, g, neighborhood_model_from_truth(g), p);
    const double lin = exact_expectation(EstimatorId::unite_lin, model, g, m, p);
    verify::record(c, std::abs(ht - lin), "case " + std::to_string(k));
  }
  return c;
}

inline std::vector<CheckResult> run_verification(const VerifyOptions& o = {}) {
  detail::require(o.n_max >= 2 && o.n_max <= kEnumerationCap, "verify: n_max must be in [2, 24]");
  detail::require(o.cases >= 1, "verify: cases must be >= 1");
  std::vector<CheckResult> out;
  out.push_back(check_unbiasedness(o));
  out.push_back(check_beta_one_equivalence(o));
  out.push_back(check_symmetric_polynomial(o));
  for (auto id : {LemmaId::exp_prod, LemmaId::corollary, LemmaId::help_beta, LemmaId::help_beta_ctrl,
                  LemmaId::help_beta2, LemmaId::help_beta_cov}) {
    out.push_back(check_lemma(id, o));
  }
  out.push_back(check_attenuation(o));
  out.push_back(check_variance_dominance(o));
  out.push_back(check_nonlinear_bias_bound(o));
  out.push_back(check_ht_lin_equivalence(o));
  return out;
}

}  // namespace unite
