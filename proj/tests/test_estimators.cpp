#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "unite/combinatorics.hpp"
#include "unite/estimators.hpp"
#include "unite/oracle.hpp"

using namespace unite;

namespace {

NeighborhoodModel self_only(std::size_t n) {
  std::vector<NodeSet> s(n);
  return NeighborhoodModel(s);
}

}  // namespace

TEST(HorvitzThompson, TwoNode) {
  const auto m = neighborhood_model_from_truth(fixtures::two_node_graph());
  const std::vector<double> y{2.0, 1.0};
  EXPECT_DOUBLE_EQ(horvitz_thompson(y, Assignment({1, 1}, 0.5), m), 6.0);
  EXPECT_DOUBLE_EQ(horvitz_thompson(y, Assignment({1, 0}, 0.5), m), 0.0);
}

TEST(UniteLin, TwoNode) {
  const auto m = neighborhood_model_from_truth(fixtures::two_node_graph());
  EXPECT_DOUBLE_EQ(unite_lin(std::vector<double>{2.0, 1.0}, Assignment({1, 1}, 0.5), m), 6.0);
  EXPECT_DOUBLE_EQ(unite_lin(std::vector<double>{1.0, 0.0}, Assignment({1, 0}, 0.5), m), 0.0);
}

TEST(UniteLin, DimensionMismatch) {
  const auto m = neighborhood_model_from_truth(fixtures::two_node_graph());
  EXPECT_THROW(unite_lin(std::vector<double>{1.0}, Assignment({1, 0}, 0.5), m), DimensionMismatch);
}

TEST(Weights, AllTreatedIsDegenerate) {
  const auto m = neighborhood_model_from_truth(fixtures::triangle());
  EXPECT_THROW(normalized_weights(Assignment({1, 1, 1}, 0.5), m), DegenerateAssignment);
  EXPECT_THROW(normalized_weights(Assignment({0, 0, 0}, 0.5), m), DegenerateAssignment);
  EXPECT_THROW(unite_wis1(std::vector<double>{1, 2, 3}, Assignment({1, 1, 1}, 0.5), m),
               DegenerateAssignment);
}

TEST(Weights, TwoNodeSelfOnly) {
  const auto w = normalized_weights(Assignment({1, 0}, 0.5), self_only(2));
  EXPECT_DOUBLE_EQ(w.denom, 1.0);
  EXPECT_DOUBLE_EQ(w.denom_prime, 1.0);
  EXPECT_EQ(w.rho, (std::vector<double>{2.0, 0.0}));
  EXPECT_EQ(w.rho_prime, (std::vector<double>{0.0, 2.0}));
  EXPECT_TRUE(w.normalized);
}

TEST(Weights, NormalizerIdentityAndExclusivity) {
  const auto g = generate_erdos_renyi(100, 0.05, 2);
  const auto m = perturb_neighborhoods(g, 0.5, 0.0, 1);
  const auto z = bernoulli_assign(100, 0.3, 4);
  const auto w = normalized_weights(z, m);
  double d = 0.0, dp = 0.0;
  for (std::size_t j = 0; j < 100; ++j) {
    EXPECT_TRUE((w.rho[j] == 0.0) != (w.rho_prime[j] == 0.0));
    double s = 0.0, sp = 0.0;
    for (auto k : m.candidates(j)) {
      s += w.rho[k];
      sp += w.rho_prime[k];
    }
    d += s / m.candidates(j).size();
    dp += sp / m.candidates(j).size();
  }
  EXPECT_NEAR(d / 100, 1.0, 1e-12);
  EXPECT_NEAR(dp / 100, 1.0, 1e-12);
}

TEST(Wis, ReducesToLinWhenNormalizersAreOne) {
  const std::vector<double> y{3.0, -1.5};
  const Assignment z({1, 0}, 0.5);
  EXPECT_DOUBLE_EQ(unite_wis1(y, z, self_only(2)), unite_lin(y, z, self_only(2)));
  EXPECT_DOUBLE_EQ(unite_beta_wis(y, z, self_only(2), 1), unite_beta(y, z, self_only(2), 1));
}

TEST(Wis, ZeroOutcomes) {
  const auto m = neighborhood_model_from_truth(generate_erdos_renyi(30, 0.2, 1));
  const std::vector<double> y(30, 0.0);
  const auto z = bernoulli_assign(30, 0.5, 2);
  EXPECT_EQ(unite_wis1(y, z, m), 0.0);
  EXPECT_EQ(unite_beta_wis(y, z, m, 2), 0.0);
  EXPECT_EQ(unite_beta(y, z, m, 3), 0.0);
}

TEST(SymPoly, SmallCases) {
  const std::vector<double> v{2.0, 3.0};
  EXPECT_DOUBLE_EQ(sym_poly_partial_sums(v, 2), 2.0 + 3.0 + 6.0);
  const std::vector<double> u{1.5, -2.0, 0.25, 4.0};
  EXPECT_DOUBLE_EQ(sym_poly_partial_sums(u, 1), 1.5 - 2.0 + 0.25 + 4.0);
  EXPECT_THROW(sym_poly_partial_sums(u, 0), ArgumentError);
}

TEST(SymPoly, MatchesSubsetEnumeration) {
  Rng rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> v(8);
    for (auto& x : v) x = u(rng);
    NodeSet idx{0, 1, 2, 3, 4, 5, 6, 7};
    double brute = 0.0;
    for (const auto& s : subsets_up_to(idx, 3)) {
      double prod = 1.0;
      for (auto j : s) prod *= v[j];
      brute += prod;
    }
    EXPECT_NEAR(sym_poly_partial_sums(v, 3), brute, 1e-12 * std::max(1.0, std::abs(brute)));
  }
}

TEST(UniteBeta, BetaOneIsLinBitForBit) {
  for (int s = 0; s < 50; ++s) {
    const auto g = generate_erdos_renyi(40, 0.1, s);
    const auto m = perturb_neighborhoods(g, 0.5, 0.0, s);
    const auto z = bernoulli_assign(40, 0.3, s + 100);
    const auto y = simulate(sample_linear_model(g, 1.0, s), g, z, 0.5, s);
    EXPECT_EQ(unite_beta(y, z, m, 1), unite_lin(y, z, m));
  }
}

TEST(UniteBeta, MatchesSubsetEnumeration) {
  for (int s = 0; s < 30; ++s) {
    const auto g = generate_erdos_renyi(15, 0.4, s);
    const auto m = neighborhood_model_from_truth(g);
    const auto z = bernoulli_assign(15, 0.4, s);
    const auto y = simulate(sample_linear_model(g, 1.0, s), g, z, 0.0, 0);
    for (std::size_t beta = 1; beta <= 4; ++beta) {
      const double a = unite_beta(y, z, m, beta);
      const double b = unite_beta_by_subsets(y, z, m, beta);
      EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(b)));
    }
  }
}

TEST(UniteDr, ZeroModelsGiveLin) {
  const auto g = generate_erdos_renyi(30, 0.2, 1);
  const auto m = neighborhood_model_from_truth(g);
  const auto z = bernoulli_assign(30, 0.5, 2);
  const auto y = simulate(sample_linear_model(g, 1.0, 3), g, z, 0.0, 0);
  const std::vector<double> zero(30, 0.0);
  EXPECT_NEAR(unite_dr(y, z, m, zero, zero), unite_lin(y, z, m), 1e-12);
  EXPECT_NEAR(unite_beta_dr(y, z, m, 2, zero, zero), unite_beta(y, z, m, 2), 1e-12);
}

TEST(UniteDr, ExactSutvaModelsGiveTauPerRealization) {
  const auto g = generate_erdos_renyi(40, 0.0, 0);
  const auto lin = sample_linear_model(g, 0.0, 5);
  const auto m = neighborhood_model_from_truth(g);
  std::vector<double> f0(40), f1(40);
  for (std::size_t i = 0; i < 40; ++i) {
    f0[i] = lin.baseline[i];
    f1[i] = lin.baseline[i] + lin.direct[i];
  }
  const double tau = gate_oracle(lin, g);
  for (int s = 0; s < 10; ++s) {
    const auto z = bernoulli_assign(40, 0.5, s);
    const auto y = simulate(lin, g, z, 0.0, 0);
    EXPECT_NEAR(unite_dr(y, z, m, f0, f1), tau, 1e-12);
    EXPECT_NEAR(unite_beta_dr(y, z, m, 2, f0, f1), tau, 1e-12);
  }
}

TEST(UniteDr, DimensionMismatch) {
  const auto m = neighborhood_model_from_truth(fixtures::two_node_graph());
  const std::vector<double> y{1.0, 2.0}, bad{1.0};
  EXPECT_THROW(unite_dr(y, Assignment({1, 0}, 0.5), m, bad, y), DimensionMismatch);
  EXPECT_THROW(unite_beta_dr(y, Assignment({1, 0}, 0.5), m, 2, y, bad), DimensionMismatch);
}

TEST(DifferenceInMeans, Basics) {
  EXPECT_DOUBLE_EQ(difference_in_means(std::vector<double>{2.0, 1.0}, Assignment({1, 0}, 0.5)), 1.0);
  EXPECT_DOUBLE_EQ(
      difference_in_means(std::vector<double>{3.0, 3.0, 3.0}, Assignment({1, 0, 1}, 0.5)), 0.0);
  EXPECT_THROW(difference_in_means(std::vector<double>{2.0, 1.0}, Assignment({1, 1}, 0.5)),
               DegenerateAssignment);
}

TEST(Poly, ConstantOutcomesGiveZero) {
  const auto g = generate_erdos_renyi(200, 0.03, 3);
  const auto z = bernoulli_assign(200, 0.5, 1);
  const std::vector<double> y(200, 4.0);
  EXPECT_NEAR(poly_regression_oracle(y, z, g, 1), 0.0, 1e-10);
  EXPECT_NEAR(poly_regression_oracle(y, z, g, 2), 0.0, 1e-10);
}

TEST(Poly, RecoversHomogeneousSutvaEffectExactly) {
  const auto g = generate_erdos_renyi(500, 0.01, 3);
  auto lin = zero_linear_model(g);
  lin.baseline.assign(500, 0.5);
  lin.direct.assign(500, 1.25);
  const auto z = bernoulli_assign(500, 0.5, 1);
  const auto y = simulate(lin, g, z, 0.0, 0);
  EXPECT_NEAR(poly_regression_oracle(y, z, g, 1), 1.25, 1e-10);
  EXPECT_NEAR(poly_regression_oracle(y, z, g, 2), 1.25, 1e-10);
}

TEST(Poly, RecoversSutvaEffectAtLargeN) {
  const std::size_t n = 40000;
  const auto g = generate_erdos_renyi(n, 5.0 / n, 3);
  const auto lin = sample_linear_model(g, 0.0, 2);
  const auto z = bernoulli_assign(n, 0.5, 1);
  const auto y = simulate(lin, g, z, 0.0, 0);
  // Residual sd is about 0.4; the t coefficient dominates the standard error (~0.01).
  EXPECT_NEAR(poly_regression_oracle(y, z, g, 1), gate_oracle(lin, g), 0.04);
}

TEST(Poly, RankDeficientDesign) {
  const auto g = generate_erdos_renyi(20, 0.0, 0);  // t is identically zero
  const auto z = bernoulli_assign(20, 0.5, 1);
  const std::vector<double> y(20, 1.0);
  EXPECT_THROW(poly_regression_oracle(y, z, g, 1), RankDeficient);
  EXPECT_THROW(poly_regression_oracle(y, z, fixtures::triangle(), 3), ArgumentError);
}

TEST(Estimators, ScaleEquivariance) {
  const auto g = generate_erdos_renyi(300, 0.02, 1);
  const auto m = perturb_neighborhoods(g, 0.5, 0.0, 2);
  const auto z = bernoulli_assign(300, 0.5, 3);
  const auto y = simulate(sample_linear_model(g, 1.0, 4), g, z, 0.1, 5);
  std::vector<double> y2(y);
  for (auto& v : y2) v *= 4.0;  // power of two keeps scaling exact
  EstimatorOptions opt;
  opt.beta = 2;
  opt.graph = &g;
  for (auto id : kAllEstimators) {
    EXPECT_NEAR(estimate(id, y2, z, m, opt), 4.0 * estimate(id, y, z, m, opt), 1e-9)
        << to_string(id);
  }
}

TEST(Estimators, IdsRoundTrip) {
  for (auto id : kAllEstimators) EXPECT_EQ(parse_estimator(to_string(id)), id);
  EXPECT_FALSE(parse_estimator("nope"));
  EXPECT_THROW(estimate(EstimatorId::poly, std::vector<double>{1, 2}, Assignment({1, 0}, 0.5),
                        neighborhood_model_from_truth(fixtures::two_node_graph())),
               ArgumentError);
}
