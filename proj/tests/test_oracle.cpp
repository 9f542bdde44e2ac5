#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "unite/oracle.hpp"

using namespace unite;

namespace {

NeighborhoodModel self_only(std::size_t n) { return NeighborhoodModel(std::vector<NodeSet>(n)); }

}  // namespace

TEST(Enumeration, TwoNodeLin) {
  const auto g = fixtures::two_node_graph();
  const OutcomeModel m = fixtures::two_node_model();
  const auto nb = neighborhood_model_from_truth(g);
  const auto r = enumerate_estimator(EstimatorId::unite_lin, m, g, nb, 0.5);
  EXPECT_NEAR(r.expectation, 1.5, 1e-15);
  EXPECT_NEAR(r.second_moment, 9.0, 1e-15);
  EXPECT_NEAR(r.variance, 6.75, 1e-14);
  EXPECT_EQ(r.skipped, 0u);
  EXPECT_NEAR(exact_expectation(EstimatorId::ht, m, g, nb, 0.5), 1.5, 1e-15);
}

TEST(Enumeration, TwoNodeSelfOnlyAttenuates) {
  const auto g = fixtures::two_node_graph();
  const auto lin = fixtures::two_node_model();
  EXPECT_NEAR(exact_expectation(EstimatorId::unite_lin, lin, g, self_only(2), 0.5), 1.0, 1e-15);
  EXPECT_NEAR(attenuation_expectation(to_motif_model(lin), self_only(2), 0.5, 1), 1.0, 1e-15);
}

TEST(Enumeration, DmIsBiasedUnderInterference) {
  const auto g = fixtures::two_node_graph();
  const OutcomeModel m = fixtures::two_node_model();
  const auto r = enumerate_estimator(EstimatorId::dm, m, g, neighborhood_model_from_truth(g), 0.5);
  EXPECT_EQ(r.skipped, 2u);
  EXPECT_NEAR(r.skipped_mass, 0.5, 1e-15);
  EXPECT_GT(std::abs(r.expectation - 1.5), 0.1);
}

TEST(Enumeration, DmOnConstantModelIsZero) {
  const auto g = fixtures::triangle();
  auto lin = zero_linear_model(g);
  lin.baseline = {2.0, 2.0, 2.0};
  const auto r = enumerate_estimator(EstimatorId::dm, lin, g, neighborhood_model_from_truth(g), 0.3);
  EXPECT_NEAR(r.expectation, 0.0, 1e-15);
  EXPECT_NEAR(r.variance, 0.0, 1e-15);
}

TEST(Enumeration, WisSkipsDegenerateAssignments) {
  const auto g = fixtures::triangle();
  const OutcomeModel m = sample_linear_model(g, 1.0, 1);
  const auto r =
      enumerate_estimator(EstimatorId::unite_wis1, m, g, neighborhood_model_from_truth(g), 0.4);
  EXPECT_EQ(r.skipped, 2u);
  EXPECT_NEAR(r.skipped_mass, std::pow(0.4, 3) + std::pow(0.6, 3), 1e-15);
}

TEST(Enumeration, ConstantEstimatorHasZeroVariance) {
  const auto g = fixtures::triangle();
  const OutcomeModel m = zero_linear_model(g);
  EXPECT_EQ(exact_variance(EstimatorId::unite_lin, m, g, neighborhood_model_from_truth(g), 0.5), 0.0);
}

TEST(Enumeration, CapEnforced) {
  const auto g = generate_erdos_renyi(25, 0.0, 0);
  const OutcomeModel m = zero_linear_model(g);
  EXPECT_THROW(exact_expectation(EstimatorId::unite_lin, m, g, neighborhood_model_from_truth(g), 0.5),
               ArgumentError);
}

TEST(Enumeration, MotifBetaTwoTriangleUnbiased) {
  const auto g = fixtures::triangle();
  const auto mo = sample_motif_model(g, 2, 1.0, 4);
  EstimatorOptions opt;
  opt.beta = 2;
  EXPECT_NEAR(
      exact_expectation(EstimatorId::unite_beta, mo, g, neighborhood_model_from_truth(g), 0.5, opt),
      gate_oracle(mo, g), 1e-12);
}

TEST(Enumeration, BaselineShiftAndSupersetInsensitivity) {
  const auto g = generate_erdos_renyi(9, 0.35, 2);
  auto lin = sample_linear_model(g, 1.0, 6);
  const auto truth = neighborhood_model_from_truth(g);
  auto sets = g.sets();
  for (std::size_t i = 0; i < 9; ++i) {
    sets[i].push_back((i + 1) % 9);
    sets[i].push_back((i + 4) % 9);
  }
  const NeighborhoodModel big(sets);
  const double e = exact_expectation(EstimatorId::unite_lin, lin, g, truth, 0.3);
  EXPECT_NEAR(exact_expectation(EstimatorId::unite_lin, lin, g, big, 0.3), e, 1e-10);
  for (auto& c : lin.baseline) c += 5.0;
  EXPECT_NEAR(exact_expectation(EstimatorId::unite_lin, lin, g, truth, 0.3), e, 1e-10);
}

TEST(Enumeration, DrBiasWithUnequalArmModels) {
  // With f1 != f0 the first-order DR form carries (1/n) sum (1 - |M_i|)(f1_i - f0_i).
  const auto g = generate_erdos_renyi(8, 0.4, 5);
  const auto lin = sample_linear_model(g, 1.0, 2);
  const auto m = neighborhood_model_from_truth(g);
  EstimatorOptions opt;
  opt.arms = ArmModels{std::vector<double>(8, 1.0), std::vector<double>(8, 3.0)};
  double bias = 0.0;
  for (std::size_t i = 0; i < 8; ++i) bias += (1.0 - m.candidates(i).size()) * 2.0;
  bias /= 8.0;
  EXPECT_NEAR(exact_expectation(EstimatorId::unite_dr, lin, g, m, 0.4, opt) - gate_oracle(lin, g),
              bias, 1e-10);
  // The beta form stays unbiased for arbitrary fixed arm models.
  EXPECT_NEAR(exact_expectation(EstimatorId::unite_beta_dr, lin, g, m, 0.4, opt),
              gate_oracle(lin, g), 1e-10);
}

TEST(Attenuation, FactorReductions) {
  EXPECT_EQ(attenuation_factor(2, 0, 0.3, 2), 0.0);
  EXPECT_DOUBLE_EQ(attenuation_factor(3, 1, 0.3, 2), 0.09);
  EXPECT_DOUBLE_EQ(attenuation_factor(2, 2, 0.3, 2), 1.0);
  // m > beta: p^s [m q + C(m,2)(q^2 - 1) ...] is not a plain power of p.
  const double p = 0.4, q = 0.6 / 0.4;
  EXPECT_NEAR(attenuation_factor(3, 3, p, 2), std::pow(p, 3) * (3 * (q + 1) + 3 * (q * q - 1)), 1e-15);
}

TEST(Attenuation, SupersetGivesGate) {
  const auto g = generate_erdos_renyi(8, 0.4, 1);
  const auto mo = sample_motif_model(g, 2, 1.0, 2);
  EXPECT_NEAR(attenuation_expectation(mo, neighborhood_model_from_truth(g), 0.5, 2), gate_oracle(mo, g),
              1e-12);
}

TEST(Attenuation, RemovedSupportZeroesContribution) {
  const auto g = fixtures::two_node_graph();
  MotifModel mo;
  mo.beta = 1;
  mo.baseline = {0.0, 0.0};
  mo.motifs = {{{{1}, 5.0}}, {}};
  EXPECT_EQ(attenuation_expectation(mo, self_only(2), 0.5, 1), 0.0);
}

TEST(Lemma, ExpProdBranches) {
  LemmaCase c;
  c.lemma = LemmaId::exp_prod;
  c.n = 4;
  c.p = 0.3;
  c.s = {0, 3};
  c.s_prime = {1, 2};
  c.f = {Affine{1.0, 1.0}};
  auto v = lemma_check(c);
  EXPECT_EQ(v.rhs, 0.0);
  EXPECT_NEAR(v.lhs, 0.0, 1e-14);
  c.s = {1};
  v = lemma_check(c);
  EXPECT_NEAR(v.lhs, v.rhs, 1e-14);
  EXPECT_NEAR(v.rhs, 1.3, 1e-15);
}

TEST(Lemma, Corollary) {
  LemmaCase c;
  c.lemma = LemmaId::corollary;
  c.n = 5;
  c.p = 0.35;
  c.s = {2};
  c.s_prime = {0, 2, 4};
  const auto v = lemma_check(c);
  EXPECT_NEAR(v.rhs, 0.35 * 0.35, 1e-15);
  EXPECT_NEAR(v.lhs, v.rhs, 1e-14);
}

TEST(Lemma, HelpBeta2EqualsOne) {
  LemmaCase c;
  c.lemma = LemmaId::help_beta2;
  c.n = 6;
  c.p = 0.45;
  c.beta = 2;
  c.s = {0, 1, 3, 5};
  c.s_prime = {1, 5};
  const auto v = lemma_check(c);
  EXPECT_EQ(v.rhs, 1.0);
  EXPECT_NEAR(v.lhs, 1.0, 1e-12);
}

TEST(Lemma, ArgumentChecks) {
  LemmaCase c;
  c.n = 21;
  EXPECT_THROW(lemma_check(c), ArgumentError);
  c.n = 3;
  c.s = {4};
  EXPECT_THROW(lemma_check(c), ArgumentError);
}
