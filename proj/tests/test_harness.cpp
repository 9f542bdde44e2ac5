#include <gtest/gtest.h>

#include <cmath>

#include "unite/harness.hpp"
#include "unite/io.hpp"

using namespace unite;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c = default_config(Study::er_sweep);
  c.n = 200;
  c.graphs = 4;
  c.trials = 3;
  c.axis = Axis::r;
  c.axis_values = {1.0};
  c.master_seed = 3;
  return c;
}

TrialRecord rec(double rel, EstimatorId id = EstimatorId::unite_lin, double v = 1.0) {
  TrialRecord r;
  r.estimator = id;
  r.axis_value = v;
  r.rel_bias = rel;
  r.estimate = rel;
  return r;
}

}  // namespace

TEST(Harness, RecordCount) {
  auto c = small_config();
  c.trials = 1;
  c.estimators = {EstimatorId::dm};
  EXPECT_EQ(run_trials(c).size(), c.graphs);
  c = small_config();
  c.axis_values = {0.0, 0.5, 1.0};
  c.estimators = {EstimatorId::unite_lin, EstimatorId::ht, EstimatorId::dm};
  EXPECT_EQ(run_trials(c).size(), 3 * c.graphs * c.trials * 3);
}

TEST(Harness, DmUnbiasedWithoutInterference) {
  auto c = small_config();
  c.n = 1000;
  c.graphs = 20;
  c.trials = 10;
  c.axis_values = {0.0};
  c.estimators = {EstimatorId::dm};
  const auto rows = aggregate(run_trials(c));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_LT(rows[0].abs_mean_rel_bias, 4 * rows[0].sd / std::sqrt(double(rows[0].n_ok)));
}

TEST(Harness, DeterministicAcrossRunsAndWorkers) {
  auto c = small_config();
  c.axis_values = {0.0, 2.0};
  c.estimators = {EstimatorId::unite_lin, EstimatorId::unite_wis1, EstimatorId::poly};
  const auto a = io::records_csv(run_trials(c, 1));
  EXPECT_EQ(a, io::records_csv(run_trials(c, 1)));
  EXPECT_EQ(a, io::records_csv(run_trials(c, 3)));
}

TEST(Harness, DegenerateTrialsAreFlaggedNotFatal) {
  auto c = small_config();
  c.n = 3;
  c.p = 0.05;  // most assignments leave an arm empty
  c.mean_degree = 1.0;
  c.trials = 20;
  c.estimators = {EstimatorId::unite_wis1, EstimatorId::dm, EstimatorId::unite_lin};
  const auto recs = run_trials(c);
  EXPECT_EQ(recs.size(), c.graphs * c.trials * 3);
  std::size_t flagged = 0;
  for (const auto& r : recs) {
    if (r.estimator == EstimatorId::unite_lin) {
      EXPECT_TRUE(r.ok());
    }
    if (!r.ok()) {
      EXPECT_EQ(r.flag, "degenerate");
      ++flagged;
    }
  }
  EXPECT_GT(flagged, 0u);
  std::size_t counted = 0;
  for (const auto& s : aggregate(recs)) counted += s.n_flagged;
  EXPECT_EQ(counted, flagged);
}

TEST(Harness, ZeroFractionMatchesTruth) {
  auto c = default_config(Study::ablation);
  c.n = 300;
  c.graphs = 3;
  c.trials = 4;
  c.axis_values = {0.0};
  auto truth = small_config();
  truth.n = 300;
  truth.graphs = 3;
  truth.trials = 4;
  truth.mean_degree = c.mean_degree;
  truth.master_seed = c.master_seed;
  truth.estimators = c.estimators;
  truth.axis = Axis::r;
  truth.axis_values = {c.r};
  const auto a = run_trials(c), b = run_trials(truth);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].estimate, b[k].estimate);
}

TEST(Harness, ConfigValidation) {
  auto c = small_config();
  c.axis_values.clear();
  EXPECT_THROW(run_trials(c), ConfigError);
  c = small_config();
  c.trials = 0;
  EXPECT_THROW(run_trials(c), ConfigError);
  c = small_config();
  c.axis = Axis::p;
  c.axis_values = {1.0};
  EXPECT_THROW(run_trials(c), ConfigError);
  c = small_config();
  c.axis = Axis::alpha;
  EXPECT_THROW(run_trials(c), ConfigError);
  EXPECT_THROW(ablation_study(small_config()), ConfigError);
}

TEST(Aggregate, SingleRecord) {
  const auto rows = aggregate({rec(0.3)});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].mean_rel_bias, 0.3);
  EXPECT_EQ(rows[0].sd, 0.0);
  EXPECT_EQ(rows[0].n_ok, 1u);
}

TEST(Aggregate, SymmetricPair) {
  const auto rows = aggregate({rec(0.4), rec(-0.4)});
  EXPECT_DOUBLE_EQ(rows[0].mean_rel_bias, 0.0);
  EXPECT_DOUBLE_EQ(rows[0].rmse, 0.4);
}

TEST(Aggregate, TenRowFixture) {
  std::vector<TrialRecord> recs;
  for (double v : {0.1, -0.2, 0.3, 0.05, -0.15, 0.25, 0.0, 0.4, -0.1, 0.2}) recs.push_back(rec(v));
  auto flagged = rec(0.0);
  flagged.flag = "degenerate";
  recs.push_back(flagged);
  recs.push_back(rec(9.0, EstimatorId::dm));
  const auto rows = aggregate(recs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0].mean_rel_bias, 0.085, 1e-15);
  EXPECT_NEAR(rows[0].abs_mean_rel_bias, 0.085, 1e-15);
  EXPECT_NEAR(rows[0].sd, 0.20145305491189092, 1e-14);
  EXPECT_NEAR(rows[0].rmse, 0.20916500663351892, 1e-14);
  EXPECT_EQ(rows[0].n_ok, 10u);
  EXPECT_EQ(rows[0].n_flagged, 1u);
  EXPECT_EQ(rows[1].estimator, EstimatorId::dm);
  EXPECT_THROW(aggregate({}), ArgumentError);
}

TEST(Harness, AirbnbStudyRuns) {
  auto c = default_config(Study::airbnb);
  c.market.n_customers = 300;
  c.market.n_listings = 300;
  c.n = 300;
  c.graphs = 2;
  c.trials = 3;
  c.oracle_replications = 20;
  c.axis_values = {1.5};
  const auto recs = run_trials(c);
  EXPECT_EQ(recs.size(), 2u * 3u * 2u);
  for (const auto& r : recs) {
    EXPECT_TRUE(r.ok());
    EXPECT_GT(r.true_tau, 0.0);
  }
}
