#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "unite/graph.hpp"

using namespace unite;

namespace {

InterferenceGraph complete_graph(std::size_t n) { return generate_erdos_renyi(n, 1.0, 0); }

InterferenceGraph star_graph() {
  std::vector<std::pair<std::size_t, std::size_t>> e{{0, 1}, {0, 2}, {0, 3}};
  return InterferenceGraph::from_edges(4, e);
}

}  // namespace

TEST(Graph, ZeroEdgeProbabilityGivesSelfOnly) {
  const auto g = generate_erdos_renyi(3, 0.0, 0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(g.neighbors(i), NodeSet{i});
}

TEST(Graph, FullEdgeProbabilityGivesCompleteGraph) {
  const auto g = generate_erdos_renyi(3, 1.0, 7);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(g.neighbors(i), (NodeSet{0, 1, 2}));
}

TEST(Graph, ErdosRenyiMeanDegreeMatchesBinomial) {
  const std::size_t n = 1000;
  const double p = 0.01;
  const auto g = generate_erdos_renyi(n, p, 42);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += static_cast<double>(g.neighbors(i).size());
  const double mean = total / n;
  // Mean degree is 1 + 2E/n with E ~ Binomial(n(n-1)/2, p).
  const double pairs = n * (n - 1) / 2.0;
  const double sd_mean = 2.0 * std::sqrt(pairs * p * (1 - p)) / n;
  EXPECT_NEAR(mean, 1.0 + p * (n - 1), 3.0 * sd_mean);
}

TEST(Graph, ErdosRenyiIsSymmetricWithSelfLoops) {
  const auto g = generate_erdos_renyi(300, 0.05, 3);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_TRUE(g.contains(i, i));
    for (auto j : g.neighbors(i)) EXPECT_TRUE(g.contains(j, i));
  }
}

TEST(Graph, ErdosRenyiIsReproducible) {
  EXPECT_EQ(generate_erdos_renyi(500, 0.02, 11), generate_erdos_renyi(500, 0.02, 11));
  EXPECT_NE(generate_erdos_renyi(500, 0.02, 11), generate_erdos_renyi(500, 0.02, 12));
}

TEST(Graph, ErdosRenyiPairFrequencyMatchesEdgeProbability) {
  // Each specific pair appears with probability p across seeds.
  const double p = 0.3;
  std::size_t hits01 = 0, hits_last = 0;
  const int trials = 4000;
  for (int s = 0; s < trials; ++s) {
    const auto g = generate_erdos_renyi(6, p, s);
    hits01 += g.contains(0, 1);
    hits_last += g.contains(4, 5);
  }
  const double sd = std::sqrt(p * (1 - p) / trials);
  EXPECT_NEAR(hits01 / double(trials), p, 4 * sd);
  EXPECT_NEAR(hits_last / double(trials), p, 4 * sd);
}

TEST(Graph, PreconditionsRejected) {
  EXPECT_THROW(generate_erdos_renyi(0, 0.5, 0), ArgumentError);
  EXPECT_THROW(generate_erdos_renyi(5, 1.5, 0), ArgumentError);
  EXPECT_THROW(InterferenceGraph(std::vector<NodeSet>{{5}}), ArgumentError);
}

TEST(Graph, ConstructorNormalizesSets) {
  InterferenceGraph g(std::vector<NodeSet>{{1, 1}, {}});
  EXPECT_EQ(g.neighbors(0), (NodeSet{0, 1}));
  EXPECT_EQ(g.neighbors(1), NodeSet{1});
}

TEST(Neighborhoods, FromTruthCopiesSets) {
  const auto m = neighborhood_model_from_truth(complete_graph(3));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(m.candidates(i), (NodeSet{0, 1, 2}));
  const auto e = neighborhood_model_from_truth(generate_erdos_renyi(2, 0.0, 0));
  EXPECT_EQ(e.candidates(0), NodeSet{0});
  EXPECT_EQ(e.candidates(1), NodeSet{1});
}

TEST(Neighborhoods, FromTruthIsAlwaysSuperset) {
  for (int s = 0; s < 20; ++s) {
    const auto g = generate_erdos_renyi(50, 0.1, s);
    EXPECT_TRUE(is_superset_of(neighborhood_model_from_truth(g), g));
  }
}

TEST(Neighborhoods, PerturbNoOp) {
  const auto g = generate_erdos_renyi(100, 0.05, 1);
  EXPECT_EQ(perturb_neighborhoods(g, 0.0, 0.0, 5), neighborhood_model_from_truth(g));
}

TEST(Neighborhoods, FullRemovalLeavesSelf) {
  const auto g = generate_erdos_renyi(50, 0.2, 1);
  const auto m = perturb_neighborhoods(g, 0.0, 1.0, 5);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(m.candidates(i), NodeSet{i});
}

TEST(Neighborhoods, HalfRemovalOnCompleteGraphSize) {
  const auto m = perturb_neighborhoods(complete_graph(10), 0.0, 0.5, 9);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(m.candidates(i).size(), 5u);  // 1 + floor(0.5 * 9)
    EXPECT_TRUE(m.contains(i, i));
  }
}

TEST(Neighborhoods, RemovalBreaksSupersetAdditionKeepsIt) {
  const auto g = complete_graph(6);
  EXPECT_FALSE(is_superset_of(perturb_neighborhoods(g, 0.0, 0.5, 1), g));
  const auto er = generate_erdos_renyi(200, 0.03, 4);
  EXPECT_TRUE(is_superset_of(perturb_neighborhoods(er, 0.5, 0.0, 1), er));
}

TEST(Neighborhoods, AdditionSizesMatchFloorRule) {
  const auto g = generate_erdos_renyi(300, 0.03, 8);
  for (double a : {0.25, 0.5, 1.0, 2.0}) {
    const auto m = perturb_neighborhoods(g, a, 0.0, 3);
    ASSERT_TRUE(is_superset_of(m, g));
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto d = g.neighbors(i).size();
      EXPECT_EQ(m.candidates(i).size(), d + static_cast<std::size_t>(std::floor(a * (d - 1))));
    }
  }
}

TEST(Neighborhoods, PerturbIsDeterministic) {
  const auto g = generate_erdos_renyi(100, 0.1, 2);
  EXPECT_EQ(perturb_neighborhoods(g, 0.5, 0.0, 17), perturb_neighborhoods(g, 0.5, 0.0, 17));
  EXPECT_EQ(perturb_neighborhoods(g, 0.0, 0.5, 17), perturb_neighborhoods(g, 0.0, 0.5, 17));
}

TEST(Neighborhoods, PerturbErrors) {
  const auto g = complete_graph(4);
  EXPECT_THROW(perturb_neighborhoods(g, 1.0, 0.0, 0), ArgumentError);  // no non-members left
  EXPECT_THROW(perturb_neighborhoods(g, 0.5, 0.5, 0), ArgumentError);
  EXPECT_THROW(perturb_neighborhoods(g, -0.1, 0.0, 0), ArgumentError);
  EXPECT_THROW(perturb_neighborhoods(g, 0.0, 1.1, 0), ArgumentError);
}

TEST(Neighborhoods, SupersetDimensionMismatch) {
  EXPECT_THROW(is_superset_of(neighborhood_model_from_truth(complete_graph(3)), complete_graph(4)),
               DimensionMismatch);
}

TEST(Graph, MaxDegree) {
  EXPECT_EQ(max_degree(generate_erdos_renyi(4, 0.0, 0)), 1u);
  EXPECT_EQ(max_degree(complete_graph(4)), 4u);
  EXPECT_EQ(max_degree(star_graph()), 4u);
  EXPECT_EQ(max_degree(neighborhood_model_from_truth(star_graph())), 4u);
}

TEST(Graph, EdgesRoundTrip) {
  const auto g = generate_erdos_renyi(80, 0.07, 21);
  const auto e = g.edges();
  EXPECT_EQ(InterferenceGraph::from_edges(g.size(), e), g);
}
