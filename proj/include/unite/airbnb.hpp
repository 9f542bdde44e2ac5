#pragma once

// Two-sided marketplace with competition for listings.
//
// Each customer considers a fixed set of listings and applies to each with
// probability q (q_match when types agree, q_mismatch otherwise), multiplied
// by alpha when treated. Every listing with applicants accepts one uniformly
// at random; a customer books iff at least one listing accepts them.
// Customers sharing a listing therefore interfere.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "unite/assign.hpp"
#include "unite/errors.hpp"
#include "unite/graph.hpp"
#include "unite/outcomes.hpp"
#include "unite/random.hpp"

namespace unite {

struct MarketConfig {
  std::size_t n_customers = 1000;
  std::size_t n_listings = 500;
  std::size_t n_types = 5;
  std::size_t consider_size = 8;
  double q_match = 0.6;
  double q_mismatch = 0.1;
  double alpha = 1.5;

  bool operator==(const MarketConfig&) const = default;
};

inline void validate(const MarketConfig& c) {
  detail::require(c.n_customers >= 1 && c.n_listings >= 1 && c.n_types >= 1,
                  "MarketConfig: counts must be >= 1");
  detail::require(c.consider_size <= c.n_listings, "MarketConfig: consider_size > n_listings");
  detail::require(c.q_match >= 0.0 && c.q_match <= 1.0 && c.q_mismatch >= 0.0 && c.q_mismatch <= 1.0,
                  "MarketConfig: q_match and q_mismatch must be in [0, 1]");
  detail::require(c.q_match >= c.q_mismatch, "MarketConfig: q_match must be >= q_mismatch");
  detail::require(c.alpha >= 1.0, "MarketConfig: alpha must be >= 1");
}

struct MarketInstance {
  std::vector<std::size_t> customer_types;
  std::vector<std::size_t> listing_types;
  std::vector<NodeSet> consideration;  // sorted listing indices per customer

  std::size_t n_customers() const noexcept { return customer_types.size(); }
  std::size_t n_listings() const noexcept { return listing_types.size(); }
  bool operator==(const MarketInstance&) const = default;
};

inline MarketInstance build_market(const MarketConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> type(0, cfg.n_types - 1);
  MarketInstance m;
  m.customer_types.resize(cfg.n_customers);
  m.listing_types.resize(cfg.n_listings);
  for (auto& t : m.customer_types) t = type(rng);
  for (auto& t : m.listing_types) t = type(rng);
  m.consideration.resize(cfg.n_customers);
  NodeSet pool(cfg.n_listings);
  for (std::size_t l = 0; l < cfg.n_listings; ++l) pool[l] = l;
  for (auto& set : m.consideration) {
    // partial Fisher-Yates
    for (std::size_t a = 0; a < cfg.consider_size; ++a) {
      std::uniform_int_distribution<std::size_t> pick(a, cfg.n_listings - 1);
      std::swap(pool[a], pool[pick(rng)]);
    }
    set.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(cfg.consider_size));
    std::sort(set.begin(), set.end());
  }
  return m;
}

// Customers are adjacent iff their consideration sets intersect.
inline InterferenceGraph market_interference_graph(const MarketInstance& m) {
  std::vector<NodeSet> by_listing(m.n_listings());
  for (std::size_t i = 0; i < m.n_customers(); ++i)
    for (auto l : m.consideration[i]) by_listing.at(l).push_back(i);
  std::vector<NodeSet> adj(m.n_customers());
  for (const auto& cs : by_listing)
    for (auto i : cs) adj[i].insert(adj[i].end(), cs.begin(), cs.end());
  return InterferenceGraph(std::move(adj));
}

inline double application_probability(const MarketInstance& m, const MarketConfig& cfg,
                                      std::size_t customer, std::size_t listing, bool treated) {
  const double q = m.customer_types[customer] == m.listing_types[listing] ? cfg.q_match : cfg.q_mismatch;
  return std::clamp(treated ? q * cfg.alpha : q, 0.0, 1.0);
}

// One application round. Random draws are consumed in a fixed order that does
// not depend on z, so runs sharing a seed are coupled across assignments.
inline OutcomeVector market_simulate(const MarketInstance& m, const MarketConfig& cfg,
                                     std::span<const std::uint8_t> z, std::uint64_t seed) {
  detail::require_same_size(z.size(), m.n_customers(), "market_simulate: assignment");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<NodeSet> applicants(m.n_listings());
  for (std::size_t i = 0; i < m.n_customers(); ++i) {
    for (auto l : m.consideration[i]) {
      const double u = unit(rng);
      if (u < application_probability(m, cfg, i, l, z[i] != 0)) applicants[l].push_back(i);
    }
  }
  OutcomeVector y(m.n_customers(), 0.0);
  for (std::size_t l = 0; l < m.n_listings(); ++l) {
    const double u = unit(rng);
    const auto& a = applicants[l];
    if (a.empty()) continue;
    const auto k = std::min(a.size() - 1, static_cast<std::size_t>(u * static_cast<double>(a.size())));
    // A customer accepted several times keeps one booking; others are not reassigned.
    y[a[k]] = 1.0;
  }
  return y;
}

inline OutcomeVector market_simulate(const MarketInstance& m, const MarketConfig& cfg,
                                     const Assignment& z, std::uint64_t seed) {
  return market_simulate(m, cfg, z.z(), seed);
}

struct MarketOracle {
  double tau = 0.0;
  double mc_stderr = 0.0;
};

// Paired Monte Carlo GATE: each replication runs z = 1 and z = 0 on one seed.
inline MarketOracle market_gate_oracle(const MarketInstance& m, const MarketConfig& cfg,
                                       std::size_t replications, std::uint64_t seed) {
  detail::require(replications >= 1, "market_gate_oracle: replications must be >= 1");
  const std::size_t n = m.n_customers();
  const std::vector<std::uint8_t> ones(n, 1), zeros(n, 0);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t r = 0; r < replications; ++r) {
    const auto s = derive_seed(seed, Stream::market_sim, {r});
    const auto y1 = market_simulate(m, cfg, ones, s);
    const auto y0 = market_simulate(m, cfg, zeros, s);
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) d += y1[i] - y0[i];
    d /= static_cast<double>(n);
    sum += d;
    sum_sq += d * d;
  }
  const double reps = static_cast<double>(replications);
  MarketOracle o;
  o.tau = sum / reps;
  if (replications > 1) {
    const double var = std::max(0.0, (sum_sq - reps * o.tau * o.tau) / (reps - 1.0));
    o.mc_stderr = std::sqrt(var / reps);
  }
  return o;
}

}  // namespace unite
