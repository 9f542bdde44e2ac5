#pragma once

// Interference graphs and neighborhood models.
//
// Both are families of per-node sorted index sets that always contain the
// node itself. InterferenceGraph holds the true neighborhoods N_i;
// NeighborhoodModel holds the candidate sets M_i available to an estimator,
// which may or may not cover N_i.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "unite/errors.hpp"
#include "unite/random.hpp"

namespace unite {

using NodeSet = std::vector<std::size_t>;

namespace detail {

// Sorts, dedups and validates one family of node sets; inserts self.
inline std::vector<NodeSet> normalize_sets(std::vector<NodeSet> sets, const char* what) {
  const std::size_t n = sets.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = sets[i];
    for (auto j : s) {
      if (j >= n) {
        throw ArgumentError(std::string(what) + ": index " + std::to_string(j) +
                            " out of range for n=" + std::to_string(n));
      }
    }
    s.push_back(i);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return sets;
}

}  // namespace detail

// ============================================================================
// InterferenceGraph
// ============================================================================

class InterferenceGraph {
 public:
  InterferenceGraph() = default;

  // Builds from per-node neighbor lists; self is added if missing and
  // duplicates are dropped.
  explicit InterferenceGraph(std::vector<NodeSet> neighbors)
      : adj_(detail::normalize_sets(std::move(neighbors), "InterferenceGraph")) {}

  // Undirected edge list; self-loops in the list are ignored.
  static InterferenceGraph from_edges(std::size_t n,
                                      std::span<const std::pair<std::size_t, std::size_t>> edges) {
    std::vector<NodeSet> sets(n);
    for (auto [i, j] : edges) {
      detail::require(i < n && j < n, "InterferenceGraph: edge index out of range");
      if (i == j) continue;
      sets[i].push_back(j);
      sets[j].push_back(i);
    }
    return InterferenceGraph(std::move(sets));
  }

  std::size_t size() const noexcept { return adj_.size(); }
  const NodeSet& neighbors(std::size_t i) const { return adj_.at(i); }
  const std::vector<NodeSet>& sets() const noexcept { return adj_; }

  bool contains(std::size_t i, std::size_t j) const {
    const auto& s = adj_.at(i);
    return std::binary_search(s.begin(), s.end(), j);
  }

  // Unordered non-self pairs (i < j) with j in N_i or i in N_j.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < adj_.size(); ++i) {
      for (auto j : adj_[i]) {
        if (j > i) out.emplace_back(i, j);
        else if (j < i && !contains(j, i)) out.emplace_back(j, i);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool operator==(const InterferenceGraph&) const = default;

 private:
  std::vector<NodeSet> adj_;
};

// ============================================================================
// NeighborhoodModel
// ============================================================================

class NeighborhoodModel {
 public:
  NeighborhoodModel() = default;

  explicit NeighborhoodModel(std::vector<NodeSet> candidates)
      : sets_(detail::normalize_sets(std::move(candidates), "NeighborhoodModel")) {}

  std::size_t size() const noexcept { return sets_.size(); }
  const NodeSet& candidates(std::size_t i) const { return sets_.at(i); }
  const std::vector<NodeSet>& sets() const noexcept { return sets_; }

  bool contains(std::size_t i, std::size_t j) const {
    const auto& s = sets_.at(i);
    return std::binary_search(s.begin(), s.end(), j);
  }

  bool operator==(const NeighborhoodModel&) const = default;

 private:
  std::vector<NodeSet> sets_;
};

// ============================================================================
// Operations
// ============================================================================

// Undirected G(n, p) with self-loops implied. Pairs are visited with
// geometric skipping, which is equivalent to one Bernoulli draw per pair.
inline InterferenceGraph generate_erdos_renyi(std::size_t n, double edge_prob,
                                              std::uint64_t seed) {
  detail::require(n >= 1, "generate_erdos_renyi: n must be >= 1");
  detail::require(edge_prob >= 0.0 && edge_prob <= 1.0,
                  "generate_erdos_renyi: edge_prob must be in [0, 1]");
  std::vector<NodeSet> sets(n);
  auto add = [&](std::size_t v, std::size_t w) {
    sets[v].push_back(w);
    sets[w].push_back(v);
  };
  if (edge_prob >= 1.0) {
    for (std::size_t v = 1; v < n; ++v)
      for (std::size_t w = 0; w < v; ++w) add(v, w);
  } else if (edge_prob > 0.0) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double log_q = std::log1p(-edge_prob);
    // Batagelj-Brandes enumeration over pairs (v, w), w < v.
    std::int64_t v = 1;
    std::int64_t w = -1;
    const auto nn = static_cast<std::int64_t>(n);
    while (v < nn) {
      const double r = unif(rng);
      w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
      while (w >= v && v < nn) {
        w -= v;
        ++v;
      }
      if (v < nn) add(static_cast<std::size_t>(v), static_cast<std::size_t>(w));
    }
  }
  return InterferenceGraph(std::move(sets));
}

inline NeighborhoodModel neighborhood_model_from_truth(const InterferenceGraph& g) {
  return NeighborhoodModel(g.sets());
}

namespace detail {

inline std::size_t fraction_count(double fraction, std::size_t base) {
  // Small slack so products like 0.29 * 100 land on the intended integer.
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(base) + 1e-9));
}

}  // namespace detail

// Keeps floor((1 - remove_fraction) * (|N_i| - 1)) non-self neighbors or adds
// floor(add_fraction * (|N_i| - 1)) non-neighbors, independently per node.
// Self is never removed. Nodes of equal degree end up with equal |M_i|.
inline NeighborhoodModel perturb_neighborhoods(const InterferenceGraph& g, double add_fraction,
                                               double remove_fraction, std::uint64_t seed) {
  detail::require(add_fraction >= 0.0, "perturb_neighborhoods: add_fraction must be >= 0");
  detail::require(remove_fraction >= 0.0 && remove_fraction <= 1.0,
                  "perturb_neighborhoods: remove_fraction must be in [0, 1]");
  detail::require(add_fraction == 0.0 || remove_fraction == 0.0,
                  "perturb_neighborhoods: add and remove cannot both be nonzero");
  const std::size_t n = g.size();
  std::vector<NodeSet> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nb = g.neighbors(i);
    Rng rng(derive_seed(seed, Stream::perturb, {i}));
    NodeSet others;
    others.reserve(nb.size());
    for (auto j : nb)
      if (j != i) others.push_back(j);
    if (remove_fraction > 0.0) {
      const auto keep = std::min(others.size(),
                                 detail::fraction_count(1.0 - remove_fraction, others.size()));
      std::shuffle(others.begin(), others.end(), rng);
      others.resize(keep);
      out[i] = std::move(others);
    } else if (add_fraction > 0.0) {
      const auto k = detail::fraction_count(add_fraction, others.size());
      if (n - nb.size() < k) {
        throw ArgumentError("perturb_neighborhoods: node " + std::to_string(i) +
                            " has only " + std::to_string(n - nb.size()) +
                            " non-members, needs " + std::to_string(k));
      }
      NodeSet grown(nb.begin(), nb.end());
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      std::size_t added = 0;
      if (2 * k > n - nb.size()) {
        // Dense request: sample from the explicit complement.
        NodeSet pool;
        for (std::size_t j = 0; j < n; ++j)
          if (!std::binary_search(nb.begin(), nb.end(), j)) pool.push_back(j);
        std::shuffle(pool.begin(), pool.end(), rng);
        grown.insert(grown.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        NodeSet chosen;
        while (added < k) {
          const auto j = pick(rng);
          if (std::binary_search(nb.begin(), nb.end(), j)) continue;
          if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
          chosen.push_back(j);
          ++added;
        }
        grown.insert(grown.end(), chosen.begin(), chosen.end());
      }
      out[i] = std::move(grown);
    } else {
      out[i] = nb;
    }
  }
  return NeighborhoodModel(std::move(out));
}

inline bool is_superset_of(const NeighborhoodModel& m, const InterferenceGraph& g) {
  detail::require_same_size(m.size(), g.size(), "is_superset_of");
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& mi = m.candidates(i);
    const auto& ni = g.neighbors(i);
    if (!std::includes(mi.begin(), mi.end(), ni.begin(), ni.end())) return false;
  }
  return true;
}

namespace detail {
inline std::size_t max_set_size(const std::vector<NodeSet>& sets) {
  std::size_t d = 0;
  for (const auto& s : sets) d = std::max(d, s.size());
  return d;
}
}  // namespace detail

inline std::size_t max_degree(const InterferenceGraph& g) { return detail::max_set_size(g.sets()); }
inline std::size_t max_degree(const NeighborhoodModel& m) { return detail::max_set_size(m.sets()); }

}  // namespace unite
