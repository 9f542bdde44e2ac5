#pragma once

// Potential-outcome models.
//
//   linear    Y_i(z) = c_i + sum_{j in N_i} c_ij z_j
//   motif     Y_i(z) = c_i + sum_{S} c_{i,S} prod_{j in S} z_j,  S subset N_i, |S| <= beta
//   sigmoid   Y_i(z) = L_i(z) * sigmoid(kappa * T_i(z)),  T_i = mean of z over N_i
//
// Observed outcomes add independent N(0, sigma^2) noise.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "unite/assign.hpp"
#include "unite/combinatorics.hpp"
#include "unite/errors.hpp"
#include "unite/graph.hpp"
#include "unite/random.hpp"

namespace unite {

using OutcomeVector = std::vector<double>;

struct IndirectEffect {
  std::size_t j;
  double c;
  bool operator==(const IndirectEffect&) const = default;
};

struct LinearAdditiveModel {
  std::vector<double> baseline;                       // c_i
  std::vector<double> direct;                         // c_ii
  std::vector<std::vector<IndirectEffect>> indirect;  // c_ij, j in N_i \ {i}, sorted by j

  std::size_t size() const noexcept { return baseline.size(); }
  bool operator==(const LinearAdditiveModel&) const = default;
};

struct Motif {
  NodeSet set;
  double c;
  bool operator==(const Motif&) const = default;
};

struct MotifModel {
  std::size_t beta = 1;
  std::vector<double> baseline;
  std::vector<std::vector<Motif>> motifs;  // per node, ordered by (size, lex)

  std::size_t size() const noexcept { return baseline.size(); }
  bool operator==(const MotifModel&) const = default;
};

enum class NonlinearFamily { sigmoid_product };

struct NonlinearModel {
  NonlinearFamily family = NonlinearFamily::sigmoid_product;
  LinearAdditiveModel linear_part;
  double kappa = 4.0;

  std::size_t size() const noexcept { return linear_part.size(); }
  bool operator==(const NonlinearModel&) const = default;
};

using OutcomeModel = std::variant<LinearAdditiveModel, MotifModel, NonlinearModel>;

inline std::size_t model_size(const OutcomeModel& m) {
  return std::visit([](const auto& x) { return x.size(); }, m);
}

// ============================================================================
// Construction and validation
// ============================================================================

// Linear model with every (i, j in N_i \ {i}) key present and zero
// coefficients.
inline LinearAdditiveModel zero_linear_model(const InterferenceGraph& g) {
  LinearAdditiveModel m;
  const std::size_t n = g.size();
  m.baseline.assign(n, 0.0);
  m.direct.assign(n, 0.0);
  m.indirect.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : g.neighbors(i))
      if (j != i) m.indirect[i].push_back({j, 0.0});
  return m;
}

inline double& indirect_coefficient(LinearAdditiveModel& m, std::size_t i, std::size_t j) {
  auto& row = m.indirect.at(i);
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const IndirectEffect& e, std::size_t v) { return e.j < v; });
  if (it == row.end() || it->j != j) {
    throw ArgumentError("linear model: key (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") is not a true neighbor pair");
  }
  return it->c;
}

inline void validate(const LinearAdditiveModel& m, const InterferenceGraph& g) {
  const std::size_t n = g.size();
  detail::require_same_size(m.baseline.size(), n, "linear model baseline");
  detail::require_same_size(m.direct.size(), n, "linear model direct");
  detail::require_same_size(m.indirect.size(), n, "linear model indirect");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = m.indirect[i];
    for (std::size_t a = 0; a < row.size(); ++a) {
      const auto j = row[a].j;
      if (j == i || !g.contains(i, j)) {
        throw ArgumentError("linear model: coefficient key (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") outside N_i");
      }
      if (a > 0 && row[a - 1].j >= j) throw ArgumentError("linear model: indirect keys not sorted");
    }
  }
}

inline void validate(const MotifModel& m, const InterferenceGraph& g) {
  const std::size_t n = g.size();
  detail::require(m.beta >= 1, "motif model: beta must be >= 1");
  detail::require_same_size(m.baseline.size(), n, "motif model baseline");
  detail::require_same_size(m.motifs.size(), n, "motif model motifs");
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& mo : m.motifs[i]) {
      if (mo.set.empty() || mo.set.size() > m.beta) {
        throw ArgumentError("motif model: motif size must be in [1, beta] at node " +
                            std::to_string(i));
      }
      if (!std::is_sorted(mo.set.begin(), mo.set.end()) ||
          std::adjacent_find(mo.set.begin(), mo.set.end()) != mo.set.end()) {
        throw ArgumentError("motif model: motif sets must be sorted and duplicate-free");
      }
      if (!is_subset(mo.set, g.neighbors(i))) {
        throw ArgumentError("motif model: coefficient key outside N_" + std::to_string(i));
      }
    }
  }
}

inline void validate(const NonlinearModel& m, const InterferenceGraph& g) {
  validate(m.linear_part, g);
}

inline void validate(const OutcomeModel& m, const InterferenceGraph& g) {
  std::visit([&](const auto& x) { validate(x, g); }, m);
}

// Dyad reduction: the same outcomes expressed as a beta = 1 motif model.
inline MotifModel to_motif_model(const LinearAdditiveModel& lin) {
  MotifModel m;
  m.beta = 1;
  m.baseline = lin.baseline;
  m.motifs.resize(lin.size());
  for (std::size_t i = 0; i < lin.size(); ++i) {
    bool placed = false;
    for (const auto& e : lin.indirect[i]) {
      if (!placed && e.j > i) {
        m.motifs[i].push_back({{i}, lin.direct[i]});
        placed = true;
      }
      m.motifs[i].push_back({{e.j}, e.c});
    }
    if (!placed) m.motifs[i].push_back({{i}, lin.direct[i]});
  }
  return m;
}

// ============================================================================
// Evaluation
// ============================================================================

namespace detail {

inline double linear_value(const LinearAdditiveModel& m, std::size_t i,
                           std::span<const std::uint8_t> z) {
  // Accumulate in ascending j so the result matches the dyad motif form.
  double y = m.baseline[i];
  bool placed = false;
  for (const auto& e : m.indirect[i]) {
    if (!placed && e.j > i) {
      y += m.direct[i] * static_cast<double>(z[i]);
      placed = true;
    }
    y += e.c * static_cast<double>(z[e.j]);
  }
  if (!placed) y += m.direct[i] * static_cast<double>(z[i]);
  return y;
}

inline double motif_value(const MotifModel& m, std::size_t i, std::span<const std::uint8_t> z) {
  double y = m.baseline[i];
  for (const auto& mo : m.motifs[i]) {
    double prod = 1.0;
    for (auto j : mo.set) prod *= static_cast<double>(z[j]);
    y += mo.c * prod;
  }
  return y;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double sigmoid_value(const NonlinearModel& m, const InterferenceGraph& g, std::size_t i,
                            std::span<const std::uint8_t> z) {
  const auto& nb = g.neighbors(i);
  double treated = 0.0;
  for (auto j : nb) treated += static_cast<double>(z[j]);
  const double frac = treated / static_cast<double>(nb.size());
  return linear_value(m.linear_part, i, z) * sigmoid(m.kappa * frac);
}

}  // namespace detail

// Noise-free Y(z). Assumes the model was validated against g.
inline OutcomeVector potential_outcomes(const OutcomeModel& model, const InterferenceGraph& g,
                                        std::span<const std::uint8_t> z) {
  const std::size_t n = g.size();
  detail::require_same_size(z.size(), n, "potential_outcomes: assignment");
  detail::require_same_size(model_size(model), n, "potential_outcomes: model");
  OutcomeVector y(n);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        for (std::size_t i = 0; i < n; ++i) {
          if constexpr (std::is_same_v<T, LinearAdditiveModel>) y[i] = detail::linear_value(m, i, z);
          else if constexpr (std::is_same_v<T, MotifModel>) y[i] = detail::motif_value(m, i, z);
          else y[i] = detail::sigmoid_value(m, g, i, z);
        }
      },
      model);
  return y;
}

inline OutcomeVector simulate(const OutcomeModel& model, const InterferenceGraph& g,
                              const Assignment& z, double noise_sigma, std::uint64_t seed) {
  detail::require(noise_sigma >= 0.0, "simulate: noise_sigma must be >= 0");
  validate(model, g);
  auto y = potential_outcomes(model, g, z.z());
  if (noise_sigma > 0.0) {
    Rng rng(seed);
    std::normal_distribution<double> eps(0.0, noise_sigma);
    for (auto& v : y) v += eps(rng);
  }
  return y;
}

// (1/n) sum Y_i(1) - (1/n) sum Y_i(0), noise off.
inline double gate_oracle(const OutcomeModel& model, const InterferenceGraph& g) {
  validate(model, g);
  const std::size_t n = g.size();
  const std::vector<std::uint8_t> ones(n, 1), zeros(n, 0);
  const auto y1 = potential_outcomes(model, g, ones);
  const auto y0 = potential_outcomes(model, g, zeros);
  double s1 = 0.0, s0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s1 += y1[i];
    s0 += y0[i];
  }
  return s1 / static_cast<double>(n) - s0 / static_cast<double>(n);
}

// ============================================================================
// Sampling
// ============================================================================

struct CoefficientPrior {
  double direct_lo = 0.5, direct_hi = 1.5;
  double baseline_lo = 0.0, baseline_hi = 1.0;
  // Probability an interference coefficient is positive. Skewed so the net
  // spillover does not cancel out on average.
  double positive_share = 0.8;
};

// Mean over nodes of sum_{j != i} |c_ij| / |c_ii|.
inline double indirect_ratio(const LinearAdditiveModel& m) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    double s = 0.0;
    for (const auto& e : m.indirect[i]) s += std::abs(e.c);
    total += s / std::abs(m.direct[i]);
  }
  return total / static_cast<double>(m.size());
}

inline LinearAdditiveModel sample_linear_model(const InterferenceGraph& g, double r,
                                               std::uint64_t seed,
                                               const CoefficientPrior& prior = {}) {
  detail::require(r >= 0.0, "sample_linear_model: indirect ratio must be >= 0");
  auto m = zero_linear_model(g);
  const std::size_t n = g.size();
  std::size_t n_edges = 0;
  for (const auto& row : m.indirect) n_edges += row.size();
  if (r > 0.0 && n_edges == 0) {
    throw ArgumentError("sample_linear_model: r > 0 requires at least one edge");
  }
  Rng rng(seed);
  std::uniform_real_distribution<double> direct(prior.direct_lo, prior.direct_hi);
  std::uniform_real_distribution<double> base(prior.baseline_lo, prior.baseline_hi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    m.baseline[i] = base(rng);
    m.direct[i] = direct(rng);
    for (auto& e : m.indirect[i]) {
      const double mag = unit(rng);
      e.c = unit(rng) < prior.positive_share ? mag : -mag;
    }
  }
  if (r == 0.0) {
    for (auto& row : m.indirect)
      for (auto& e : row) e.c = 0.0;
    return m;
  }
  const double scale = r / indirect_ratio(m);
  for (auto& row : m.indirect)
    for (auto& e : row) e.c *= scale;
  return m;
}

// Mean over nodes of sum_{S != {i}} |c_{i,S}| / |c_{i,{i}}|.
inline double indirect_ratio(const MotifModel& m) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    double self = 0.0, other = 0.0;
    for (const auto& mo : m.motifs[i]) {
      if (mo.set.size() == 1 && mo.set[0] == i) self = std::abs(mo.c);
      else other += std::abs(mo.c);
    }
    total += other / self;
  }
  return total / static_cast<double>(m.size());
}

namespace detail {

constexpr std::size_t kMotifEnumerationDegree = 12;
constexpr std::size_t kMotifSampleCap = 200;

inline bool motif_less(const NodeSet& a, const NodeSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

// Up to `cap` distinct subsets of `base` (1 <= |S| <= beta), uniform over all
// such subsets, always including {self}.
inline std::vector<NodeSet> sample_motif_sets(const NodeSet& base, std::size_t self,
                                              std::size_t beta, std::size_t cap, Rng& rng) {
  const std::size_t d = base.size();
  const std::size_t top = std::min(beta, d);
  std::vector<double> weights(top + 1, 0.0);
  double total = 0.0;
  for (std::size_t s = 1; s <= top; ++s) {
    weights[s] = binomial(d, s);
    total += weights[s];
  }
  std::vector<NodeSet> out{{self}};
  const auto target = static_cast<std::size_t>(std::min<double>(static_cast<double>(cap), total));
  std::discrete_distribution<std::size_t> size_dist(weights.begin(), weights.end());
  NodeSet pool = base;
  while (out.size() < target) {
    const auto s = size_dist(rng);
    for (std::size_t a = 0; a < s; ++a) {
      std::uniform_int_distribution<std::size_t> pick(a, d - 1);
      std::swap(pool[a], pool[pick(rng)]);
    }
    NodeSet cand(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(s));
    std::sort(cand.begin(), cand.end());
    if (std::find(out.begin(), out.end(), cand) == out.end()) out.push_back(std::move(cand));
  }
  std::sort(out.begin(), out.end(), motif_less);
  return out;
}

}  // namespace detail

inline MotifModel sample_motif_model(const InterferenceGraph& g, std::size_t beta, double r,
                                     std::uint64_t seed, const CoefficientPrior& prior = {}) {
  detail::require(beta >= 1, "sample_motif_model: beta must be >= 1");
  detail::require(r >= 0.0, "sample_motif_model: indirect ratio must be >= 0");
  const std::size_t n = g.size();
  MotifModel m;
  m.beta = beta;
  m.baseline.resize(n);
  m.motifs.resize(n);
  Rng rng(seed);
  std::uniform_real_distribution<double> direct(prior.direct_lo, prior.direct_hi);
  std::uniform_real_distribution<double> base(prior.baseline_lo, prior.baseline_hi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t n_other = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nb = g.neighbors(i);
    std::vector<NodeSet> sets =
        nb.size() > detail::kMotifEnumerationDegree
            ? detail::sample_motif_sets(nb, i, beta, detail::kMotifSampleCap, rng)
            : subsets_up_to(nb, beta);
    m.baseline[i] = base(rng);
    for (auto& s : sets) {
      double c;
      if (s.size() == 1 && s[0] == i) {
        c = direct(rng);
      } else {
        const double mag = unit(rng);
        c = unit(rng) < prior.positive_share ? mag : -mag;
        ++n_other;
      }
      m.motifs[i].push_back({std::move(s), c});
    }
  }
  if (r > 0.0 && n_other == 0) {
    throw ArgumentError("sample_motif_model: r > 0 requires at least one non-self motif");
  }
  const double scale = r == 0.0 ? 0.0 : r / indirect_ratio(m);
  for (std::size_t i = 0; i < n; ++i)
    for (auto& mo : m.motifs[i])
      if (!(mo.set.size() == 1 && mo.set[0] == i)) mo.c *= scale;
  return m;
}

inline NonlinearModel sample_sigmoid_model(const InterferenceGraph& g, double r,
                                           std::uint64_t seed, double kappa = 4.0,
                                           const CoefficientPrior& prior = {}) {
  NonlinearModel m;
  m.linear_part = sample_linear_model(g, r, seed, prior);
  m.kappa = kappa;
  return m;
}

}  // namespace unite
