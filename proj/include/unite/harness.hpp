#pragma once

// Monte Carlo experiment runner: sweeps over one axis, many graphs, many
// assignments per graph, every requested estimator per assignment.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <variant>
#include <vector>

#include "unite/airbnb.hpp"
#include "unite/assign.hpp"
#include "unite/errors.hpp"
#include "unite/estimators.hpp"
#include "unite/graph.hpp"
#include "unite/outcomes.hpp"
#include "unite/random.hpp"

namespace unite {

enum class Study { er_sweep, airbnb, ablation };
enum class Axis { r, n, p, neighborhood_fraction, alpha };
enum class ModelKind { linear, quadratic, sigmoid };

inline std::string_view to_string(Study s) {
  switch (s) {
    case Study::er_sweep: return "er_sweep";
    case Study::airbnb: return "airbnb";
    case Study::ablation: return "ablation";
  }
  return "?";
}

inline std::string_view to_string(Axis a) {
  switch (a) {
    case Axis::r: return "r";
    case Axis::n: return "n";
    case Axis::p: return "p";
    case Axis::neighborhood_fraction: return "neighborhood_fraction";
    case Axis::alpha: return "alpha";
  }
  return "?";
}

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::linear: return "linear";
    case ModelKind::quadratic: return "quadratic";
    case ModelKind::sigmoid: return "sigmoid";
  }
  return "?";
}

struct ExperimentConfig {
  Study study = Study::er_sweep;
  Axis axis = Axis::r;
  std::vector<double> axis_values;

  std::size_t n = 1000;
  double p = 0.5;
  double r = 1.0;
  std::size_t beta = 2;
  double sigma = 0.1;
  std::optional<double> edge_prob;  // takes precedence over mean_degree
  double mean_degree = 5.0;         // expected non-self neighbors
  std::vector<EstimatorId> estimators{EstimatorId::unite_lin, EstimatorId::dm};
  std::size_t graphs = 50;
  std::size_t trials = 20;
  std::uint64_t master_seed = 1;
  ModelKind model_kind = ModelKind::linear;
  double neighborhood_fraction = 0.0;  // negative removes, positive adds
  double kappa = 4.0;
  std::size_t poly_degree = 2;
  MarketConfig market;
  std::size_t oracle_replications = 1000;
  bool timing = false;  // measured runtimes make output nondeterministic
};

// Marketplace used by the airbnb study: sparser than the MarketConfig
// defaults so the treatment effect is not swamped by competition.
inline MarketConfig study_market_config() {
  MarketConfig m;
  m.n_customers = 4000;
  m.n_listings = 4000;
  m.consider_size = 2;
  return m;
}

inline ExperimentConfig default_config(Study s) {
  ExperimentConfig c;
  c.study = s;
  switch (s) {
    case Study::er_sweep:
      c.axis = Axis::r;
      c.axis_values = {0.0, 0.25, 0.5, 1.0, 2.0};
      c.estimators = {EstimatorId::ht,        EstimatorId::unite_lin, EstimatorId::unite_wis1,
                      EstimatorId::unite_dr,  EstimatorId::dm,        EstimatorId::poly};
      break;
    case Study::ablation:
      c.axis = Axis::neighborhood_fraction;
      c.axis_values = {-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0};
      c.mean_degree = 10.0;
      c.estimators = {EstimatorId::unite_lin};
      break;
    case Study::airbnb:
      c.axis = Axis::alpha;
      c.axis_values = {1.25, 1.5, 2.0};
      c.market = study_market_config();
      c.n = c.market.n_customers;
      c.graphs = 25;
      c.sigma = 0.0;
      c.estimators = {EstimatorId::unite_lin, EstimatorId::dm};
      break;
  }
  return c;
}

inline void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
  if (c.axis_values.empty()) fail("axis_values must be non-empty");
  if (c.trials < 1) fail("trials must be >= 1");
  if (c.graphs < 1) fail("graphs must be >= 1");
  if (c.estimators.empty()) fail("estimators must be non-empty");
  if (c.beta < 1) fail("beta must be >= 1");
  if (c.sigma < 0.0) fail("sigma must be >= 0");
  if (c.poly_degree != 1 && c.poly_degree != 2) fail("poly_degree must be 1 or 2");
  if (c.edge_prob && !(*c.edge_prob >= 0.0 && *c.edge_prob <= 1.0)) fail("edge_prob must be in [0, 1]");
  if (!(c.mean_degree >= 0.0)) fail("mean_degree must be >= 0");
  if (c.study == Study::airbnb && c.axis != Axis::alpha && c.axis != Axis::p &&
      c.axis != Axis::neighborhood_fraction) {
    fail("airbnb study supports axes alpha, p, neighborhood_fraction");
  }
  if (c.study != Study::airbnb && c.axis == Axis::alpha) fail("axis alpha requires study airbnb");
  if (c.study == Study::ablation && c.axis != Axis::neighborhood_fraction) {
    fail("ablation study requires axis neighborhood_fraction");
  }
  for (double v : c.axis_values) {
    if (!std::isfinite(v)) fail("axis values must be finite");
    switch (c.axis) {
      case Axis::r:
        if (v < 0.0) fail("r must be >= 0");
        break;
      case Axis::n:
        if (v < 2.0 || v != std::floor(v)) fail("n values must be integers >= 2");
        break;
      case Axis::p:
        if (!(v > 0.0 && v < 1.0)) fail("p values must be in (0, 1)");
        break;
      case Axis::neighborhood_fraction:
        if (v < -1.0) fail("neighborhood_fraction must be >= -1");
        break;
      case Axis::alpha:
        if (v < 1.0) fail("alpha must be >= 1");
        break;
    }
  }
  if (!(c.p > 0.0 && c.p < 1.0)) fail("p must be in (0, 1)");
  if (c.study == Study::airbnb) {
    if (c.oracle_replications < 1) fail("oracle_replications must be >= 1");
    try {
      validate(c.market);
    } catch (const ArgumentError& e) {
      fail(e.what());
    }
  } else if (c.n < 2) {
    fail("n must be >= 2");
  }
}

// Copy of `c` with the axis parameter set to `v`.
inline ExperimentConfig at_axis_value(const ExperimentConfig& c, double v) {
  ExperimentConfig out = c;
  switch (c.axis) {
    case Axis::r: out.r = v; break;
    case Axis::n: out.n = static_cast<std::size_t>(v); break;
    case Axis::p: out.p = v; break;
    case Axis::neighborhood_fraction: out.neighborhood_fraction = v; break;
    case Axis::alpha: out.market.alpha = v; break;
  }
  return out;
}

inline double resolved_edge_prob(const ExperimentConfig& c) {
  if (c.edge_prob) return *c.edge_prob;
  return std::min(1.0, c.mean_degree / static_cast<double>(c.n - 1));
}

struct TrialRecord {
  Study study = Study::er_sweep;
  Axis axis = Axis::r;
  double axis_value = 0.0;
  std::uint64_t graph_seed = 0;
  std::size_t trial = 0;
  EstimatorId estimator = EstimatorId::unite_lin;
  double estimate = std::numeric_limits<double>::quiet_NaN();
  double true_tau = 0.0;
  double rel_bias = std::numeric_limits<double>::quiet_NaN();
  std::string flag;  // empty when the estimator succeeded
  double runtime_ms = 0.0;

  bool ok() const { return flag.empty(); }
};

namespace detail {

inline NeighborhoodModel ablated_neighborhoods(const InterferenceGraph& g, double fraction,
                                               std::uint64_t seed) {
  if (fraction > 0.0) return perturb_neighborhoods(g, fraction, 0.0, seed);
  if (fraction < 0.0) return perturb_neighborhoods(g, 0.0, -fraction, seed);
  return neighborhood_model_from_truth(g);
}

struct Cell {
  InterferenceGraph graph;
  NeighborhoodModel neighborhoods;
  std::optional<OutcomeModel> model;    // synthetic studies
  std::optional<MarketInstance> market;  // airbnb
  double tau = 0.0;
};

inline Cell build_cell(const ExperimentConfig& c, std::uint64_t graph_seed, std::size_t g) {
  const std::uint64_t key = g;
  Cell cell;
  if (c.study == Study::airbnb) {
    auto m = build_market(c.market, graph_seed);
    cell.graph = market_interference_graph(m);
    cell.tau = market_gate_oracle(m, c.market, c.oracle_replications,
                                  derive_seed(c.master_seed, Stream::oracle, {key}))
                   .tau;
    cell.market = std::move(m);
  } else {
    cell.graph = generate_erdos_renyi(c.n, resolved_edge_prob(c), graph_seed);
    const auto model_seed = derive_seed(c.master_seed, Stream::model, {key});
    switch (c.model_kind) {
      case ModelKind::linear: cell.model = sample_linear_model(cell.graph, c.r, model_seed); break;
      case ModelKind::quadratic: cell.model = sample_motif_model(cell.graph, 2, c.r, model_seed); break;
      case ModelKind::sigmoid:
        cell.model = sample_sigmoid_model(cell.graph, c.r, model_seed, c.kappa);
        break;
    }
    cell.tau = gate_oracle(*cell.model, cell.graph);
  }
  cell.neighborhoods = ablated_neighborhoods(cell.graph, c.neighborhood_fraction,
                                             derive_seed(c.master_seed, Stream::perturb, {key}));
  return cell;
}

inline std::vector<TrialRecord> run_cell(const ExperimentConfig& c, double axis_value, std::size_t g) {
  const std::uint64_t key = g;
  const auto graph_seed = derive_seed(c.master_seed, Stream::graph, {key});
  const Cell cell = build_cell(c, graph_seed, g);
  EstimatorOptions opt;
  opt.beta = c.beta;
  opt.graph = &cell.graph;
  opt.poly_degree = c.poly_degree;
  std::vector<TrialRecord> out;
  out.reserve(c.trials * c.estimators.size());
  for (std::size_t t = 0; t < c.trials; ++t) {
    const auto z = bernoulli_assign(cell.graph.size(), c.p,
                                    derive_seed(c.master_seed, Stream::assignment, {key, t}));
    const auto noise_seed = derive_seed(c.master_seed, Stream::noise, {key, t});
    const auto y = cell.market ? market_simulate(*cell.market, c.market, z, noise_seed)
                               : simulate(*cell.model, cell.graph, z, c.sigma, noise_seed);
    for (auto id : c.estimators) {
      TrialRecord rec;
      rec.study = c.study;
      rec.axis = c.axis;
      rec.axis_value = axis_value;
      rec.graph_seed = graph_seed;
      rec.trial = t;
      rec.estimator = id;
      rec.true_tau = cell.tau;
      const auto start = std::chrono::steady_clock::now();
      try {
        rec.estimate = estimate(id, y, z, cell.neighborhoods, opt);
        if (cell.tau != 0.0) rec.rel_bias = (rec.estimate - cell.tau) / cell.tau;
      } catch (const DegenerateAssignment&) {
        rec.flag = "degenerate";
      } catch (const RankDeficient&) {
        rec.flag = "rank_deficient";
      } catch (const std::exception&) {
        rec.flag = "error";
      }
      if (c.timing) {
        rec.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                             .count();
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace detail

// Records in canonical order (axis value, graph, trial, estimator) for any
// worker count.
inline std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg, std::size_t workers = 1) {
  validate(cfg);
  const std::size_t cells = cfg.axis_values.size() * cfg.graphs;
  std::vector<std::vector<TrialRecord>> slots(cells);
  std::vector<std::string> errors(cells);
  auto run = [&](std::size_t k) {
    const std::size_t a = k / cfg.graphs, g = k % cfg.graphs;
    const double v = cfg.axis_values[a];
    try {
      slots[k] = detail::run_cell(at_axis_value(cfg, v), v, g);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, cells);
  if (workers == 1) {
    for (std::size_t k = 0; k < cells; ++k) run(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < cells; k = next++) run(k);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) throw ConfigError("run_trials: " + e);
  std::vector<TrialRecord> out;
  for (auto& s : slots) out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  return out;
}

struct SummaryRow {
  EstimatorId estimator = EstimatorId::unite_lin;
  Axis axis = Axis::r;
  double axis_value = 0.0;
  double mean_rel_bias = 0.0;
  double abs_mean_rel_bias = 0.0;
  double sd = 0.0;  // sample sd of rel_bias, 0 for a single record
  double rmse = 0.0;
  std::size_t n_ok = 0;
  std::size_t n_flagged = 0;
};

// One row per (estimator, axis value) in order of first appearance.
// Records without a finite rel_bias count as flagged.
inline std::vector<SummaryRow> aggregate(const std::vector<TrialRecord>& records) {
  detail::require(!records.empty(), "aggregate: no records");
  struct Acc {
    SummaryRow row;
    std::vector<double> values;
  };
  std::vector<Acc> accs;
  std::map<std::tuple<int, double>, std::size_t> index;
  for (const auto& r : records) {
    const auto key = std::make_tuple(static_cast<int>(r.estimator), r.axis_value);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, accs.size()).first;
      Acc a;
      a.row.estimator = r.estimator;
      a.row.axis = r.axis;
      a.row.axis_value = r.axis_value;
      accs.push_back(std::move(a));
    }
    auto& acc = accs[it->second];
    if (r.ok() && std::isfinite(r.rel_bias)) acc.values.push_back(r.rel_bias);
    else ++acc.row.n_flagged;
  }
  std::vector<SummaryRow> out;
  out.reserve(accs.size());
  for (auto& a : accs) {
    const auto& v = a.values;
    auto& row = a.row;
    row.n_ok = v.size();
    if (!v.empty()) {
      double s = 0.0, sq = 0.0;
      for (double x : v) {
        s += x;
        sq += x * x;
      }
      const double k = static_cast<double>(v.size());
      row.mean_rel_bias = s / k;
      row.abs_mean_rel_bias = std::abs(row.mean_rel_bias);
      row.rmse = std::sqrt(sq / k);
      if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - row.mean_rel_bias) * (x - row.mean_rel_bias);
        row.sd = std::sqrt(ss / (k - 1.0));
      }
    } else {
      row.mean_rel_bias = row.abs_mean_rel_bias = row.rmse = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(row);
  }
  return out;
}

// Fixed graph and model per seed, neighborhoods varied along the axis.
inline std::vector<SummaryRow> ablation_study(const ExperimentConfig& cfg, std::size_t workers = 1) {
  if (cfg.axis != Axis::neighborhood_fraction) {
    throw ConfigError("ablation_study: axis must be neighborhood_fraction");
  }
  return aggregate(run_trials(cfg, workers));
}

}  // namespace unite
