#pragma once

// JSON documents and CSV tables used by the CLI.

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "unite/airbnb.hpp"
#include "unite/assign.hpp"
#include "unite/errors.hpp"
#include "unite/estimators.hpp"
#include "unite/graph.hpp"
#include "unite/harness.hpp"
#include "unite/inference.hpp"
#include "unite/outcomes.hpp"

namespace unite {

using Json = nlohmann::json;

namespace io {

inline Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  if (!out) throw ConfigError("write failed: " + path);
}

// Shortest round-trip representation.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

template <class T>
T get(const Json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw ConfigError(std::string(what) + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string(what) + ": bad \"" + key + "\": " + e.what());
  }
}

// Rethrow library argument errors on malformed documents as config errors.
template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

}  // namespace detail

// ---- graph: {"n": int, "edges": [[i, j], ...]}

inline Json to_json(const InterferenceGraph& g) {
  Json edges = Json::array();
  for (auto [i, j] : g.edges()) edges.push_back({i, j});
  return {{"n", g.size()}, {"edges", edges}};
}

inline InterferenceGraph graph_from_json(const Json& j) {
  return detail::guarded("graph", [&] {
    const auto n = detail::get<std::size_t>(j, "n", "graph");
    const auto edges = detail::get<std::vector<std::pair<std::size_t, std::size_t>>>(j, "edges", "graph");
    return InterferenceGraph::from_edges(n, edges);
  });
}

// ---- neighborhoods: {"n": int, "neighborhoods": [[...], ...]}

inline Json to_json(const NeighborhoodModel& m) {
  return {{"n", m.size()}, {"neighborhoods", m.sets()}};
}

inline NeighborhoodModel neighborhoods_from_json(const Json& j) {
  return detail::guarded("neighborhoods", [&] {
    auto sets = detail::get<std::vector<NodeSet>>(j, "neighborhoods", "neighborhoods");
    if (j.contains("n") && j.at("n").get<std::size_t>() != sets.size()) {
      throw ConfigError("neighborhoods: n does not match the number of sets");
    }
    return NeighborhoodModel(std::move(sets));
  });
}

// ---- outcome model

inline Json to_json(const LinearAdditiveModel& m, const char* kind = "linear") {
  Json coef = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    coef.push_back({{"i", i}, {"set", NodeSet{i}}, {"c", m.direct[i]}});
    for (const auto& e : m.indirect[i]) coef.push_back({{"i", i}, {"set", NodeSet{e.j}}, {"c", e.c}});
  }
  return {{"kind", kind}, {"baseline", m.baseline}, {"coefficients", coef}};
}

inline Json to_json(const MotifModel& m) {
  Json coef = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i)
    for (const auto& mo : m.motifs[i]) coef.push_back({{"i", i}, {"set", mo.set}, {"c", mo.c}});
  return {{"kind", "motif"}, {"beta", m.beta}, {"baseline", m.baseline}, {"coefficients", coef}};
}

inline Json to_json(const NonlinearModel& m) {
  Json j = to_json(m.linear_part, "sigmoid");
  j["kappa"] = m.kappa;
  return j;
}

inline Json to_json(const OutcomeModel& m) {
  return std::visit([](const auto& x) { return to_json(x); }, m);
}

inline LinearAdditiveModel linear_from_coefficients(const Json& j, const InterferenceGraph& g) {
  auto m = zero_linear_model(g);
  m.baseline = detail::get<std::vector<double>>(j, "baseline", "model");
  unite::detail::require_same_size(m.baseline.size(), g.size(), "model baseline");
  for (const auto& c : detail::get<Json>(j, "coefficients", "model")) {
    const auto i = detail::get<std::size_t>(c, "i", "coefficient");
    const auto set = detail::get<NodeSet>(c, "set", "coefficient");
    const auto v = detail::get<double>(c, "c", "coefficient");
    if (set.size() != 1) throw ConfigError("linear model coefficients need singleton sets");
    if (i >= g.size()) throw ConfigError("coefficient node out of range");
    if (set[0] == i) m.direct[i] = v;
    else indirect_coefficient(m, i, set[0]) = v;
  }
  return m;
}

// Coefficient keys are validated against the graph.
inline OutcomeModel model_from_json(const Json& j, const InterferenceGraph& g) {
  return detail::guarded("model", [&]() -> OutcomeModel {
    const auto kind = detail::get<std::string>(j, "kind", "model");
    if (kind == "linear") {
      return linear_from_coefficients(j, g);
    }
    if (kind == "sigmoid") {
      NonlinearModel m;
      m.linear_part = linear_from_coefficients(j, g);
      if (j.contains("kappa")) m.kappa = j.at("kappa").get<double>();
      return m;
    }
    if (kind == "motif") {
      MotifModel m;
      m.baseline = detail::get<std::vector<double>>(j, "baseline", "model");
      m.motifs.resize(m.baseline.size());
      std::size_t top = 1;
      for (const auto& c : detail::get<Json>(j, "coefficients", "model")) {
        const auto i = detail::get<std::size_t>(c, "i", "coefficient");
        auto set = detail::get<NodeSet>(c, "set", "coefficient");
        if (i >= m.motifs.size()) throw ConfigError("coefficient node out of range");
        top = std::max(top, set.size());
        m.motifs[i].push_back({std::move(set), detail::get<double>(c, "c", "coefficient")});
      }
      m.beta = j.contains("beta") ? j.at("beta").get<std::size_t>() : top;
      for (auto& row : m.motifs)
        std::sort(row.begin(), row.end(),
                  [](const Motif& a, const Motif& b) { return unite::detail::motif_less(a.set, b.set); });
      validate(m, g);
      return m;
    }
    throw ConfigError("model: unknown kind \"" + kind + "\"");
  });
}

// ---- run: {"p": real, "z": [0/1...], "y": [...]}

struct Run {
  Assignment z;
  OutcomeVector y;
};

inline Json to_json(const Assignment& z) { return {{"p", z.p()}, {"z", z.z()}}; }

inline Json run_to_json(const Assignment& z, const OutcomeVector& y) {
  Json j = to_json(z);
  j["y"] = y;
  return j;
}

inline Run run_from_json(const Json& j) {
  return detail::guarded("run", [&] {
    Assignment z(detail::get<std::vector<std::uint8_t>>(j, "z", "run"), detail::get<double>(j, "p", "run"));
    auto y = detail::get<OutcomeVector>(j, "y", "run");
    unite::detail::require_same_size(y.size(), z.size(), "run: y and z");
    return Run{std::move(z), std::move(y)};
  });
}

// ---- estimate report

inline Json to_json(const EstimateReport& r) {
  Json j{{"estimator", std::string(to_string(r.estimator_id))}, {"estimate", r.estimate}};
  if (r.variance_bound) j["variance_bound"] = *r.variance_bound;
  if (r.interval) {
    j["interval"] = {r.interval->lo, r.interval->hi};
    j["alpha"] = r.alpha;
  }
  return j;
}

// ---- market config

inline Json to_json(const MarketConfig& m) {
  return {{"n_customers", m.n_customers}, {"n_listings", m.n_listings},
          {"n_types", m.n_types},         {"consider_size", m.consider_size},
          {"q_match", m.q_match},         {"q_mismatch", m.q_mismatch},
          {"alpha", m.alpha}};
}

inline MarketConfig market_from_json(const Json& j, MarketConfig m = {}) {
  return detail::guarded("market", [&] {
    for (const auto& [k, v] : j.items()) {
      if (k == "n_customers") m.n_customers = v.get<std::size_t>();
      else if (k == "n_listings") m.n_listings = v.get<std::size_t>();
      else if (k == "n_types") m.n_types = v.get<std::size_t>();
      else if (k == "consider_size") m.consider_size = v.get<std::size_t>();
      else if (k == "q_match") m.q_match = v.get<double>();
      else if (k == "q_mismatch") m.q_mismatch = v.get<double>();
      else if (k == "alpha") m.alpha = v.get<double>();
      else throw ConfigError("market: unknown field \"" + k + "\"");
    }
    validate(m);
    return m;
  });
}

// ---- experiment config
//
// {"study": "er_sweep"|"airbnb"|"ablation", "axis": "...", "axis_values": [...],
//  "fixed": {"n", "p", "r", "beta", "sigma", "edge_prob", "mean_degree", "estimators",
//            "graphs", "trials", "master_seed", "model_kind", "neighborhood_fraction",
//            "kappa", "poly_degree", "market", "oracle_replications"}}
// Omitted fields take the study defaults.

inline Study parse_study(const std::string& s) {
  for (auto v : {Study::er_sweep, Study::airbnb, Study::ablation})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown study \"" + s + "\"");
}

inline Axis parse_axis(const std::string& s) {
  for (auto v : {Axis::r, Axis::n, Axis::p, Axis::neighborhood_fraction, Axis::alpha})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown axis \"" + s + "\"");
}

inline ModelKind parse_model_kind(const std::string& s) {
  for (auto v : {ModelKind::linear, ModelKind::quadratic, ModelKind::sigmoid})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown model_kind \"" + s + "\"");
}

inline ExperimentConfig config_from_json(const Json& j) {
  return detail::guarded("config", [&] {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [k, v] : j.items()) {
      if (k != "study" && k != "axis" && k != "axis_values" && k != "fixed") {
        throw ConfigError("config: unknown field \"" + k + "\"");
      }
    }
    auto c = default_config(parse_study(detail::get<std::string>(j, "study", "config")));
    if (j.contains("axis")) c.axis = parse_axis(j.at("axis").get<std::string>());
    if (j.contains("axis_values")) c.axis_values = j.at("axis_values").get<std::vector<double>>();
    const Json fixed = j.value("fixed", Json::object());
    for (const auto& [k, v] : fixed.items()) {
      if (k == "n") c.n = v.get<std::size_t>();
      else if (k == "p") c.p = v.get<double>();
      else if (k == "r") c.r = v.get<double>();
      else if (k == "beta") c.beta = v.get<std::size_t>();
      else if (k == "sigma") c.sigma = v.get<double>();
      else if (k == "edge_prob") c.edge_prob = v.get<double>();
      else if (k == "mean_degree") c.mean_degree = v.get<double>();
      else if (k == "graphs") c.graphs = v.get<std::size_t>();
      else if (k == "trials") c.trials = v.get<std::size_t>();
      else if (k == "master_seed") c.master_seed = v.get<std::uint64_t>();
      else if (k == "model_kind") c.model_kind = parse_model_kind(v.get<std::string>());
      else if (k == "neighborhood_fraction") c.neighborhood_fraction = v.get<double>();
      else if (k == "kappa") c.kappa = v.get<double>();
      else if (k == "poly_degree") c.poly_degree = v.get<std::size_t>();
      else if (k == "oracle_replications") c.oracle_replications = v.get<std::size_t>();
      else if (k == "market") c.market = market_from_json(v, c.market);
      else if (k == "estimators") {
        c.estimators.clear();
        for (const auto& s : v) {
          const auto id = parse_estimator(s.get<std::string>());
          if (!id) throw ConfigError("unknown estimator \"" + s.get<std::string>() + "\"");
          c.estimators.push_back(*id);
        }
      } else {
        throw ConfigError("config: unknown fixed parameter \"" + k + "\"");
      }
    }
    if (c.study == Study::airbnb) c.n = c.market.n_customers;
    validate(c);
    return c;
  });
}

inline Json to_json(const ExperimentConfig& c) {
  Json est = Json::array();
  for (auto id : c.estimators) est.push_back(std::string(to_string(id)));
  Json fixed{{"p", c.p},
             {"beta", c.beta},
             {"sigma", c.sigma},
             {"estimators", est},
             {"graphs", c.graphs},
             {"trials", c.trials},
             {"master_seed", c.master_seed},
             {"neighborhood_fraction", c.neighborhood_fraction}};
  if (c.study == Study::airbnb) {
    fixed["market"] = to_json(c.market);
    fixed["oracle_replications"] = c.oracle_replications;
  } else {
    fixed["n"] = c.n;
    fixed["r"] = c.r;
    if (c.edge_prob) fixed["edge_prob"] = *c.edge_prob;
    else fixed["mean_degree"] = c.mean_degree;
    fixed["model_kind"] = std::string(to_string(c.model_kind));
    fixed["kappa"] = c.kappa;
    fixed["poly_degree"] = c.poly_degree;
  }
  return {{"study", std::string(to_string(c.study))},
          {"axis", std::string(to_string(c.axis))},
          {"axis_values", c.axis_values},
          {"fixed", fixed}};
}

// ---- CSV

inline constexpr const char* kRecordHeader =
    "study,axis,axis_value,graph_seed,trial,estimator,estimate,true_tau,rel_bias,flag,runtime_ms";
inline constexpr const char* kSummaryHeader =
    "estimator,axis,axis_value,mean_rel_bias,abs_mean_rel_bias,sd,rmse,n_ok,n_flagged";

inline void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << kRecordHeader << '\n';
  for (const auto& r : records) {
    out << to_string(r.study) << ',' << to_string(r.axis) << ',' << format_double(r.axis_value) << ','
        << r.graph_seed << ',' << r.trial << ',' << to_string(r.estimator) << ',';
    if (r.ok()) out << format_double(r.estimate);
    out << ',' << format_double(r.true_tau) << ',';
    if (r.ok() && std::isfinite(r.rel_bias)) out << format_double(r.rel_bias);
    out << ',' << r.flag << ',' << format_double(r.runtime_ms) << '\n';
  }
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& s : rows) {
    out << to_string(s.estimator) << ',' << to_string(s.axis) << ',' << format_double(s.axis_value) << ','
        << format_double(s.mean_rel_bias) << ',' << format_double(s.abs_mean_rel_bias) << ','
        << format_double(s.sd) << ',' << format_double(s.rmse) << ',' << s.n_ok << ',' << s.n_flagged
        << '\n';
  }
}

inline std::string records_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream s;
  write_records_csv(s, records);
  return s.str();
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream s;
  write_summary_csv(s, rows);
  return s.str();
}

}  // namespace io
}  // namespace unite
