// Command-line front end for graph generation, simulation, estimation,
// sweeps and the oracle self-check.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "unite/unite.hpp"

using namespace unite;

namespace {

constexpr int kConfigError = 1;
constexpr int kVerifyFailure = 2;

void emit(const Json& j, const std::string& out) {
  const auto text = j.dump() + "\n";
  if (out.empty() || out == "-") std::cout << text;
  else io::write_text(out, text);
}

int cmd_generate_graph(std::size_t n, double edge_prob, std::uint64_t seed, const std::string& out) {
  emit(io::to_json(generate_erdos_renyi(n, edge_prob, seed)), out);
  return 0;
}

int cmd_sample_model(const std::string& graph_path, const std::string& kind, std::size_t beta, double r,
                     std::uint64_t seed, double kappa, const std::string& out) {
  const auto g = io::graph_from_json(io::read_json(graph_path));
  OutcomeModel m;
  if (kind == "linear") m = sample_linear_model(g, r, seed);
  else if (kind == "motif") m = sample_motif_model(g, beta, r, seed);
  else if (kind == "sigmoid") m = sample_sigmoid_model(g, r, seed, kappa);
  else throw ConfigError("unknown model kind \"" + kind + "\"");
  emit(io::to_json(m), out);
  return 0;
}

int cmd_neighborhoods(const std::string& graph_path, double add, double remove, std::uint64_t seed,
                      const std::string& out) {
  const auto g = io::graph_from_json(io::read_json(graph_path));
  emit(io::to_json(perturb_neighborhoods(g, add, remove, seed)), out);
  return 0;
}

int cmd_simulate(const std::string& graph_path, const std::string& model_path, double p, std::uint64_t seed,
                 double sigma, const std::string& out) {
  const auto g = io::graph_from_json(io::read_json(graph_path));
  const auto model = io::model_from_json(io::read_json(model_path), g);
  const auto z = bernoulli_assign(g.size(), p, derive_seed(seed, Stream::assignment, {}));
  const auto y = simulate(model, g, z, sigma, derive_seed(seed, Stream::noise, {}));
  emit(io::run_to_json(z, y), out);
  return 0;
}

std::size_t bound_order(EstimatorId id, std::size_t beta) {
  switch (id) {
    case EstimatorId::unite_lin:
    case EstimatorId::unite_dr: return 1;
    case EstimatorId::unite_beta:
    case EstimatorId::unite_beta_dr: return beta;
    default: return 0;  // no variance bound available
  }
}

int cmd_estimate(const std::string& run_path, const std::string& nb_path, const std::string& estimator,
                 std::size_t beta, double alpha, const std::string& graph_path, double sigma) {
  const auto run = io::run_from_json(io::read_json(run_path));
  const auto m = io::neighborhoods_from_json(io::read_json(nb_path));
  const auto id = parse_estimator(estimator);
  if (!id) throw ConfigError("unknown estimator \"" + estimator + "\"");
  std::optional<InterferenceGraph> g;
  if (!graph_path.empty()) g = io::graph_from_json(io::read_json(graph_path));
  EstimatorOptions opt;
  opt.beta = beta;
  if (g) opt.graph = &*g;
  EstimateReport report;
  report.estimator_id = *id;
  report.alpha = alpha;
  report.estimate = estimate(*id, run.y, run.z, m, opt);
  if (const auto order = bound_order(*id, beta); order > 0) {
    // Y_max is taken over the observed outcomes, residualized for DR.
    std::vector<double> resid(run.y);
    if (*id == EstimatorId::unite_dr || *id == EstimatorId::unite_beta_dr) {
      const auto arms = *id == EstimatorId::unite_dr ? fit_pooled_constant(run.y) : fit_constant_arms(run.y, run.z);
      for (std::size_t i = 0; i < resid.size(); ++i)
        resid[i] = std::max(std::abs(run.y[i] - arms.f0[i]), std::abs(run.y[i] - arms.f1[i]));
    }
    const VarianceBoundInputs in{run.y.size(), max_abs(resid), run.z.p(), order, max_degree(m),
                                 g ? max_degree(*g) : max_degree(m), sigma};
    report = report_with_interval(*id, report.estimate, in, alpha);
  }
  emit(io::to_json(report), "");
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& study, bool print_config,
              const std::string& out, const std::string& summary, std::size_t workers, bool timing,
              bool ablate) {
  ExperimentConfig cfg;
  if (!config_path.empty()) cfg = io::config_from_json(io::read_json(config_path));
  else if (!study.empty()) cfg = default_config(io::parse_study(study));
  else if (ablate) cfg = default_config(Study::ablation);
  else throw ConfigError("sweep: --config or --study is required");
  if (ablate && cfg.axis != Axis::neighborhood_fraction) {
    throw ConfigError("ablate: config axis must be neighborhood_fraction");
  }
  if (print_config) {
    std::cout << io::to_json(cfg).dump(2) << "\n";
    return 0;
  }
  if (out.empty()) throw ConfigError("--out is required");
  cfg.timing = timing;
  const auto records = run_trials(cfg, workers);
  io::write_text(out, io::records_csv(records));
  const auto rows = aggregate(records);
  if (!summary.empty()) io::write_text(summary, io::summary_csv(rows));
  if (ablate || summary.empty()) io::write_summary_csv(std::cout, rows);
  return 0;
}

int cmd_verify(std::size_t n_max, std::size_t cases, std::uint64_t seed) {
  VerifyOptions o;
  o.n_max = n_max;
  o.cases = cases;
  o.seed = seed;
  const auto results = run_verification(o);
  bool ok = true;
  std::printf("%-28s %6s %8s %12s %10s\n", "check", "cases", "failures", "max_error", "result");
  for (const auto& r : results) {
    std::printf("%-28s %6zu %8zu %12.3e %10s\n", r.name.c_str(), r.cases, r.failures, r.max_error,
                r.passed() ? "PASS" : "FAIL");
    if (!r.passed()) {
      ok = false;
      if (!r.first_failure.empty()) std::printf("  first failure: %s\n", r.first_failure.c_str());
    }
  }
  return ok ? 0 : kVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GATE estimation under network interference"};
  app.require_subcommand(1);

  std::size_t n = 0, beta = 1, workers = 1, n_max = 12, cases = 100;
  double edge_prob = 0.0, p = 0.5, sigma = 0.0, alpha = 0.05, r = 1.0, kappa = 4.0, add = 0.0, remove = 0.0;
  std::uint64_t seed = 0, verify_seed = VerifyOptions{}.seed;
  std::string out, graph, model, run, nbhd, estimator, config, summary, study, kind = "linear";
  bool print_config = false, timing = false;

  auto* gen = app.add_subcommand("generate-graph", "Erdos-Renyi interference graph");
  gen->add_option("--n", n, "number of units")->required()->check(CLI::PositiveNumber);
  gen->add_option("--edge-prob", edge_prob, "edge probability")->required()->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", seed)->required();
  gen->add_option("--out", out, "output path, stdout when omitted");

  auto* smp = app.add_subcommand("sample-model", "sample an outcome model for a graph");
  smp->add_option("--graph", graph)->required();
  smp->add_option("--kind", kind, "linear, motif or sigmoid");
  smp->add_option("--beta", beta, "motif order");
  smp->add_option("--r", r, "indirect-to-direct ratio");
  smp->add_option("--kappa", kappa, "sigmoid steepness");
  smp->add_option("--seed", seed)->required();
  smp->add_option("--out", out);

  auto* nbc = app.add_subcommand("neighborhoods", "neighborhood model from the true graph");
  nbc->add_option("--graph", graph)->required();
  nbc->add_option("--add", add, "fraction of extra non-neighbors");
  nbc->add_option("--remove", remove, "fraction of neighbors to drop");
  nbc->add_option("--seed", seed);
  nbc->add_option("--out", out);

  auto* sim = app.add_subcommand("simulate", "draw a Bernoulli assignment and outcomes");
  sim->add_option("--graph", graph)->required();
  sim->add_option("--model", model)->required();
  sim->add_option("--p", p)->required();
  sim->add_option("--seed", seed)->required();
  sim->add_option("--sigma", sigma, "noise standard deviation");
  sim->add_option("--out", out);

  auto* est = app.add_subcommand("estimate", "estimate the GATE from a run");
  est->add_option("--run", run)->required();
  est->add_option("--neighborhoods", nbhd)->required();
  est->add_option("--estimator", estimator)->required();
  est->add_option("--beta", beta);
  est->add_option("--alpha", alpha, "interval level");
  est->add_option("--graph", graph, "true graph (poly, and d_N in the bound)");
  est->add_option("--sigma", sigma, "noise sd used in the variance bound");

  auto* swp = app.add_subcommand("sweep", "Monte Carlo parameter sweep");
  swp->add_option("--config", config);
  swp->add_option("--study", study, "use the built-in config of a study");
  swp->add_flag("--print-config", print_config);
  swp->add_option("--out", out, "records CSV");
  swp->add_option("--summary", summary, "summary CSV");
  swp->add_option("--workers", workers)->check(CLI::PositiveNumber);
  swp->add_flag("--timing", timing, "record estimator runtimes");

  auto* abl = app.add_subcommand("ablate", "neighborhood misspecification ablation");
  abl->add_option("--config", config);
  abl->add_flag("--print-config", print_config);
  abl->add_option("--out", out, "records CSV");
  abl->add_option("--summary", summary, "summary CSV");
  abl->add_option("--workers", workers)->check(CLI::PositiveNumber);
  abl->add_flag("--timing", timing);

  auto* ver = app.add_subcommand("verify", "run the enumeration oracle suite");
  ver->add_option("--n-max", n_max)->check(CLI::Range(2, 24));
  ver->add_option("--cases", cases)->check(CLI::PositiveNumber);
  ver->add_option("--seed", verify_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*gen) return cmd_generate_graph(n, edge_prob, seed, out);
    if (*smp) return cmd_sample_model(graph, kind, beta, r, seed, kappa, out);
    if (*nbc) return cmd_neighborhoods(graph, add, remove, seed, out);
    if (*sim) return cmd_simulate(graph, model, p, seed, sigma, out);
    if (*est) return cmd_estimate(run, nbhd, estimator, beta, alpha, graph, sigma);
    if (*swp) return cmd_sweep(config, study, print_config, out, summary, workers, timing, false);
    if (*abl) return cmd_sweep(config, "", print_config, out, summary, workers, timing, true);
    if (*ver) return cmd_verify(n_max, cases, verify_seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return 0;
}
