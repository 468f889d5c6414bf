// Command-line driver: simulate, estimate, surface, montecarlo.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sdeest/config.hpp"
#include "sdeest/csv.hpp"
#include "sdeest/error.hpp"
#include "sdeest/experiments.hpp"
#include "sdeest/simulate.hpp"

namespace {

using namespace sdeest;

unsigned default_workers() {
  if (const char* env = std::getenv("SDEEST_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::string> header(const RunConfig& cfg, std::uint64_t seed) {
  return {fmt::format("sdeest {} config_hash={:016x} seed={}", SDEEST_VERSION, cfg.source_hash, seed)};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path));
  return out;
}

Trajectory read_data(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open data '{}'", path));
  return read_trajectory_csv(in);
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_path) {
  RunConfig cfg = load_run_config(config_path);
  if (seed) cfg.sim.seed = *seed;
  const Trajectory traj = simulate(builtin_model(cfg.model), cfg.sim);
  const std::string path = out_path.empty() ? cfg.out_trajectory : out_path;
  auto out = open_out(path);
  write_trajectory_csv(out, traj, header(cfg, cfg.sim.seed));
  fmt::print("n = {} transitions, X_n = {}, written to {}\n", traj.transitions(), csv::real(traj.values.back()), path);
  return 0;
}

int cmd_estimate(const std::string& config_path, const std::string& data, std::optional<std::uint64_t> seed,
                 const std::string& out_path) {
  RunConfig cfg = load_run_config(config_path);
  if (seed) cfg.sim.seed = *seed;
  const ModelSpec model = builtin_model(cfg.model);
  const Trajectory traj = data.empty() ? simulate(model, cfg.sim) : read_data(data);

  std::map<std::string, std::vector<HjTraceRow>> traces;
  const auto reports = run_pipelines(model, traj, cfg.pipelines, cfg.settings, cfg.out_trace.empty() ? nullptr : &traces);

  const std::string path = out_path.empty() ? cfg.out_report : out_path;
  auto out = open_out(path);
  for (const auto& line : header(cfg, cfg.sim.seed)) out << "# " << line << '\n';
  write_report_header(out);
  bool ok = true;
  for (const auto& r : reports) {
    write_report_row(out, r);
    fmt::print("{:<14} alpha = {:<12.6f} beta = {:<12.6f} objective = {:<14.6f} evals = {:<6} {}{}\n", r.name,
               r.theta_hat.alpha, r.theta_hat.beta, r.objective_value, r.evaluations,
               r.converged ? "converged" : "NOT converged", r.notes.empty() ? "" : " (" + r.notes + ")");
    ok = ok && r.converged;
  }
  if (!cfg.out_trace.empty()) {
    auto trace_out = open_out(cfg.out_trace);
    for (const auto& [stage, rows] : traces) {
      trace_out << "# stage " << stage << '\n';
      write_trace_csv(trace_out, rows);
    }
  }
  return ok ? 0 : 2;
}

int cmd_surface(const std::string& config_path, const std::string& data, const std::string& out_path) {
  const RunConfig cfg = load_run_config(config_path);
  const ModelSpec model = builtin_model(cfg.model);
  const Trajectory traj = data.empty() ? simulate(model, cfg.sim) : read_data(data);

  EstimationConfig est = cfg.settings.config_for(cfg.surface_objective);
  est.regularization_weight = cfg.surface_regularization;
  const SurfaceResult surface =
      loss_surface(objective_function(model, traj, est), cfg.surface, cfg.workers.value_or(default_workers()));

  const std::string path = out_path.empty() ? cfg.out_surface : out_path;
  auto out = open_out(path);
  write_surface_csv(out, surface, header(cfg, cfg.sim.seed));
  fmt::print("{} cells ({} empty), argmin alpha = {}, beta = {}, value = {}\n", surface.cells.size(),
             surface.error_cells, csv::real(surface.argmin.alpha), csv::real(surface.argmin.beta),
             csv::real(surface.min_value));
  return 0;
}

int cmd_montecarlo(const std::string& config_path, std::optional<std::size_t> replications,
                   std::optional<unsigned> workers, const std::string& out_path) {
  RunConfig cfg = load_run_config(config_path);
  if (replications) cfg.replications = *replications;
  ExperimentConfig exp = cfg.experiment(default_workers());
  if (workers) exp.workers = *workers;
  const McSummary summary = run_experiment(exp);

  const std::string path = out_path.empty() ? cfg.out_summary : out_path;
  auto out = open_out(path);
  write_summary_csv(out, summary, header(cfg, cfg.sim.seed));
  if (!cfg.out_replications.empty()) {
    auto rep = open_out(cfg.out_replications);
    write_replications_csv(rep, summary, header(cfg, cfg.sim.seed));
  }
  fmt::print("{:<14} {:>12} {:>12} {:>12} {:>12} {:>8}\n", "estimator", "mean_alpha", "sd_alpha", "mean_beta",
             "sd_beta", "failures");
  for (const auto& r : summary.rows) {
    fmt::print("{:<14} {:>12.6f} {:>12} {:>12.6f} {:>12} {:>8}\n", r.estimator, r.mean_alpha,
               r.sd_alpha ? fmt::format("{:.6f}", *r.sd_alpha) : "NA", r.mean_beta,
               r.sd_beta ? fmt::format("{:.6f}", *r.sd_beta) : "NA", r.failures);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter estimation for discretely observed scalar diffusions"};
  app.require_subcommand(1);

  std::string config, out, data;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  std::optional<unsigned> workers;
  bool simulate_flag = false;

  auto* sim = app.add_subcommand("simulate", "Simulate a Milstein trajectory and write it as CSV");
  sim->add_option("config", config, "Run configuration file")->required();
  sim->add_option("--seed", seed, "Override [simulation] seed");
  sim->add_option("--out", out, "Output CSV path");

  auto* est = app.add_subcommand("estimate", "Run the configured estimator pipelines on one trajectory");
  est->add_option("config", config, "Run configuration file")->required();
  auto* data_opt = est->add_option("--data", data, "Trajectory CSV to fit");
  est->add_flag("--simulate", simulate_flag, "Simulate the trajectory from [simulation]")->excludes(data_opt);
  est->add_option("--seed", seed, "Override [simulation] seed");
  est->add_option("--out", out, "Report CSV path");

  auto* surf = app.add_subcommand("surface", "Evaluate an objective on a parameter grid");
  surf->add_option("config", config, "Run configuration file")->required();
  surf->add_option("--data", data, "Trajectory CSV (default: simulate from config)");
  surf->add_option("--out", out, "Grid CSV path");

  auto* mc = app.add_subcommand("montecarlo", "Monte Carlo comparison of estimators");
  mc->add_option("config", config, "Run configuration file")->required();
  mc->add_option("--replications", replications, "Override [experiment] replications");
  mc->add_option("--workers", workers, "Worker threads (default: SDEEST_WORKERS or hardware)");
  mc->add_option("--out", out, "Summary CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config, seed, out);
    if (est->parsed()) {
      if (data.empty() && !simulate_flag) throw ConfigError("estimate needs --data <csv> or --simulate");
      return cmd_estimate(config, data, seed, out);
    }
    if (surf->parsed()) return cmd_surface(config, data, out);
    if (mc->parsed()) return cmd_montecarlo(config, replications, workers, out);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}
