#include "sdeest/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "sdeest/csv.hpp"
#include "sdeest/error.hpp"

namespace sdeest {

namespace {

// Runs body(i) for i in [0, n) on up to `workers` threads. The first exception
// is rethrown after all threads join.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string refinement_name(Refinement r, const std::string& start) {
  switch (r) {
    case Refinement::OneStep:
      return "OS(" + start + ")";
    case Refinement::Scoring:
      return "Scoring(" + start + ")";
    case Refinement::None:
      break;
  }
  return start;
}

EstimatorReport failed_report(std::string name, Theta start, std::string notes) {
  EstimatorReport r;
  r.name = std::move(name);
  r.theta_start = start;
  r.theta_hat = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  r.objective_value = std::numeric_limits<double>::quiet_NaN();
  r.notes = std::move(notes);
  return r;
}

std::vector<std::string> stage_names(const std::vector<PipelineSpec>& pipelines) {
  std::vector<std::string> names;
  const auto add = [&](const std::string& n) {
    if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  };
  for (const auto& p : pipelines) {
    add(pipeline_name({p.objective, Refinement::None}));
    add(pipeline_name(p));
  }
  return names;
}

void write_comment(std::ostream& out, const std::vector<std::string>& lines) {
  for (const auto& line : lines) out << "# " << line << '\n';
}

std::string optional_real(const std::optional<double>& v) { return v ? csv::real(*v) : std::string("NA"); }

}  // namespace

PipelineSpec parse_pipeline(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  PipelineSpec spec;
  std::string_view head = text;
  const auto plus = text.find('+');
  if (plus != std::string_view::npos) {
    head = text.substr(0, plus);
    const std::string_view tail = text.substr(plus + 1);
    if (tail == "onestep") {
      spec.refinement = Refinement::OneStep;
    } else if (tail == "scoring") {
      spec.refinement = Refinement::Scoring;
    } else {
      throw ConfigError(fmt::format("pipeline '{}': unknown refinement '{}' (onestep, scoring)", text, tail));
    }
  }
  spec.objective = parse_objective(head);
  return spec;
}

std::vector<PipelineSpec> parse_pipelines(std::string_view comma_list) {
  std::vector<PipelineSpec> out;
  for (auto field : csv::split(comma_list)) out.push_back(parse_pipeline(field));
  if (out.empty()) throw ConfigError("no pipelines given");
  return out;
}

std::string pipeline_name(const PipelineSpec& spec) {
  std::string start;
  switch (spec.objective) {
    case Objective::Qmle:
      start = "QMLE";
      break;
    case Objective::ClsEuler:
      start = "CLS";
      break;
    case Objective::ClsMilstein:
      start = "CLS(Milstein)";
      break;
  }
  return refinement_name(spec.refinement, start);
}

EstimationConfig PipelineSettings::config_for(Objective objective) const {
  EstimationConfig cfg;
  cfg.start = start;
  cfg.regularization_center = regularization_center;
  cfg.regularization_weight = objective == Objective::Qmle ? qmle_regularization : cls_regularization;
  cfg.objective = objective;
  cfg.optimizer = optimizer;
  cfg.derivative_backend = backend;
  return cfg;
}

std::vector<EstimatorReport> run_pipelines(const ModelSpec& model, const Trajectory& traj,
                                           const std::vector<PipelineSpec>& pipelines,
                                           const PipelineSettings& settings,
                                           std::map<std::string, std::vector<HjTraceRow>>* traces) {
  std::map<std::string, EstimatorReport> done;
  for (const auto& p : pipelines) {
    const std::string start_name = pipeline_name({p.objective, Refinement::None});
    if (!done.count(start_name)) {
      std::vector<HjTraceRow>* trace = traces ? &(*traces)[start_name] : nullptr;
      EstimatorReport r = estimate(model, traj, settings.config_for(p.objective), trace);
      r.name = start_name;
      done.emplace(start_name, std::move(r));
    }
    if (p.refinement == Refinement::None) continue;
    const std::string name = pipeline_name(p);
    if (done.count(name)) continue;
    const EstimatorReport& start = done.at(start_name);
    if (!start.converged) {
      done.emplace(name, failed_report(name, start.theta_hat, "start estimator did not converge"));
      continue;
    }
    try {
      EstimatorReport r = p.refinement == Refinement::OneStep
                              ? one_step(model, traj, start.theta_hat, settings.backend)
                              : scoring_step(model, traj, start.theta_hat, settings.backend);
      r.name = name;
      done.emplace(name, std::move(r));
    } catch (const Error& e) {
      done.emplace(name, failed_report(name, start.theta_hat, e.what()));
    }
  }
  std::vector<EstimatorReport> out;
  for (const auto& name : stage_names(pipelines)) out.push_back(done.at(name));
  return out;
}

McSummary run_experiment(const ExperimentConfig& cfg) {
  if (cfg.replications < 1) throw ConfigError("experiment needs at least 1 replication");
  if (cfg.pipelines.empty()) throw ConfigError("experiment needs at least one pipeline");
  const ModelSpec model = builtin_model(cfg.model);
  const std::vector<std::string> names = stage_names(cfg.pipelines);

  McSummary summary;
  summary.replications.resize(cfg.replications);
  parallel_for(cfg.replications, cfg.workers, [&](std::size_t i) {
    ReplicationRecord& rec = summary.replications[i];
    rec.index = i;
    rec.seed = replication_seed(cfg.sim.seed, i);
    SimConfig sim = cfg.sim;
    sim.seed = rec.seed;
    try {
      const Trajectory traj = simulate(model, sim);
      rec.reports = run_pipelines(model, traj, cfg.pipelines, cfg.settings);
    } catch (const Error& e) {
      rec.error = e.what();
      rec.reports.clear();
      for (const auto& n : names) rec.reports.push_back(failed_report(n, cfg.settings.start, rec.error));
    }
  });

  for (std::size_t j = 0; j < names.size(); ++j) {
    McRow row;
    row.estimator = names[j];
    std::vector<Theta> fits;
    for (const auto& rec : summary.replications) {
      const EstimatorReport& r = rec.reports[j];
      if (r.converged && r.theta_hat.finite()) {
        fits.push_back(r.theta_hat);
      } else {
        ++row.failures;
      }
    }
    row.converged = fits.size();
    if (fits.empty()) {
      row.mean_alpha = row.mean_beta = std::numeric_limits<double>::quiet_NaN();
    } else {
      double sa = 0.0, sb = 0.0;
      for (const auto& t : fits) {
        sa += t.alpha;
        sb += t.beta;
      }
      row.mean_alpha = sa / static_cast<double>(fits.size());
      row.mean_beta = sb / static_cast<double>(fits.size());
      if (fits.size() >= 2) {
        double va = 0.0, vb = 0.0;
        for (const auto& t : fits) {
          va += (t.alpha - row.mean_alpha) * (t.alpha - row.mean_alpha);
          vb += (t.beta - row.mean_beta) * (t.beta - row.mean_beta);
        }
        const double denom = static_cast<double>(fits.size() - 1);
        row.sd_alpha = std::sqrt(va / denom);
        row.sd_beta = std::sqrt(vb / denom);
      }
    }
    summary.rows.push_back(std::move(row));
  }
  return summary;
}

void write_summary_csv(std::ostream& out, const McSummary& summary, const std::vector<std::string>& header_comment) {
  write_comment(out, header_comment);
  out << "estimator,mean_alpha,sd_alpha,mean_beta,sd_beta,failures\n";
  for (const auto& r : summary.rows) {
    out << r.estimator << ',' << csv::real(r.mean_alpha) << ',' << optional_real(r.sd_alpha) << ','
        << csv::real(r.mean_beta) << ',' << optional_real(r.sd_beta) << ',' << r.failures << '\n';
  }
}

void write_replications_csv(std::ostream& out, const McSummary& summary,
                            const std::vector<std::string>& header_comment) {
  write_comment(out, header_comment);
  out << "replication,seed,estimator,alpha_hat,beta_hat,objective,evaluations,converged,clamps\n";
  for (const auto& rec : summary.replications) {
    for (const auto& r : rec.reports) {
      out << rec.index << ',' << rec.seed << ',' << r.name << ',' << csv::real(r.theta_hat.alpha) << ','
          << csv::real(r.theta_hat.beta) << ',' << csv::real(r.objective_value) << ',' << r.evaluations << ','
          << (r.converged ? "true" : "false") << ',' << r.clamp_count << '\n';
    }
  }
}

void write_report_header(std::ostream& out) { out << "estimator,alpha_hat,beta_hat,objective,evaluations,converged,clamps\n"; }

void write_report_row(std::ostream& out, const EstimatorReport& r) {
  out << r.name << ',' << csv::real(r.theta_hat.alpha) << ',' << csv::real(r.theta_hat.beta) << ','
      << csv::real(r.objective_value) << ',' << r.evaluations << ',' << (r.converged ? "true" : "false") << ','
      << r.clamp_count << '\n';
}

SurfaceResult loss_surface(const ObjectiveFn& objective, const SurfaceGrid& grid, unsigned workers) {
  if (grid.alpha_points < 2 || grid.beta_points < 2) throw DomainError("loss surface: resolution must be >= 2 per axis");
  const auto na = static_cast<std::size_t>(grid.alpha_points);
  const auto nb = static_cast<std::size_t>(grid.beta_points);
  SurfaceResult out;
  out.cells.resize(na * nb);
  parallel_for(na, workers, [&](std::size_t i) {
    const double alpha = grid.alpha.lo + (grid.alpha.hi - grid.alpha.lo) * static_cast<double>(i) / (na - 1);
    for (std::size_t j = 0; j < nb; ++j) {
      const double beta = grid.beta.lo + (grid.beta.hi - grid.beta.lo) * static_cast<double>(j) / (nb - 1);
      SurfaceCell& cell = out.cells[i * nb + j];
      cell.alpha = alpha;
      cell.beta = beta;
      try {
        const double v = objective({alpha, beta});
        if (std::isfinite(v)) cell.value = v;
      } catch (const Error&) {
      }
    }
  });
  out.min_value = std::numeric_limits<double>::infinity();
  for (const auto& cell : out.cells) {
    if (!cell.value) {
      ++out.error_cells;
      continue;
    }
    if (*cell.value < out.min_value) {
      out.min_value = *cell.value;
      out.argmin = {cell.alpha, cell.beta};
    }
  }
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<HjTraceRow>& trace) {
  out << "eval,alpha,beta,value,phase\n";
  for (const auto& row : trace) {
    out << row.eval << ',' << csv::real(row.theta.alpha) << ',' << csv::real(row.theta.beta) << ','
        << csv::real(row.value) << ',' << row.phase << '\n';
  }
}

void write_surface_csv(std::ostream& out, const SurfaceResult& surface, const std::vector<std::string>& header_comment) {
  write_comment(out, header_comment);
  out << "alpha,beta,value\n";
  for (const auto& c : surface.cells) {
    out << csv::real(c.alpha) << ',' << csv::real(c.beta) << ',' << (c.value ? csv::real(*c.value) : std::string())
        << '\n';
  }
}

}  // namespace sdeest
