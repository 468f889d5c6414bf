#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sdeest/experiments.hpp"

namespace sdeest {

/// Settings read from an INI-style run file.
///
///   [model]       name
///   [simulation]  alpha beta x0 horizon step seed
///   [estimation]  start_alpha start_beta pipelines qmle_regularization
///                 cls_regularization regularization_center_beta derivative_backend
///   [optimizer]   initial_step step_divisor acceleration tol max_evals
///                 alpha_min alpha_max beta_min beta_max
///   [experiment]  replications workers
///   [surface]     objective regularization alpha_min alpha_max beta_min beta_max resolution
///   [output]      trajectory report surface summary replications trace
///
/// Unknown sections or keys are errors. Missing keys keep the defaults below.
struct RunConfig {
  std::string model = "sin-diffusion";
  SimConfig sim{{1.0, 2.0}, 0.0, 10000.0, 0.8, 1};
  std::vector<PipelineSpec> pipelines{{Objective::Qmle, Refinement::None}};
  PipelineSettings settings;
  std::size_t replications = 100;
  std::optional<unsigned> workers;

  Objective surface_objective = Objective::Qmle;
  double surface_regularization = 0.0;
  SurfaceGrid surface;

  std::string out_trajectory = "trajectory.csv";
  std::string out_report = "report.csv";
  std::string out_surface = "surface.csv";
  std::string out_summary = "summary.csv";
  std::string out_replications;  // empty: not written
  std::string out_trace;         // empty: not written

  std::uint64_t source_hash = 0;  // FNV-1a of the file bytes

  [[nodiscard]] ExperimentConfig experiment(unsigned default_workers) const;
};

/// Throws ConfigError with the line number for syntax errors and the section/key
/// for invalid or unknown entries.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

std::uint64_t fnv1a(const std::string& bytes);

}  // namespace sdeest
