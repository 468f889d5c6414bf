#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdeest/estimators.hpp"
#include "sdeest/simulate.hpp"

namespace sdeest {

enum class Refinement { None, OneStep, Scoring };

/// A starting estimator optionally followed by one refinement step.
/// Text form: `<objective>[+onestep|+scoring]`, e.g. `cls-milstein+scoring`.
struct PipelineSpec {
  Objective objective = Objective::Qmle;
  Refinement refinement = Refinement::None;
};

PipelineSpec parse_pipeline(std::string_view text);
std::vector<PipelineSpec> parse_pipelines(std::string_view comma_list);

/// Row name of the final stage: QMLE, CLS, OS(QMLE), Scoring(CLS), ...
std::string pipeline_name(const PipelineSpec& spec);

/// Estimation knobs shared by all pipelines of a run. QMLE and CLS stages carry
/// separate penalty weights; both are centered on `regularization_center` (start if unset).
struct PipelineSettings {
  Theta start{0.5, 1.0};
  std::optional<Theta> regularization_center;
  double qmle_regularization = 0.0;
  double cls_regularization = 1.0;
  HjConfig optimizer;
  DerivativeBackend backend = DerivativeBackend::FiniteDifference;

  [[nodiscard]] EstimationConfig config_for(Objective objective) const;
};

/// Runs every pipeline on one trajectory. A start stage shared by several pipelines
/// is fitted once; the result lists each distinct stage once, in order of first use.
/// Refinement stages whose start failed are reported as failed, not run.
/// `traces`, when given, receives the optimizer trace of each start stage by name.
std::vector<EstimatorReport> run_pipelines(const ModelSpec& model, const Trajectory& traj,
                                           const std::vector<PipelineSpec>& pipelines,
                                           const PipelineSettings& settings,
                                           std::map<std::string, std::vector<HjTraceRow>>* traces = nullptr);

struct ExperimentConfig {
  std::string model = "sin-diffusion";
  SimConfig sim;  // sim.seed is the base seed
  std::size_t replications = 100;
  std::vector<PipelineSpec> pipelines;
  PipelineSettings settings;
  unsigned workers = 1;
};

struct McRow {
  std::string estimator;
  double mean_alpha = 0.0;
  std::optional<double> sd_alpha;
  double mean_beta = 0.0;
  std::optional<double> sd_beta;
  std::size_t converged = 0;
  std::size_t failures = 0;
};

struct ReplicationRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<EstimatorReport> reports;
  std::string error;  // simulation failure, if any
};

struct McSummary {
  std::vector<McRow> rows;
  std::vector<ReplicationRecord> replications;
};

/// Replication i simulates with replication_seed(base, i) and runs all pipelines on
/// that one trajectory. Moments use converged replications only (n - 1 divisor);
/// everything else counts as a failure. Results do not depend on `workers`.
McSummary run_experiment(const ExperimentConfig& cfg);

/// `estimator,mean_alpha,sd_alpha,mean_beta,sd_beta,failures`; absent SDs print as NA.
void write_summary_csv(std::ostream& out, const McSummary& summary, const std::vector<std::string>& header_comment = {});

/// `replication,seed,estimator,alpha_hat,beta_hat,objective,evaluations,converged,clamps`.
void write_replications_csv(std::ostream& out, const McSummary& summary,
                            const std::vector<std::string>& header_comment = {});

/// `estimator,alpha_hat,beta_hat,objective,evaluations,converged,clamps`.
void write_report_header(std::ostream& out);
void write_report_row(std::ostream& out, const EstimatorReport& report);

struct SurfaceGrid {
  Interval alpha{0.5, 1.5};
  Interval beta{0.0, 1.0};
  int alpha_points = 100;
  int beta_points = 100;
};

struct SurfaceCell {
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> value;
};

struct SurfaceResult {
  std::vector<SurfaceCell> cells;  // alpha-major
  Theta argmin;
  double min_value = 0.0;
  std::size_t error_cells = 0;
};

/// Evaluates `objective` on the grid; cells where it throws or is non-finite are left empty.
SurfaceResult loss_surface(const ObjectiveFn& objective, const SurfaceGrid& grid, unsigned workers = 1);

/// `eval,alpha,beta,value,phase`.
void write_trace_csv(std::ostream& out, const std::vector<HjTraceRow>& trace);

/// `alpha,beta,value` with empty value for failed cells.
void write_surface_csv(std::ostream& out, const SurfaceResult& surface,
                       const std::vector<std::string>& header_comment = {});

}  // namespace sdeest
