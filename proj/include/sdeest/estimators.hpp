#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "sdeest/likelihood.hpp"
#include "sdeest/model.hpp"
#include "sdeest/optimize.hpp"
#include "sdeest/theta.hpp"
#include "sdeest/trajectory.hpp"

namespace sdeest {

enum class Objective { Qmle, ClsEuler, ClsMilstein };

/// "qmle", "cls-euler", "cls-milstein". Throws ConfigError otherwise.
Objective parse_objective(std::string_view text);
std::string_view objective_key(Objective objective);

struct EstimationConfig {
  Theta start{0.5, 1.0};
  double regularization_weight = 1.0;
  std::optional<Theta> regularization_center;  // start when unset
  Objective objective = Objective::Qmle;
  HjConfig optimizer;
  DerivativeBackend derivative_backend = DerivativeBackend::FiniteDifference;

  [[nodiscard]] Theta center() const { return regularization_center.value_or(start); }
};

struct EstimatorReport {
  std::string name;
  Theta theta_start;
  Theta theta_hat;
  double objective_value = 0.0;
  long evaluations = 0;
  bool converged = false;
  std::size_t clamp_count = 0;
  std::string notes;
};

/// Euler conditional least squares: sum (X_k - X_{k-1} - A h)^2 / (B h), coefficients at X_{k-1}.
double cls_loss_euler(const ModelSpec& model, Theta theta, const Trajectory& traj);

/// E[(sqrt(B) dW + (1/4) dB/dx (dW^2 - h))^2] = B h + (dB/dx)^2 h^2 / 8 for dW ~ N(0, h).
double milstein_noise_second_moment(const ModelSpec& model, double beta, double x, double h);

/// Milstein conditional least squares: Euler residuals weighted by milstein_noise_second_moment.
double cls_loss_milstein(const ModelSpec& model, Theta theta, const Trajectory& traj);

/// objective_value + lambda |beta - center.beta|.
double regularized(double objective_value, Theta theta, const EstimationConfig& cfg);

/// The penalized objective selected by cfg, as a throwing function of theta.
ObjectiveFn objective_function(const ModelSpec& model, const Trajectory& traj, const EstimationConfig& cfg);

/// Minimizes the configured objective by Hooke-Jeeves from cfg.start.
/// Never throws on optimizer failure; converged=false is reported instead.
EstimatorReport estimate(const ModelSpec& model, const Trajectory& traj, const EstimationConfig& cfg,
                         std::vector<HjTraceRow>* trace = nullptr);

/// Newton step theta_start + H^{-1} grad ln QL, H the observed information.
/// Throws SingularMatrixError when |det H| <= 1e-12 (1 + |H|_F^2).
EstimatorReport one_step(const ModelSpec& model, const Trajectory& traj, Theta theta_start,
                         DerivativeBackend backend = DerivativeBackend::FiniteDifference);

/// As one_step with H replaced by sum_k s_k s_k^T over per-transition scores s_k.
EstimatorReport scoring_step(const ModelSpec& model, const Trajectory& traj, Theta theta_start,
                             DerivativeBackend backend = DerivativeBackend::FiniteDifference);

/// Solves m * delta = rhs after the determinant test above.
Vec2 guarded_solve(const Mat2& m, const Vec2& rhs, std::string_view what);

}  // namespace sdeest
