#pragma once

#include <cstddef>
#include <vector>

#include "sdeest/model.hpp"
#include "sdeest/theta.hpp"
#include "sdeest/trajectory.hpp"

namespace sdeest {

/// Floor applied to the Hermite correction bracket before taking logs.
inline constexpr double kBracketFloor = 1e-8;

/// Centered increment z = y - x - A(alpha, x) h and its Euler variance v = B(beta, x) h.
/// Every Hermite factor of the expansion is evaluated as H_m(z, v).
struct HermiteFrame {
  double z = 0.0;
  double v = 1.0;
};

HermiteFrame hermite_frame(const ModelSpec& model, Theta theta, double x, double y, double h);

/// First-order expansion p_h(x, y) = phi_v(z) * {1 + h^2 B dB/dx H_3(z, v) / 4}.
struct DensityEval {
  double log_base = 0.0;  // log phi_v(z)
  double bracket = 1.0;
  double log_density = 0.0;
  bool clamped = false;  // bracket < kBracketFloor

  [[nodiscard]] double base() const;
  /// Unclamped expansion phi * bracket; negative where the bracket is.
  [[nodiscard]] double density() const;
};

DensityEval log_transition_density(const ModelSpec& model, Theta theta, double x, double y, double h);

struct QlValue {
  double value = 0.0;
  std::size_t clamps = 0;
};

/// -ln QL_n = -sum_k ln p_h(X_{k-1}, X_k). Throws NumericError naming k on a non-finite term.
double neg_log_ql(const ModelSpec& model, Theta theta, const Trajectory& traj);
QlValue neg_log_ql_counted(const ModelSpec& model, Theta theta, const Trajectory& traj);

inline constexpr double kDefaultFdStep = 1e-5;

/// Central-difference gradient of -ln QL; step rel_step * (1 + |theta_i|).
Vec2 ql_gradient_fd(const ModelSpec& model, Theta theta, const Trajectory& traj, double rel_step = kDefaultFdStep);
/// Central-difference Hessian of -ln QL (symmetric by construction).
Mat2 ql_hessian_fd(const ModelSpec& model, Theta theta, const Trajectory& traj, double rel_step = kDefaultFdStep);

/// Per-transition score d ln p_k / d theta by central differences.
std::vector<Vec2> observation_scores_fd(const ModelSpec& model, Theta theta, const Trajectory& traj,
                                        double rel_step = kDefaultFdStep);

enum class DerivativeBackend { FiniteDifference, Analytic };

/// grad is the score of ln QL; hess is the observed information (Hessian of -ln QL).
struct QlDerivatives {
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
  DerivativeBackend backend = DerivativeBackend::FiniteDifference;
  std::size_t clamps = 0;
};

QlDerivatives ql_derivatives(const ModelSpec& model, Theta theta, const Trajectory& traj,
                             DerivativeBackend backend = DerivativeBackend::FiniteDifference);

/// Closed-form parameter derivatives of the expansion, one transition at a time.
///
/// Each field is the braced factor multiplying phi_v(z), so d ln p = d_factor / bracket.
/// The hessian uses h_ij = (d_i p / p)(d_j p / p) - (d_ij p) / p, which is not symmetric
/// because the alpha-beta and beta-alpha factors are evaluated from separate expressions.
struct AnalyticTerms {
  double bracket = 1.0;
  double d_alpha = 0.0;
  double d_beta = 0.0;
  double d_alpha_alpha = 0.0;
  double d_alpha_beta = 0.0;
  double d_beta_alpha = 0.0;
  double d_beta_beta = 0.0;
  bool clamped = false;
};

AnalyticTerms analytic_terms(const ModelSpec& model, Theta theta, double x, double y, double h);

/// Score of ln QL from the closed-form derivative expressions.
Vec2 ql_score_analytic(const ModelSpec& model, Theta theta, const Trajectory& traj);
/// Hessian of -ln QL from the closed-form expressions.
Mat2 ql_hessian_analytic(const ModelSpec& model, Theta theta, const Trajectory& traj);
std::vector<Vec2> observation_scores_analytic(const ModelSpec& model, Theta theta, const Trajectory& traj);

}  // namespace sdeest
