#include "sdeest/estimators.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <fmt/format.h>

#include "sdeest/error.hpp"

namespace sdeest {

namespace {

void require_cls_input(const Trajectory& traj) {
  if (traj.values.size() < 2) throw DomainError("cls loss needs at least 2 observations");
  if (!(traj.step > 0.0)) throw DomainError("cls loss needs a positive step");
}

template <class Weight>
double cls_sum(const ModelSpec& model, Theta theta, const Trajectory& traj, Weight weight) {
  require_cls_input(traj);
  const double h = traj.step;
  double total = 0.0;
  for (std::size_t k = 1; k < traj.values.size(); ++k) {
    const double x = traj.values[k - 1];
    const double r = traj.values[k] - x - model.drift(theta.alpha, x) * h;
    total += r * r / weight(x);
  }
  return total;
}

double require_positive_b(const ModelSpec& model, double beta, double x) {
  const double b = model.diff_sq(beta, x);
  if (!(b > 0.0)) throw EllipticityError(fmt::format("B({}, {}) = {} is not positive", beta, x, b));
  return b;
}

std::string stage_name(Objective objective) {
  switch (objective) {
    case Objective::Qmle:
      return "QMLE";
    case Objective::ClsEuler:
      return "CLS";
    case Objective::ClsMilstein:
      return "CLS(Milstein)";
  }
  return "?";
}

double objective_at(const ModelSpec& model, const Trajectory& traj, Theta theta) {
  try {
    return neg_log_ql(model, theta, traj);
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

Objective parse_objective(std::string_view text) {
  if (text == "qmle") return Objective::Qmle;
  if (text == "cls-euler") return Objective::ClsEuler;
  if (text == "cls-milstein") return Objective::ClsMilstein;
  throw ConfigError(fmt::format("unknown objective '{}' (qmle, cls-euler, cls-milstein)", text));
}

std::string_view objective_key(Objective objective) {
  switch (objective) {
    case Objective::Qmle:
      return "qmle";
    case Objective::ClsEuler:
      return "cls-euler";
    case Objective::ClsMilstein:
      return "cls-milstein";
  }
  return "?";
}

double cls_loss_euler(const ModelSpec& model, Theta theta, const Trajectory& traj) {
  return cls_sum(model, theta, traj,
                 [&](double x) { return require_positive_b(model, theta.beta, x) * traj.step; });
}

double milstein_noise_second_moment(const ModelSpec& model, double beta, double x, double h) {
  const double b = require_positive_b(model, beta, x);
  const double bx = model.diff_sq_dx(beta, x);
  return b * h + bx * bx * h * h / 8.0;
}

double cls_loss_milstein(const ModelSpec& model, Theta theta, const Trajectory& traj) {
  return cls_sum(model, theta, traj,
                 [&](double x) { return milstein_noise_second_moment(model, theta.beta, x, traj.step); });
}

double regularized(double objective_value, Theta theta, const EstimationConfig& cfg) {
  if (cfg.regularization_weight == 0.0) return objective_value;
  return objective_value + cfg.regularization_weight * std::abs(theta.beta - cfg.center().beta);
}

ObjectiveFn objective_function(const ModelSpec& model, const Trajectory& traj, const EstimationConfig& cfg) {
  if (!(cfg.regularization_weight >= 0.0)) throw DomainError("regularization weight must be >= 0");
  return [&model, &traj, cfg](Theta theta) {
    double value = 0.0;
    switch (cfg.objective) {
      case Objective::Qmle:
        value = neg_log_ql(model, theta, traj);
        break;
      case Objective::ClsEuler:
        value = cls_loss_euler(model, theta, traj);
        break;
      case Objective::ClsMilstein:
        value = cls_loss_milstein(model, theta, traj);
        break;
    }
    return regularized(value, theta, cfg);
  };
}

EstimatorReport estimate(const ModelSpec& model, const Trajectory& traj, const EstimationConfig& cfg,
                         std::vector<HjTraceRow>* trace) {
  EstimatorReport report;
  report.name = stage_name(cfg.objective);
  report.theta_start = cfg.start;
  report.theta_hat = cfg.start;
  report.objective_value = std::numeric_limits<double>::quiet_NaN();

  const ObjectiveFn raw = objective_function(model, traj, cfg);
  const ObjectiveFn guarded = [&raw](Theta theta) {
    try {
      return raw(theta);
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  try {
    const HjResult r = hooke_jeeves(guarded, cfg.start, cfg.optimizer, trace);
    report.theta_hat = r.theta_min;
    report.objective_value = r.value;
    report.evaluations = r.evaluations;
    report.converged = r.converged && r.theta_min.finite();
    if (!r.converged) report.notes = "evaluation budget exhausted";
  } catch (const Error& e) {
    report.notes = e.what();
    return report;
  }
  if (cfg.objective == Objective::Qmle) {
    try {
      report.clamp_count = neg_log_ql_counted(model, report.theta_hat, traj).clamps;
    } catch (const Error&) {
    }
  }
  return report;
}

Vec2 guarded_solve(const Mat2& m, const Vec2& rhs, std::string_view what) {
  const double det = m.determinant();
  const double norm = m.norm();
  if (!std::isfinite(det) || !(std::abs(det) > 1e-12 * (1.0 + norm * norm))) {
    throw SingularMatrixError(fmt::format("{}: matrix is singular (det = {}, |M|_F = {})", what, det, norm));
  }
  const Vec2 delta = m.inverse() * rhs;
  if (!delta.allFinite()) throw SingularMatrixError(fmt::format("{}: update is not finite", what));
  return delta;
}

EstimatorReport one_step(const ModelSpec& model, const Trajectory& traj, Theta theta_start, DerivativeBackend backend) {
  const QlDerivatives d = ql_derivatives(model, theta_start, traj, backend);
  const Vec2 delta = guarded_solve(d.hess, d.grad, "one-step");

  EstimatorReport report;
  report.name = "OS";
  report.theta_start = theta_start;
  report.theta_hat = Theta::from(theta_start.vec() + delta);
  report.objective_value = objective_at(model, traj, report.theta_hat);
  report.evaluations = backend == DerivativeBackend::FiniteDifference ? 14 : 1;
  report.converged = report.theta_hat.finite();
  report.clamp_count = d.clamps;
  return report;
}

EstimatorReport scoring_step(const ModelSpec& model, const Trajectory& traj, Theta theta_start,
                             DerivativeBackend backend) {
  const std::vector<Vec2> scores = backend == DerivativeBackend::FiniteDifference
                                       ? observation_scores_fd(model, theta_start, traj)
                                       : observation_scores_analytic(model, theta_start, traj);
  Mat2 outer = Mat2::Zero();
  Vec2 total = Vec2::Zero();
  for (const Vec2& s : scores) {
    outer += s * s.transpose();
    total += s;
  }
  const Vec2 delta = guarded_solve(outer, total, "scoring");

  EstimatorReport report;
  report.name = "Scoring";
  report.theta_start = theta_start;
  report.theta_hat = Theta::from(theta_start.vec() + delta);
  report.objective_value = objective_at(model, traj, report.theta_hat);
  report.evaluations = backend == DerivativeBackend::FiniteDifference ? 5 : 1;
  report.converged = report.theta_hat.finite();
  return report;
}

}  // namespace sdeest
