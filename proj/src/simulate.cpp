#include "sdeest/simulate.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "sdeest/error.hpp"

namespace sdeest {

namespace {

constexpr double kExplosionBound = 1e12;

void validate(const SimConfig& cfg) {
  if (!(cfg.step > 0.0) || !std::isfinite(cfg.step)) throw DomainError("simulate: step h must be positive");
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) throw DomainError("simulate: horizon T must be positive");
  if (!std::isfinite(cfg.x0)) throw DomainError("simulate: x0 must be finite");
  if (observation_count(cfg.horizon, cfg.step) < 2) {
    throw DomainError(fmt::format("simulate: T = {} and h = {} give fewer than 2 observations", cfg.horizon, cfg.step));
  }
}

}  // namespace

std::size_t observation_count(double horizon, double step) {
  const double ratio = horizon / step;
  return static_cast<std::size_t>(std::floor(ratio * (1.0 + 1e-9)));
}

std::uint64_t replication_seed(std::uint64_t base, std::uint64_t index) { return base + index; }

double NormalSource::uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53; }

double NormalSource::next() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(angle);
  has_cached_ = true;
  return r * std::cos(angle);
}

double milstein_step(const ModelSpec& model, Theta theta, double x, double h, double dw) {
  const double b = model.diff_sq(theta.beta, x);
  if (!(b > 0.0)) {
    throw EllipticityError(fmt::format("milstein_step: B({}, {}) = {} is not positive", theta.beta, x, b));
  }
  return x + model.drift(theta.alpha, x) * h + std::sqrt(b) * dw +
         0.25 * model.diff_sq_dx(theta.beta, x) * (dw * dw - h);
}

Trajectory simulate(const ModelSpec& model, const SimConfig& cfg) {
  validate(cfg);
  const std::size_t n = observation_count(cfg.horizon, cfg.step);
  const double sd = std::sqrt(cfg.step);
  NormalSource normal(cfg.seed);

  Trajectory traj{cfg.step, cfg.x0, {}};
  traj.values.reserve(n + 1);
  traj.values.push_back(cfg.x0);
  double x = cfg.x0;
  for (std::size_t i = 1; i <= n; ++i) {
    x = milstein_step(model, cfg.theta_true, x, cfg.step, sd * normal.next());
    if (!(std::abs(x) <= kExplosionBound)) {
      throw ExplosionError(fmt::format("simulate: state {} exceeds 1e12 at step {}", x, i));
    }
    traj.values.push_back(x);
  }
  return traj;
}

GaussianMoments ou_transition_moments(double alpha, double b_const, double x, double h) {
  if (!(alpha > 0.0)) throw DomainError(fmt::format("ou transition: alpha = {} must be positive", alpha));
  return {x * std::exp(-alpha * h), b_const * -std::expm1(-2.0 * alpha * h) / (2.0 * alpha)};
}

Trajectory simulate_ou_exact(double alpha, double b_const, const SimConfig& cfg) {
  if (!(alpha > 0.0)) throw DomainError(fmt::format("simulate_ou_exact: alpha = {} must be positive", alpha));
  if (!(b_const > 0.0)) throw DomainError(fmt::format("simulate_ou_exact: b = {} must be positive", b_const));
  validate(cfg);
  const std::size_t n = observation_count(cfg.horizon, cfg.step);
  const GaussianMoments unit = ou_transition_moments(alpha, b_const, 1.0, cfg.step);
  const double decay = unit.mean;
  const double sd = std::sqrt(unit.variance);
  NormalSource normal(cfg.seed);

  Trajectory traj{cfg.step, cfg.x0, {}};
  traj.values.reserve(n + 1);
  traj.values.push_back(cfg.x0);
  double x = cfg.x0;
  for (std::size_t i = 1; i <= n; ++i) {
    x = x * decay + sd * normal.next();
    traj.values.push_back(x);
  }
  return traj;
}

}  // namespace sdeest
