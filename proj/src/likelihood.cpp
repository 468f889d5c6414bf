#include "sdeest/likelihood.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "sdeest/error.hpp"
#include "sdeest/hermite.hpp"

namespace sdeest {

namespace {

double positive_diff_sq(const ModelSpec& model, double beta, double x) {
  const double b = model.diff_sq(beta, x);
  if (!(b > 0.0)) throw EllipticityError(fmt::format("B({}, {}) = {} is not positive", beta, x, b));
  return b;
}

double fd_step(double rel_step, double value) { return rel_step * (1.0 + std::abs(value)); }

Theta shifted(Theta theta, int i, double d) {
  theta[i] += d;
  return theta;
}

struct Probe {
  Theta theta;
  double weight;
};

void require_transitions(const Trajectory& traj);

// sum_k sum_j w_j * (-ln p_k(theta_j)), differenced inside each transition so the
// O(1) per-term values cancel before the sum over thousands of observations.
template <std::size_t N>
double stencil(const ModelSpec& model, const std::array<Probe, N>& probes, const Trajectory& traj) {
  require_transitions(traj);
  double total = 0.0;
  std::size_t j = 0;
  try {
    for (std::size_t k = 1; k < traj.values.size(); ++k) {
      double term = 0.0;
      for (j = 0; j < N; ++j) {
        term -= probes[j].weight *
                log_transition_density(model, probes[j].theta, traj.values[k - 1], traj.values[k], traj.step).log_density;
      }
      total += term;
    }
  } catch (const Error& e) {
    const Theta at = probes[j].theta;
    throw NumericError(fmt::format("finite-difference probe at ({}, {}) failed: {}", at.alpha, at.beta, e.what()));
  }
  return total;
}

void require_transitions(const Trajectory& traj) {
  if (traj.values.size() < 2) throw DomainError("quasi-likelihood needs a trajectory with at least 2 observations");
  if (!(traj.step > 0.0)) throw DomainError("quasi-likelihood needs a positive observation step");
}

struct AnalyticSums {
  Vec2 score = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
  std::vector<Vec2> per_observation;
  std::size_t clamps = 0;
};

AnalyticSums analytic_sums(const ModelSpec& model, Theta theta, const Trajectory& traj, bool keep_observations) {
  require_transitions(traj);
  AnalyticSums sums;
  if (keep_observations) sums.per_observation.reserve(traj.transitions());
  for (std::size_t k = 1; k < traj.values.size(); ++k) {
    const AnalyticTerms t = analytic_terms(model, theta, traj.values[k - 1], traj.values[k], traj.step);
    if (t.clamped) ++sums.clamps;
    const double sa = t.d_alpha / t.bracket;
    const double sb = t.d_beta / t.bracket;
    sums.score += Vec2(sa, sb);
    sums.hess(0, 0) += sa * sa - t.d_alpha_alpha / t.bracket;
    sums.hess(0, 1) += sa * sb - t.d_alpha_beta / t.bracket;
    sums.hess(1, 0) += sa * sb - t.d_beta_alpha / t.bracket;
    sums.hess(1, 1) += sb * sb - t.d_beta_beta / t.bracket;
    if (keep_observations) sums.per_observation.emplace_back(sa, sb);
  }
  if (!sums.score.allFinite() || !sums.hess.allFinite()) {
    throw NumericError(fmt::format("analytic derivatives non-finite at ({}, {})", theta.alpha, theta.beta));
  }
  return sums;
}

}  // namespace

double DensityEval::base() const { return std::exp(log_base); }

double DensityEval::density() const { return base() * bracket; }

HermiteFrame hermite_frame(const ModelSpec& model, Theta theta, double x, double y, double h) {
  const double b = positive_diff_sq(model, theta.beta, x);
  return {y - x - model.drift(theta.alpha, x) * h, b * h};
}

DensityEval log_transition_density(const ModelSpec& model, Theta theta, double x, double y, double h) {
  if (!(h > 0.0)) throw DomainError(fmt::format("transition density: step h = {} must be positive", h));
  const double b = positive_diff_sq(model, theta.beta, x);
  const double z = y - x - model.drift(theta.alpha, x) * h;
  const double v = b * h;
  const double h3 = (z * z / v - 3.0) * z / (v * v);

  DensityEval d;
  d.log_base = log_gauss_kernel(z, v);
  d.bracket = 1.0 + 0.25 * h * h * b * model.diff_sq_dx(theta.beta, x) * h3;
  d.clamped = d.bracket < kBracketFloor;
  d.log_density = d.log_base + std::log(std::max(d.bracket, kBracketFloor));
  if (!std::isfinite(d.log_density)) {
    throw NumericError(fmt::format("transition density non-finite at x = {}, y = {}, theta = ({}, {})", x, y,
                                   theta.alpha, theta.beta));
  }
  return d;
}

QlValue neg_log_ql_counted(const ModelSpec& model, Theta theta, const Trajectory& traj) {
  require_transitions(traj);
  QlValue out;
  for (std::size_t k = 1; k < traj.values.size(); ++k) {
    DensityEval d;
    try {
      d = log_transition_density(model, theta, traj.values[k - 1], traj.values[k], traj.step);
    } catch (const EllipticityError& e) {
      throw EllipticityError(fmt::format("transition {}: {}", k, e.what()));
    } catch (const Error& e) {
      throw NumericError(fmt::format("transition {}: {}", k, e.what()));
    }
    out.value -= d.log_density;
    if (d.clamped) ++out.clamps;
  }
  return out;
}

double neg_log_ql(const ModelSpec& model, Theta theta, const Trajectory& traj) {
  return neg_log_ql_counted(model, theta, traj).value;
}

Vec2 ql_gradient_fd(const ModelSpec& model, Theta theta, const Trajectory& traj, double rel_step) {
  Vec2 g;
  for (int i = 0; i < 2; ++i) {
    const double d = fd_step(rel_step, theta[i]);
    g(i) = stencil<2>(model, {{{shifted(theta, i, d), 1.0}, {shifted(theta, i, -d), -1.0}}}, traj) / (2.0 * d);
  }
  return g;
}

Mat2 ql_hessian_fd(const ModelSpec& model, Theta theta, const Trajectory& traj, double rel_step) {
  const double steps[2] = {fd_step(rel_step, theta.alpha), fd_step(rel_step, theta.beta)};
  Mat2 hess;
  for (int i = 0; i < 2; ++i) {
    const double d = steps[i];
    hess(i, i) =
        stencil<3>(model, {{{shifted(theta, i, d), 1.0}, {theta, -2.0}, {shifted(theta, i, -d), 1.0}}}, traj) / (d * d);
  }
  const auto at = [&](double sa, double sb) { return Theta{theta.alpha + sa * steps[0], theta.beta + sb * steps[1]}; };
  const double cross =
      stencil<4>(model, {{{at(1, 1), 1.0}, {at(1, -1), -1.0}, {at(-1, 1), -1.0}, {at(-1, -1), 1.0}}}, traj) /
      (4.0 * steps[0] * steps[1]);
  hess(0, 1) = cross;
  hess(1, 0) = cross;
  return hess;
}

std::vector<Vec2> observation_scores_fd(const ModelSpec& model, Theta theta, const Trajectory& traj,
                                        double rel_step) {
  require_transitions(traj);
  const std::size_t n = traj.transitions();
  std::vector<Vec2> scores(n, Vec2::Zero());
  for (int i = 0; i < 2; ++i) {
    const double d = fd_step(rel_step, theta[i]);
    const Theta plus = shifted(theta, i, d);
    const Theta minus = shifted(theta, i, -d);
    for (std::size_t k = 0; k < n; ++k) {
      const double x = traj.values[k];
      const double y = traj.values[k + 1];
      scores[k](i) = (log_transition_density(model, plus, x, y, traj.step).log_density -
                      log_transition_density(model, minus, x, y, traj.step).log_density) /
                     (2.0 * d);
    }
  }
  return scores;
}

QlDerivatives ql_derivatives(const ModelSpec& model, Theta theta, const Trajectory& traj, DerivativeBackend backend) {
  QlDerivatives out;
  out.backend = backend;
  if (backend == DerivativeBackend::Analytic) {
    AnalyticSums sums = analytic_sums(model, theta, traj, false);
    out.grad = sums.score;
    out.hess = sums.hess;
    out.clamps = sums.clamps;
    return out;
  }
  out.grad = -ql_gradient_fd(model, theta, traj);
  out.hess = ql_hessian_fd(model, theta, traj);
  out.clamps = neg_log_ql_counted(model, theta, traj).clamps;
  return out;
}

// The braced factors below follow the published derivative expressions term by
// term, with these readings: every t is the observation step h, every H^m is
// H_m(z, v) in the frame of hermite_frame, and a literal leading "1 +" in the
// alpha derivative is dropped since it carries no parameter dependence.
AnalyticTerms analytic_terms(const ModelSpec& model, Theta theta, double x, double y, double h) {
  const double a = theta.alpha;
  const double be = theta.beta;
  const double B = positive_diff_sq(model, be, x);
  const double Bx = model.diff_sq_dx(be, x);
  const double Bb = model.diff_sq_db(be, x);
  const double Bbb = model.diff_sq_dbb(be, x);
  const double Bxb = model.diff_sq_dxb(be, x);
  const double Bxbb = model.diff_sq_dxbb(be, x);
  const double Aa = model.drift_da(a, x);
  const double Aaa = model.drift_daa(a, x);
  const double Axa = model.drift_dxa(a, x);
  const double Axaa = model.drift_dxaa(a, x);

  const double z = y - x - model.drift(a, x) * h;
  const auto H = hermite_all<7>(z, B * h);
  const double h2 = h * h;
  const double h3 = h2 * h;
  const double h4 = h3 * h;

  AnalyticTerms t;
  t.bracket = 1.0 + 0.25 * h2 * B * Bx * H[3];
  if (t.bracket < kBracketFloor) {
    t.bracket = kBracketFloor;
    t.clamped = true;
  }

  t.d_alpha = Aa * h * H[1] + h3 / 4.0 * Aa * Bb * B * H[4] + h2 / 4.0 * Aa * Bb + h2 / 4.0 * Axa * B * H[2];

  t.d_beta = h / 2.0 * Bb * H[2] + Bx * Bb * B * H[5] + h / 4.0 * (B * Bxb + Bx * Bb) * H[3];

  t.d_alpha_alpha = h * Aaa * H[1] + h2 * Aa * Aa * H[2] + h3 / 4.0 * Aaa * Bx * B * H[4] +
                    h2 / 4.0 * Aaa * Bx * H[2] + h2 / 2.0 * Axaa * B * H[2];

  t.d_alpha_beta = h2 / 4.0 * Aa * Bb * H[3] + h3 / 4.0 * Aa * Bxb * B * H[4] + h3 / 4.0 * Aa * Bb * Bx * H[4] +
                   h4 / 8.0 * Aa * Bx * Bb * B * H[6] + h2 / 4.0 * Aa * Bxb * H[2] + h3 / 8.0 * Aa * Bx * Bb * H[4] +
                   h2 / 4.0 * Axa * Bb * H[2] + h3 / 4.0 * B * Axa * Bb * H[4];

  t.d_beta_alpha = h2 / 4.0 * Bb * Aa * H[3] + h4 / 8.0 * B * Bx * Bb * H[6] + h3 / 4.0 * B * Bxb * Aa * H[4] +
                   h3 / 4.0 * Bx * Bb * Aa * H[4];

  t.d_beta_beta = h / 2.0 * Bbb * H[2] + h2 / 4.0 * Bb * Bb * H[4] + h3 / 8.0 * B * Bx * Bbb * H[5] +
                  h3 / 8.0 * B * Bb * Bxb * H[5] + h3 / 8.0 * Bb * Bb * Bx * H[5] +
                  h4 / 16.0 * B * Bb * Bb * Bx * H[7] + h2 / 4.0 * Bb * Bxb * H[3] + h2 / 4.0 * B * Bxbb * H[3] +
                  h3 / 8.0 * B * Bxb * Bb * H[5] + h2 / 4.0 * Bx * Bbb * H[3] + h2 / 4.0 * Bb * Bxb * H[3] +
                  h3 / 8.0 * Bb * Bb * Bx * H[5];
  return t;
}

Vec2 ql_score_analytic(const ModelSpec& model, Theta theta, const Trajectory& traj) {
  return analytic_sums(model, theta, traj, false).score;
}

Mat2 ql_hessian_analytic(const ModelSpec& model, Theta theta, const Trajectory& traj) {
  return analytic_sums(model, theta, traj, false).hess;
}

std::vector<Vec2> observation_scores_analytic(const ModelSpec& model, Theta theta, const Trajectory& traj) {
  return analytic_sums(model, theta, traj, true).per_observation;
}

}  // namespace sdeest
