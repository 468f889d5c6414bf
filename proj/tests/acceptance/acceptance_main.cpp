// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "oracles.hpp"
#include "sdeest/estimators.hpp"
#include "sdeest/experiments.hpp"
#include "sdeest/likelihood.hpp"
#include "sdeest/optimize.hpp"

namespace {

using namespace sdeest;

int failures = 0;

void verdict(int id, bool ok, const std::string& title, const std::string& detail) {
  if (!ok) ++failures;
  fmt::print("{} [{:2}] {}: {}\n", ok ? "PASS" : "FAIL", id, title, detail);
  std::fflush(stdout);
}

const McRow& row(const McSummary& s, const std::string& name) {
  for (const auto& r : s.rows)
    if (r.estimator == name) return r;
  throw std::runtime_error("no row " + name);
}

void print_summary(const std::string& title, const McSummary& s) {
  fmt::print("  {}\n  {:<15}{:>11}{:>11}{:>11}{:>11}{:>9}\n", title, "estimator", "mean a", "sd a", "mean b", "sd b",
             "failed");
  for (const auto& r : s.rows) {
    fmt::print("  {:<15}{:>11.5f}{:>11.5f}{:>11.5f}{:>11.5f}{:>9}\n", r.estimator, r.mean_alpha,
               r.sd_alpha.value_or(NAN), r.mean_beta, r.sd_beta.value_or(NAN), r.failures);
  }
}

std::string summary_bytes(const McSummary& s) {
  std::ostringstream out;
  write_summary_csv(out, s);
  return out.str();
}

ExperimentConfig table_config(const std::string& model, Theta truth, Theta start, unsigned workers) {
  ExperimentConfig c;
  c.model = model;
  c.sim = {truth, 0.0, 10000.0, 0.8, 1};
  c.replications = 100;
  c.pipelines = parse_pipelines(
      "qmle,cls-euler,qmle+onestep,qmle+scoring,cls-euler+onestep,cls-euler+scoring");
  c.settings.start = start;
  c.workers = workers;
  return c;
}

bool within_factor(double got, double want, double factor) { return got >= want / factor && got <= want * factor; }

void table_criteria(const McSummary& t1, const McSummary& t2) {
  const McRow& q = row(t1, "QMLE");
  const double sd_a = q.sd_alpha.value_or(NAN), sd_b = q.sd_beta.value_or(NAN);
  const bool means = std::abs(q.mean_alpha - 0.9946) <= 0.04 && std::abs(q.mean_beta - 2.0039) <= 0.06;
  const bool sds = within_factor(sd_a, 0.1115, 1.5) && within_factor(sd_b, 0.1564, 1.5);
  verdict(1, means && sds, "Table 1 QMLE",
          fmt::format("mean ({:.4f}, {:.4f}) [means {}], sd ({:.4f}, {:.4f}) vs (0.1115, 0.1564) within x1.5 [{}], "
                      "failed {}",
                      q.mean_alpha, q.mean_beta, means ? "ok" : "out", sd_a, sd_b, sds ? "ok" : "out", q.failures));

  const McRow& cls = row(t1, "CLS");
  verdict(2, cls.mean_beta < 1.92, "Table 1 CLS bias direction",
          fmt::format("mean beta {:.4f}, need < 1.92", cls.mean_beta));

  const McRow& q2 = row(t2, "QMLE");
  const McRow& c2 = row(t2, "CLS");
  const bool q_ok = q2.mean_beta >= 0.70 && q2.mean_beta <= 0.78;
  verdict(3, q_ok && c2.mean_beta < 0.63, "Table 2 spot checks",
          fmt::format("QMLE mean beta {:.4f} in [0.70, 0.78] [{}], CLS mean beta {:.4f} < 0.63 [{}]", q2.mean_beta,
                      q_ok ? "ok" : "out", c2.mean_beta, c2.mean_beta < 0.63 ? "ok" : "out"));

  const double lo = std::min(cls.mean_beta, 2.01), hi = std::max(cls.mean_beta, 2.01);
  const double os = row(t1, "OS(CLS)").mean_beta, sc = row(t1, "Scoring(CLS)").mean_beta;
  const bool between = os > lo && os < hi && sc > lo && sc < hi;
  verdict(4, between, "Refinements move CLS toward QMLE",
          fmt::format("OS(CLS) beta {:.4f}, Scoring(CLS) beta {:.4f}, strictly between {:.4f} and {:.4f}", os, sc, lo,
                      hi));
}

void normalization() {
  double worst = 0.0, clamped_excess = 0.0;
  int cells = 0;
  struct Case {
    const char* model;
    Theta theta;
  };
  for (Case c : {Case{"sin-diffusion", {1.0, 2.0}}, Case{"sin-diffusion", {0.5, 1.0}}, Case{"sin-diffusion", {1.5, 0.3}},
                 Case{"arctan-diffusion", {1.0, 0.7}}, Case{"arctan-diffusion", {0.5, 1.5}},
                 Case{"arctan-diffusion", {2.0, 0.2}}}) {
    const ModelSpec m = builtin_model(c.model);
    for (double h : {0.1, 0.5, 0.8})
      for (double x : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
        worst = std::max(worst, std::abs(oracle::density_mass(m, c.theta, x, h, true) - 1.0));
        clamped_excess = std::max(clamped_excess, oracle::density_mass(m, c.theta, x, h, false) - 1.0);
        ++cells;
      }
  }
  verdict(5, worst <= 1e-6, "Density normalization",
          fmt::format("max |mass - 1| = {:.2e} over {} (model, theta, x, h) cells; floored form adds up to {:.2e}",
                      worst, cells, clamped_excess));
}

double rel(double a, double b, double floor) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor}); }

void gradient_oracle() {
  double asym = 0.0, jac = 0.0;
  std::mt19937_64 rng(31);
  struct Case {
    const char* model;
    Theta truth;
    double beta_lo, beta_hi;
  };
  for (Case c : {Case{"sin-diffusion", {1.0, 2.0}, 1.0, 3.0}, Case{"arctan-diffusion", {1.0, 0.7}, 0.3, 1.2}}) {
    const ModelSpec m = builtin_model(c.model);
    const Trajectory t = simulate(m, {c.truth, 0.0, 400.0, 0.8, 12});
    std::uniform_real_distribution<double> a(0.5, 1.5), b(c.beta_lo, c.beta_hi);
    for (int i = 0; i < 20; ++i) {
      const Theta th{a(rng), b(rng)};
      const Mat2 hs = ql_hessian_fd(m, th, t);
      asym = std::max(asym, std::abs(hs(0, 1) - hs(1, 0)) / (1.0 + std::abs(hs(0, 1))));
      Mat2 j;
      for (int k = 0; k < 2; ++k) {
        const double d = kDefaultFdStep * (1.0 + std::abs(th[k]));
        Theta up = th, dn = th;
        up[k] += d;
        dn[k] -= d;
        j.col(k) = (ql_gradient_fd(m, up, t) - ql_gradient_fd(m, dn, t)) / (2.0 * d);
      }
      const double scale = 1e-3 * hs.cwiseAbs().maxCoeff();
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) jac = std::max(jac, rel(hs(r, s), j(r, s), scale));
    }
  }
  const ModelSpec ou = builtin_model("ou-const");
  const Trajectory t = simulate(ou, {{1.0, 2.0}, 0.0, 1000.0, 0.5, 6});
  double ou_err = 0.0;
  for (Theta th : {Theta{1.0, 2.0}, Theta{0.8, 2.4}, Theta{1.3, 1.5}}) {
    const Vec2 g = ql_gradient_fd(ou, th, t);
    const Vec2 want = oracle::ou_neg_loglik_gradient(th.alpha, th.beta, t);
    for (int i = 0; i < 2; ++i) ou_err = std::max(ou_err, rel(g(i), want(i), 1.0));
  }
  verdict(6, asym <= 1e-8 && jac <= 1e-4 && ou_err <= 1e-6, "FD gradient oracle",
          fmt::format("Hessian asymmetry {:.1e} (<= 1e-8), Jacobian mismatch {:.1e} (<= 1e-4), OU score error {:.1e} "
                      "(<= 1e-6)",
                      asym, jac, ou_err));
}

void weak_order() {
  const double steps[2] = {0.8, 0.4};
  double me[2], ve[2];
  for (int i = 0; i < 2; ++i) {
    const auto s = oracle::milstein_one_step(1.0, 4.0, 1.0, steps[i], 1000000, 77);
    const auto e = ou_transition_moments(1.0, 4.0, 1.0, steps[i]);
    me[i] = std::abs(s.mean - e.mean);
    ve[i] = std::abs(s.variance - e.variance);
  }
  const double rm = me[0] / me[1], rv = ve[0] / ve[1];
  verdict(7, rm >= 3.0 && rv >= 3.0, "Milstein weak order",
          fmt::format("mean error ratio {:.2f}, variance error ratio {:.2f} (need >= 3)", rm, rv));
}

void cls_denominator() {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> beta(0.3, 3.0), x(-3.0, 3.0), h(0.1, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const ModelSpec m = builtin_model(i % 2 == 0 ? "sin-diffusion" : "arctan-diffusion");
    const double b = beta(rng), xi = x(rng), hi = h(rng);
    const auto s = oracle::milstein_noise_moment(m, b, xi, hi, 1000000, 1000 + i);
    worst = std::max(worst, std::abs(s.mean - milstein_noise_second_moment(m, b, xi, hi)) / s.mean_se);
  }
  verdict(8, worst <= 3.0, "Milstein CLS denominator", fmt::format("worst deviation {:.2f} SE over 5 triples", worst));
}

void optimizer_suite() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> eig(0.5, 2.5), angle(0.0, std::numbers::pi), centre(-3.0, 3.0);
  double worst = 0.0;
  long max_evals = 0;
  bool monotone = true, converged = true;
  for (int trial = 0; trial < 20; ++trial) {
    const double phi = angle(rng);
    Mat2 rot;
    rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    const Mat2 q = rot * Vec2(eig(rng), eig(rng)).asDiagonal() * rot.transpose();
    const Vec2 c(centre(rng), centre(rng));
    const HjResult r = hooke_jeeves(
        [&](Theta t) {
          const Vec2 d = t.vec() - c;
          return d.dot(q * d);
        },
        {0.0, 0.0}, {});
    worst = std::max(worst, (r.theta_min.vec() - c).cwiseAbs().maxCoeff());
    max_evals = std::max(max_evals, r.evaluations);
    converged &= r.converged;
    for (std::size_t i = 1; i < r.accepted_values.size(); ++i) monotone &= r.accepted_values[i] < r.accepted_values[i - 1];
  }
  verdict(9, worst <= 2e-4 && max_evals <= 5000 && monotone && converged, "Hooke-Jeeves quadratics",
          fmt::format("worst coordinate error {:.1e} (<= 2e-4), max evaluations {} (<= 5000), monotone {}", worst,
                      max_evals, monotone));
}

}  // namespace

int main() {
  fmt::print("Monte Carlo runs: 100 replications, T = 10000, h = 0.8\n");
  const McSummary t1 = run_experiment(table_config("sin-diffusion", {1.0, 2.0}, {0.5, 1.0}, 4));
  print_summary("sin-diffusion, theta = (1, 2), start (0.5, 1)", t1);
  const McSummary t2 = run_experiment(table_config("arctan-diffusion", {1.0, 0.7}, {0.5, 0.5}, 4));
  print_summary("arctan-diffusion, theta = (1, 0.7), start (0.5, 0.5)", t2);

  table_criteria(t1, t2);
  normalization();
  gradient_oracle();
  weak_order();
  cls_denominator();
  optimizer_suite();

  const std::string first = summary_bytes(t1);
  const std::string again = summary_bytes(run_experiment(table_config("sin-diffusion", {1.0, 2.0}, {0.5, 1.0}, 4)));
  const std::string serial = summary_bytes(run_experiment(table_config("sin-diffusion", {1.0, 2.0}, {0.5, 1.0}, 1)));
  verdict(10, first == again && first == serial, "Determinism",
          fmt::format("repeat run identical: {}, workers 1 vs 4 identical: {} ({} summary bytes)", first == again,
                      first == serial, first.size()));

  fmt::print("{} of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
