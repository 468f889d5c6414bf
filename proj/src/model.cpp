#include "sdeest/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sdeest/error.hpp"

namespace sdeest {

namespace {

ModelSpec sin_diffusion() {
  ModelSpec m;
  m.name = "sin-diffusion";
  m.drift = [](double a, double x) { return -a * x; };
  m.drift_da = [](double, double x) { return -x; };
  m.drift_daa = [](double, double) { return 0.0; };
  m.drift_dxa = [](double, double) { return -1.0; };
  m.drift_dxaa = [](double, double) { return 0.0; };
  m.diff_sq = [](double b, double x) { return 2.0 + std::sin(b * x); };
  m.diff_sq_dx = [](double b, double x) { return b * std::cos(b * x); };
  m.diff_sq_db = [](double b, double x) { return x * std::cos(b * x); };
  m.diff_sq_dbb = [](double b, double x) { return -x * x * std::sin(b * x); };
  m.diff_sq_dxb = [](double b, double x) { return std::cos(b * x) - b * x * std::sin(b * x); };
  m.diff_sq_dxbb = [](double b, double x) {
    return -2.0 * x * std::sin(b * x) - b * x * x * std::cos(b * x);
  };
  return m;
}

ModelSpec arctan_diffusion() {
  ModelSpec m;
  m.name = "arctan-diffusion";
  m.drift = [](double a, double x) { return a * (0.5 - x); };
  m.drift_da = [](double, double x) { return 0.5 - x; };
  m.drift_daa = [](double, double) { return 0.0; };
  m.drift_dxa = [](double, double) { return -1.0; };
  m.drift_dxaa = [](double, double) { return 0.0; };
  // With u = beta x and q = 1 + u^2: d/du atan(u) = 1/q, d2/du2 = -2u/q^2.
  m.diff_sq = [](double b, double x) { return std::atan(b * x) + 2.0; };
  m.diff_sq_dx = [](double b, double x) { return b / (1.0 + b * b * x * x); };
  m.diff_sq_db = [](double b, double x) { return x / (1.0 + b * b * x * x); };
  m.diff_sq_dbb = [](double b, double x) {
    const double q = 1.0 + b * b * x * x;
    return -2.0 * b * x * x * x / (q * q);
  };
  m.diff_sq_dxb = [](double b, double x) {
    const double q = 1.0 + b * b * x * x;
    return (1.0 - b * b * x * x) / (q * q);
  };
  m.diff_sq_dxbb = [](double b, double x) {
    const double u2 = b * b * x * x;
    const double q = 1.0 + u2;
    return 2.0 * b * x * x * (u2 - 3.0) / (q * q * q);
  };
  return m;
}

ModelSpec ou_const() {
  ModelSpec m;
  m.name = "ou-const";
  m.drift = [](double a, double x) { return -a * x; };
  m.drift_da = [](double, double x) { return -x; };
  m.drift_daa = [](double, double) { return 0.0; };
  m.drift_dxa = [](double, double) { return -1.0; };
  m.drift_dxaa = [](double, double) { return 0.0; };
  m.diff_sq = [](double b, double) { return b; };
  m.diff_sq_dx = [](double, double) { return 0.0; };
  m.diff_sq_db = [](double, double) { return 1.0; };
  m.diff_sq_dbb = [](double, double) { return 0.0; };
  m.diff_sq_dxb = [](double, double) { return 0.0; };
  m.diff_sq_dxbb = [](double, double) { return 0.0; };
  return m;
}

double central(const Coefficient& f, double param, double x, bool in_param) {
  if (in_param) {
    const double d = 1e-6 * (1.0 + std::abs(param));
    return (f(param + d, x) - f(param - d, x)) / (2.0 * d);
  }
  const double d = 1e-6 * (1.0 + std::abs(x));
  return (f(param, x + d) - f(param, x - d)) / (2.0 * d);
}

}  // namespace

const std::vector<std::string>& builtin_model_names() {
  static const std::vector<std::string> names{"sin-diffusion", "arctan-diffusion", "ou-const"};
  return names;
}

ModelSpec builtin_model(std::string_view name) {
  if (name == "sin-diffusion") return sin_diffusion();
  if (name == "arctan-diffusion") return arctan_diffusion();
  if (name == "ou-const") return ou_const();
  throw ConfigError(fmt::format("unknown model '{}'; available: {}", name,
                                fmt::join(builtin_model_names(), ", ")));
}

double ellipticity_scan(const ModelSpec& model, Interval beta_range, Interval x_range, int grid) {
  if (grid < 2) throw DomainError("ellipticity_scan: grid must be >= 2");
  if (!std::isfinite(beta_range.lo) || !std::isfinite(beta_range.hi) || !std::isfinite(x_range.lo) ||
      !std::isfinite(x_range.hi)) {
    throw DomainError("ellipticity_scan: intervals must be finite");
  }
  double lowest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double beta = beta_range.lo + (beta_range.hi - beta_range.lo) * i / (grid - 1);
    for (int j = 0; j < grid; ++j) {
      const double x = x_range.lo + (x_range.hi - x_range.lo) * j / (grid - 1);
      const double b = model.diff_sq(beta, x);
      if (!std::isfinite(b)) {
        throw NumericError(fmt::format("ellipticity_scan: B({}, {}) = {} at node ({}, {})", beta, x, b, i, j));
      }
      lowest = std::min(lowest, b);
    }
  }
  return lowest;
}

bool DerivativeCheckReport::all_ok() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.ok; });
}

DerivativeCheckReport derivative_check(const ModelSpec& model, Theta theta, double x, double rel_tol) {
  if (!(rel_tol > 0.0)) throw DomainError("derivative_check: rel_tol must be positive");
  struct Case {
    const char* field;
    const Coefficient* derivative;
    const Coefficient* parent;
    bool drift;     // parameter is alpha (else beta)
    bool in_param;  // differentiate the parent in the parameter (else in x)
  };
  const Case cases[] = {
      {"drift_da", &model.drift_da, &model.drift, true, true},
      {"drift_daa", &model.drift_daa, &model.drift_da, true, true},
      {"drift_dxa", &model.drift_dxa, &model.drift_da, true, false},
      {"drift_dxaa", &model.drift_dxaa, &model.drift_dxa, true, true},
      {"diff_sq_dx", &model.diff_sq_dx, &model.diff_sq, false, false},
      {"diff_sq_db", &model.diff_sq_db, &model.diff_sq, false, true},
      {"diff_sq_dbb", &model.diff_sq_dbb, &model.diff_sq_db, false, true},
      {"diff_sq_dxb", &model.diff_sq_dxb, &model.diff_sq_db, false, false},
      {"diff_sq_dxbb", &model.diff_sq_dxbb, &model.diff_sq_dxb, false, true},
  };
  DerivativeCheckReport report;
  for (const auto& c : cases) {
    const double param = c.drift ? theta.alpha : theta.beta;
    DerivativeCheckEntry e;
    e.field = c.field;
    e.analytic = (*c.derivative)(param, x);
    e.numeric = central(*c.parent, param, x, c.in_param);
    e.rel_err = std::abs(e.analytic - e.numeric) / std::max(1.0, std::abs(e.analytic));
    e.ok = std::isfinite(e.rel_err) && e.rel_err <= rel_tol;
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace sdeest
