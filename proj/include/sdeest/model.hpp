#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sdeest/theta.hpp"

namespace sdeest {

/// Scalar coefficient function of (parameter, state).
using Coefficient = std::function<double(double, double)>;

/// Parametric scalar diffusion dX = A(alpha, X) dt + sqrt(B(beta, X)) dW.
///
/// Every partial derivative consumed by the density expansion and its
/// parameter derivatives is supplied analytically. Suffixes name the
/// differentiation variables: `drift_dxaa` is d^3 A / dx dalpha dalpha.
/// Instances are immutable once built and may be shared between threads.
struct ModelSpec {
  std::string name;

  Coefficient drift;
  Coefficient drift_da;
  Coefficient drift_daa;
  Coefficient drift_dxa;
  Coefficient drift_dxaa;

  Coefficient diff_sq;
  Coefficient diff_sq_dx;
  Coefficient diff_sq_db;
  Coefficient diff_sq_dbb;
  Coefficient diff_sq_dxb;
  Coefficient diff_sq_dxbb;
};

/// Names accepted by builtin_model, in display order.
const std::vector<std::string>& builtin_model_names();

/// `sin-diffusion`: A = -alpha x, B = 2 + sin(beta x).
/// `arctan-diffusion`: A = alpha (0.5 - x), B = arctan(beta x) + 2.
/// `ou-const`: A = -alpha x, B = beta (Ornstein-Uhlenbeck, exact transition law known).
/// Throws ConfigError for any other name.
ModelSpec builtin_model(std::string_view name);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Minimum of B over a `grid` x `grid` lattice of (beta, x). A result <= 0
/// means the model is not uniformly elliptic on the scanned range.
/// Throws NumericError naming the node if B is not finite somewhere.
double ellipticity_scan(const ModelSpec& model, Interval beta_range, Interval x_range, int grid);

struct DerivativeCheckEntry {
  std::string field;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_err = 0.0;
  bool ok = true;
};

struct DerivativeCheckReport {
  std::vector<DerivativeCheckEntry> entries;

  [[nodiscard]] bool all_ok() const;
};

/// Compares every derivative field with a central difference of its parent
/// (step 1e-6 * (1 + |argument|)). rel_err = |analytic - numeric| / max(1, |analytic|).
DerivativeCheckReport derivative_check(const ModelSpec& model, Theta theta, double x, double rel_tol);

}  // namespace sdeest
