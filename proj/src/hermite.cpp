#include "sdeest/hermite.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "sdeest/error.hpp"

namespace sdeest {

double log_gauss_kernel(double x, double t) {
  if (!(t > 0.0)) throw DomainError(fmt::format("gauss kernel: variance t = {} must be positive", t));
  return -0.5 * std::log(2.0 * std::numbers::pi * t) - x * x / (2.0 * t);
}

double gauss_kernel(double x, double t) { return std::exp(log_gauss_kernel(x, t)); }

double hermite(int m, double x, double t) {
  if (m < 0 || m > kMaxHermiteOrder) {
    throw DomainError(fmt::format("hermite: order {} unsupported (0..{})", m, kMaxHermiteOrder));
  }
  if (!(t > 0.0)) throw DomainError(fmt::format("hermite: scale t = {} must be positive", t));
  double prev = 1.0;
  if (m == 0) return prev;
  double cur = x / t;
  for (int k = 1; k < m; ++k) {
    const double next = (x * cur - k * prev) / t;
    prev = cur;
    cur = next;
  }
  return cur;
}

HermiteEval evaluate_hermite(int m, double x, double t) { return {m, x, t, hermite(m, x, t)}; }

}  // namespace sdeest
