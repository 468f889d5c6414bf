#pragma once

#include <array>

namespace sdeest {

/// Highest Hermite order supported by `hermite`.
inline constexpr int kMaxHermiteOrder = 10;

/// Gaussian kernel phi_t(x) = (2 pi t)^{-1/2} exp(-x^2 / (2t)). Throws DomainError for t <= 0.
double gauss_kernel(double x, double t);

/// log phi_t(x).
double log_gauss_kernel(double x, double t);

/// Scaled Hermite polynomial defined by (-1)^m d^m/dx^m phi_t(x) = H_m(x, t) phi_t(x).
/// Evaluated by H_{m+1} = (x/t) H_m - (m/t) H_{m-1}, H_0 = 1, H_1 = x/t.
double hermite(int m, double x, double t);

/// H_0..H_N at one (x, t), for callers needing several orders of the same frame.
template <int N>
std::array<double, N + 1> hermite_all(double x, double t);

struct HermiteEval {
  int order = 0;
  double argument = 0.0;
  double scale = 1.0;
  double value = 1.0;
};

HermiteEval evaluate_hermite(int m, double x, double t);

}  // namespace sdeest

#include "sdeest/hermite_impl.hpp"
