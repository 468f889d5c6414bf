#pragma once

#include "sdeest/error.hpp"

namespace sdeest {

template <int N>
std::array<double, N + 1> hermite_all(double x, double t) {
  static_assert(N >= 1 && N <= kMaxHermiteOrder);
  if (!(t > 0.0)) throw DomainError("hermite: scale t must be positive");
  std::array<double, N + 1> h{};
  h[0] = 1.0;
  h[1] = x / t;
  for (int m = 1; m < N; ++m) h[m + 1] = (x * h[m] - m * h[m - 1]) / t;
  return h;
}

}  // namespace sdeest
