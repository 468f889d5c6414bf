#pragma once

#include <cmath>

#include <Eigen/Core>

namespace sdeest {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Parameter pair: alpha enters the drift, beta the squared diffusion.
struct Theta {
  double alpha = 0.0;
  double beta = 0.0;

  [[nodiscard]] bool finite() const { return std::isfinite(alpha) && std::isfinite(beta); }

  [[nodiscard]] Vec2 vec() const { return {alpha, beta}; }
  static Theta from(const Vec2& v) { return {v(0), v(1)}; }

  [[nodiscard]] double operator[](int i) const { return i == 0 ? alpha : beta; }
  double& operator[](int i) { return i == 0 ? alpha : beta; }

  friend Theta operator+(Theta a, Theta b) { return {a.alpha + b.alpha, a.beta + b.beta}; }
  friend Theta operator-(Theta a, Theta b) { return {a.alpha - b.alpha, a.beta - b.beta}; }
  friend Theta operator*(double s, Theta a) { return {s * a.alpha, s * a.beta}; }
  friend bool operator==(const Theta&, const Theta&) = default;
};

}  // namespace sdeest
