#pragma once

#include <cstdint>
#include <random>

#include "sdeest/model.hpp"
#include "sdeest/theta.hpp"
#include "sdeest/trajectory.hpp"

namespace sdeest {

struct SimConfig {
  Theta theta_true;
  double x0 = 0.0;
  double horizon = 1.0;  // T
  double step = 0.1;     // h
  std::uint64_t seed = 0;
};

/// n = floor(T / h), with a 1e-9 relative guard so that e.g. 10000 / 0.8 yields 12500.
std::size_t observation_count(double horizon, double step);

/// Seed of replication `index` under base seed `base`: base + index.
std::uint64_t replication_seed(std::uint64_t base, std::uint64_t index);

/// Standard normal variates from mt19937_64 via Box-Muller.
///
/// Uniforms are u = ((r >> 11) + 0.5) * 2^-53, strictly inside (0, 1). Each pair
/// (u1, u2) yields sqrt(-2 ln u1) cos(2 pi u2) followed by sqrt(-2 ln u1) sin(2 pi u2).
/// The stream is fully determined by the seed; no std::*_distribution is involved.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(mixed(seed)) {}

  double next();
  double uniform();

 private:
  // Adjacent integer seeds fed straight into mt19937_64 give correlated first
  // outputs, and replications use consecutive seeds, so spread the seed first.
  static std::mt19937_64 mixed(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return std::mt19937_64(seq);
  }

  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// x + A h + sqrt(B) dw + (1/4) dB/dx (dw^2 - h). Throws EllipticityError if B(beta, x) <= 0.
double milstein_step(const ModelSpec& model, Theta theta, double x, double h, double dw);

/// Milstein path with dw ~ N(0, h) drawn from NormalSource(cfg.seed).
/// Throws ExplosionError if |X| exceeds 1e12.
Trajectory simulate(const ModelSpec& model, const SimConfig& cfg);

struct GaussianMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact transition law of dX = -alpha X dt + sqrt(b_const) dW over a step h.
GaussianMoments ou_transition_moments(double alpha, double b_const, double x, double h);

/// Exact Ornstein-Uhlenbeck sampler for dX = -alpha X dt + sqrt(b_const) dW:
/// X' ~ N(x e^{-alpha h}, b_const (1 - e^{-2 alpha h}) / (2 alpha)).
Trajectory simulate_ou_exact(double alpha, double b_const, const SimConfig& cfg);

}  // namespace sdeest
