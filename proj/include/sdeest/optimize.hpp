#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdeest/theta.hpp"

namespace sdeest {

struct Box {
  Theta lo;
  Theta hi;

  [[nodiscard]] bool contains(Theta t) const {
    return t.alpha >= lo.alpha && t.alpha <= hi.alpha && t.beta >= lo.beta && t.beta <= hi.beta;
  }
};

/// Pattern-search settings. Defaults: steps 0.5, divisor 2, acceleration 1.1.
struct HjConfig {
  Theta initial_step{0.5, 0.5};
  double step_divisor = 2.0;
  double acceleration = 1.1;
  double tol = 1e-4;
  long max_evals = 100000;
  std::optional<Box> bounds;
};

struct HjTraceRow {
  long eval = 0;
  Theta theta;
  double value = 0.0;
  std::string phase;  // start | explore | pattern
};

struct HjResult {
  Theta theta_min;
  double value = 0.0;
  long evaluations = 0;
  bool converged = false;
  std::vector<double> accepted_values;  // objective at each accepted base point, start first
};

using ObjectiveFn = std::function<double(Theta)>;

/// Hooke-Jeeves exploratory/pattern search.
///
/// Exploration visits alpha then beta, trying +step before -step, and keeps a
/// probe only on strict improvement. After a successful exploration the base
/// moves and a pattern point base + acceleration * (base - previous base) is
/// explored; the pattern chain continues while it beats the current base.
/// A failed exploration divides every step by step_divisor. Converged once all
/// steps are below tol. Probes outside `bounds` are rejected without evaluation;
/// non-finite objective values count as non-improving.
///
/// Throws DomainError if the start is out of bounds or the objective is not finite there.
HjResult hooke_jeeves(const ObjectiveFn& objective, Theta start, const HjConfig& cfg,
                      std::vector<HjTraceRow>* trace = nullptr);

}  // namespace sdeest
