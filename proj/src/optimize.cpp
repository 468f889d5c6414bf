#include "sdeest/optimize.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sdeest/error.hpp"

namespace sdeest {

namespace {

struct BudgetExhausted {};

class Search {
 public:
  Search(const ObjectiveFn& objective, const HjConfig& cfg, std::vector<HjTraceRow>* trace)
      : objective_(objective), cfg_(cfg), trace_(trace) {}

  double eval(Theta t, const char* phase) {
    if (cfg_.bounds && !cfg_.bounds->contains(t)) return kInf;
    if (evaluations_ >= cfg_.max_evals) throw BudgetExhausted{};
    ++evaluations_;
    double v = objective_(t);
    if (!std::isfinite(v)) v = kInf;
    if (trace_) trace_->push_back({evaluations_, t, v, phase});
    return v;
  }

  void explore(Theta& point, double& value, Theta step) {
    for (int i = 0; i < 2; ++i) {
      Theta probe = point;
      probe[i] = point[i] + step[i];
      double v = eval(probe, "explore");
      if (v < value) {
        point = probe;
        value = v;
        continue;
      }
      probe[i] = point[i] - step[i];
      v = eval(probe, "explore");
      if (v < value) {
        point = probe;
        value = v;
      }
    }
  }

  [[nodiscard]] long evaluations() const { return evaluations_; }

  static constexpr double kInf = std::numeric_limits<double>::infinity();

 private:
  const ObjectiveFn& objective_;
  const HjConfig& cfg_;
  std::vector<HjTraceRow>* trace_;
  long evaluations_ = 0;
};

}  // namespace

HjResult hooke_jeeves(const ObjectiveFn& objective, Theta start, const HjConfig& cfg, std::vector<HjTraceRow>* trace) {
  if (!(cfg.step_divisor > 1.0)) throw DomainError("hooke_jeeves: step_divisor must exceed 1");
  if (!(cfg.acceleration >= 1.0)) throw DomainError("hooke_jeeves: acceleration must be >= 1");
  if (!(cfg.tol > 0.0)) throw DomainError("hooke_jeeves: tol must be positive");
  if (!(cfg.initial_step.alpha > 0.0 && cfg.initial_step.beta > 0.0)) {
    throw DomainError("hooke_jeeves: initial steps must be positive");
  }
  if (cfg.max_evals < 1) throw DomainError("hooke_jeeves: max_evals must be >= 1");
  if (!start.finite()) throw DomainError("hooke_jeeves: start must be finite");
  if (cfg.bounds && !cfg.bounds->contains(start)) {
    throw DomainError(fmt::format("hooke_jeeves: start ({}, {}) outside bounds", start.alpha, start.beta));
  }

  Search search(objective, cfg, trace);
  HjResult result;
  result.theta_min = start;
  result.value = search.eval(start, "start");
  if (!std::isfinite(result.value)) {
    throw DomainError(fmt::format("hooke_jeeves: objective not finite at start ({}, {})", start.alpha, start.beta));
  }
  result.accepted_values.push_back(result.value);

  Theta step = cfg.initial_step;
  Theta& base = result.theta_min;
  double& base_value = result.value;
  try {
    while (true) {
      Theta point = base;
      double value = base_value;
      search.explore(point, value, step);
      if (value < base_value) {
        while (true) {
          const Theta previous = base;
          base = point;
          base_value = value;
          result.accepted_values.push_back(value);
          point = base + cfg.acceleration * (base - previous);
          value = search.eval(point, "pattern");
          search.explore(point, value, step);
          if (!(value < base_value)) break;
        }
      } else {
        step = (1.0 / cfg.step_divisor) * step;
        if (step.alpha < cfg.tol && step.beta < cfg.tol) {
          result.converged = true;
          break;
        }
      }
    }
  } catch (const BudgetExhausted&) {
    result.converged = false;
  }
  result.evaluations = search.evaluations();
  return result;
}

}  // namespace sdeest
