#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "sdeest/error.hpp"
#include "sdeest/likelihood.hpp"
#include "sdeest/optimize.hpp"
#include "sdeest/simulate.hpp"

namespace sdeest {
namespace {

double bowl(Theta t) { return (t.alpha - 1.0) * (t.alpha - 1.0) + (t.beta - 2.0) * (t.beta - 2.0); }

void expect_strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LT(v[i], v[i - 1]) << "accepted value " << i;
}

TEST(HookeJeeves, DefaultsArePaperConstants) {
  const HjConfig c;
  EXPECT_EQ(c.initial_step, (Theta{0.5, 0.5}));
  EXPECT_EQ(c.step_divisor, 2.0);
  EXPECT_EQ(c.acceleration, 1.1);
  EXPECT_EQ(c.tol, 1e-4);
  EXPECT_EQ(c.max_evals, 100000);
  EXPECT_FALSE(c.bounds.has_value());
}

TEST(HookeJeeves, SolvesBowl) {
  const HjResult r = hooke_jeeves(bowl, {0.0, 0.0}, {});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.theta_min.alpha, 1.0, 2e-4);
  EXPECT_NEAR(r.theta_min.beta, 2.0, 2e-4);
  EXPECT_EQ(r.value, bowl(r.theta_min));
  expect_strictly_decreasing(r.accepted_values);
}

TEST(HookeJeeves, ConstantObjectiveStaysAtStart) {
  long calls = 0;
  const HjResult r = hooke_jeeves(
      [&](Theta) {
        ++calls;
        return 3.0;
      },
      {0.3, -0.7}, {});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.theta_min, (Theta{0.3, -0.7}));
  EXPECT_EQ(r.accepted_values.size(), 1u);
  EXPECT_EQ(r.evaluations, calls);
  // 0.5 / 2^k < 1e-4 first at k = 13; each failed round probes four points.
  EXPECT_EQ(r.evaluations, 1 + 13 * 4);
}

TEST(HookeJeeves, RespectsBudget) {
  HjConfig c;
  c.max_evals = 17;
  const HjResult r = hooke_jeeves([](Theta t) { return std::cos(7 * t.alpha) + t.beta * t.beta; }, {0.0, 3.0}, c);
  EXPECT_LE(r.evaluations, 17);
  EXPECT_FALSE(r.converged);
}

TEST(HookeJeeves, Deterministic) {
  const auto f = [](Theta t) { return std::sin(3 * t.alpha) * std::cos(2 * t.beta) + 0.1 * bowl(t); };
  std::vector<HjTraceRow> ta, tb;
  const HjResult a = hooke_jeeves(f, {0.1, 0.2}, {}, &ta);
  const HjResult b = hooke_jeeves(f, {0.1, 0.2}, {}, &tb);
  EXPECT_EQ(a.theta_min, b.theta_min);
  EXPECT_EQ(a.evaluations, b.evaluations);
  EXPECT_EQ(a.accepted_values, b.accepted_values);
  ASSERT_EQ(ta.size(), tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) EXPECT_EQ(ta[i].theta, tb[i].theta);
}

TEST(HookeJeeves, StaysInsideBounds) {
  HjConfig c;
  c.bounds = Box{{-1.0, -1.0}, {0.5, 1.5}};
  std::vector<HjTraceRow> trace;
  const HjResult r = hooke_jeeves(bowl, {0.0, 0.0}, c, &trace);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.theta_min.alpha, 0.5, 2e-4);
  EXPECT_NEAR(r.theta_min.beta, 1.5, 2e-4);
  for (const HjTraceRow& row : trace) EXPECT_TRUE(c.bounds->contains(row.theta));
}

TEST(HookeJeeves, TraceMatchesEvaluations) {
  std::vector<HjTraceRow> trace;
  const HjResult r = hooke_jeeves(bowl, {0.0, 0.0}, {}, &trace);
  ASSERT_EQ(static_cast<long>(trace.size()), r.evaluations);
  EXPECT_EQ(trace.front().phase, "start");
  bool saw_pattern = false;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    EXPECT_EQ(trace[i].eval, static_cast<long>(i + 1));
    EXPECT_EQ(trace[i].value, bowl(trace[i].theta));
    EXPECT_TRUE(trace[i].phase == "start" || trace[i].phase == "explore" || trace[i].phase == "pattern");
    saw_pattern |= trace[i].phase == "pattern";
  }
  EXPECT_TRUE(saw_pattern);
}

TEST(HookeJeeves, FirstMovesFollowProbeOrder) {
  // From (0, 0) with step 0.5: alpha+ improves, then beta+ improves.
  std::vector<HjTraceRow> trace;
  hooke_jeeves(bowl, {0.0, 0.0}, {}, &trace);
  ASSERT_GE(trace.size(), 3u);
  EXPECT_EQ(trace[1].theta, (Theta{0.5, 0.0}));
  EXPECT_EQ(trace[2].theta, (Theta{0.5, 0.5}));
}

TEST(HookeJeeves, StartErrors) {
  EXPECT_THROW(hooke_jeeves([](Theta) { return std::numeric_limits<double>::quiet_NaN(); }, {0.0, 0.0}, {}),
               DomainError);
  HjConfig c;
  c.bounds = Box{{0.0, 0.0}, {1.0, 1.0}};
  EXPECT_THROW(hooke_jeeves(bowl, {2.0, 0.0}, c), DomainError);
}

TEST(HookeJeeves, NonFiniteProbesAreNonImproving) {
  const auto f = [](Theta t) {
    if (t.alpha > 0.7) return std::numeric_limits<double>::quiet_NaN();
    return bowl(t);
  };
  const HjResult r = hooke_jeeves(f, {0.0, 0.0}, {});
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.theta_min.alpha, 0.7);
  EXPECT_NEAR(r.theta_min.alpha, 0.7, 2e-4);
  EXPECT_NEAR(r.theta_min.beta, 2.0, 2e-4);
  expect_strictly_decreasing(r.accepted_values);
}

TEST(HookeJeeves, RandomQuadratics) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> eig(0.5, 2.5), angle(0.0, std::numbers::pi), centre(-3.0, 3.0);
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
    EXPECT_TRUE(r.converged) << trial;
    EXPECT_LE(r.evaluations, 5000) << trial;
    EXPECT_NEAR(r.theta_min.alpha, c(0), 2e-4) << trial;
    EXPECT_NEAR(r.theta_min.beta, c(1), 2e-4) << trial;
    expect_strictly_decreasing(r.accepted_values);
  }
}

TEST(HookeJeeves, QuasiLikelihoodMatchesGridScan) {
  const ModelSpec m = builtin_model("sin-diffusion");
  const Trajectory t = simulate(m, {{1.0, 2.0}, 0.0, 1000.0, 0.8, 1});
  const auto f = [&](Theta th) { return neg_log_ql(m, th, t); };

  // Coarse scan locates the basin, a fine 200 x 200 scan resolves it to 1e-4.
  const auto scan = [&](double a0, double a1, double b0, double b1, int n) {
    Theta best{};
    double v_best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Theta th{a0 + (a1 - a0) * i / (n - 1), b0 + (b1 - b0) * j / (n - 1)};
        const double v = f(th);
        if (v < v_best) v_best = v, best = th;
      }
    return best;
  };
  const Theta coarse = scan(0.5, 1.5, 1.5, 2.5, 51);
  const double w = 0.01 - 0.01 / 200;
  const Theta fine = scan(coarse.alpha - w, coarse.alpha + w, coarse.beta - w, coarse.beta + w, 200);
  ASSERT_LT(std::abs(fine.alpha - coarse.alpha), w - 1e-4);
  ASSERT_LT(std::abs(fine.beta - coarse.beta), w - 1e-4);

  const HjResult r = hooke_jeeves(f, {0.5, 1.0}, {});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.theta_min.alpha, fine.alpha, 2e-4);
  EXPECT_NEAR(r.theta_min.beta, fine.beta, 2e-4);
}

}  // namespace
}  // namespace sdeest
