#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "sdeest/error.hpp"
#include "sdeest/model.hpp"

namespace sdeest {
namespace {

TEST(BuiltinModel, SinDiffusionCoefficients) {
  const ModelSpec m = builtin_model("sin-diffusion");
  EXPECT_DOUBLE_EQ(m.drift(1.0, 2.0), -2.0);
  EXPECT_DOUBLE_EQ(m.diff_sq(0.5, 0.0), 2.0);
  EXPECT_EQ(m.name, "sin-diffusion");
}

TEST(BuiltinModel, ArctanDiffusionSlopeAtOrigin) {
  const ModelSpec m = builtin_model("arctan-diffusion");
  EXPECT_DOUBLE_EQ(m.diff_sq_dx(0.7, 0.0), 0.7);
  const double d = 1e-6;
  const double fd = (m.diff_sq(0.7, d) - m.diff_sq(0.7, -d)) / (2 * d);
  EXPECT_NEAR(fd, 0.7, 1e-9);
  EXPECT_DOUBLE_EQ(m.drift(2.0, 0.0), 1.0);
}

TEST(BuiltinModel, UnknownNameListsAvailableModels) {
  try {
    builtin_model("cir");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const auto& name : builtin_model_names()) EXPECT_NE(msg.find(name), std::string::npos) << msg;
  }
}

TEST(Ellipticity, BenchmarkModelsArePositive) {
  EXPECT_GE(ellipticity_scan(builtin_model("sin-diffusion"), {0, 3}, {-10, 10}, 101), 1.0);
  EXPECT_GT(ellipticity_scan(builtin_model("arctan-diffusion"), {0, 2}, {-10, 10}, 101), 0.4);
}

TEST(Ellipticity, RejectsPureSine) {
  ModelSpec m = builtin_model("sin-diffusion");
  m.diff_sq = [](double b, double x) { return std::sin(b * x); };
  EXPECT_LT(ellipticity_scan(m, {1, 1}, {-std::numbers::pi, std::numbers::pi}, 101), 0.0);
}

TEST(Ellipticity, NonFiniteNodeIsReported) {
  ModelSpec m = builtin_model("ou-const");
  m.diff_sq = [](double b, double x) { return x > 0.5 ? std::nan("") : b; };
  EXPECT_THROW(ellipticity_scan(m, {1, 2}, {0, 1}, 5), NumericError);
  EXPECT_THROW(ellipticity_scan(m, {1, 2}, {0, 1}, 1), DomainError);
}

TEST(DerivativeCheck, SinDiffusionPasses) {
  const auto report = derivative_check(builtin_model("sin-diffusion"), {1.0, 0.5}, 1.0, 1e-5);
  EXPECT_EQ(report.entries.size(), 9u);
  for (const auto& e : report.entries) EXPECT_TRUE(e.ok) << e.field << " rel_err " << e.rel_err;
}

TEST(DerivativeCheck, OuConstHasFlatDiffusion) {
  const ModelSpec m = builtin_model("ou-const");
  for (double x : {-3.0, 0.0, 2.5}) {
    EXPECT_EQ(m.diff_sq_dx(1.7, x), 0.0);
    EXPECT_EQ(m.diff_sq_dxb(1.7, x), 0.0);
    EXPECT_EQ(m.diff_sq_dxbb(1.7, x), 0.0);
  }
  EXPECT_TRUE(derivative_check(m, {0.3, 1.7}, 0.4, 1e-5).all_ok());
}

TEST(DerivativeCheck, WrongFieldIsFlagged) {
  ModelSpec m = builtin_model("sin-diffusion");
  m.diff_sq_dxb = [](double b, double x) { return std::cos(b * x); };  // drops -b x sin(b x)
  const auto report = derivative_check(m, {1.0, 0.5}, 1.0, 1e-5);
  EXPECT_FALSE(report.all_ok());
  for (const auto& e : report.entries) {
    // diff_sq_dxbb is checked against diff_sq_dxb, so it inherits the defect.
    EXPECT_EQ(e.ok, e.field != "diff_sq_dxb" && e.field != "diff_sq_dxbb") << e.field;
  }
}

struct Range {
  std::string model;
  double beta_lo, beta_hi;
};

class BuiltinDerivatives : public ::testing::TestWithParam<Range> {};

TEST_P(BuiltinDerivatives, RandomPointsPass) {
  const Range r = GetParam();
  const ModelSpec m = builtin_model(r.model);
  std::mt19937_64 rng(20201);
  std::uniform_real_distribution<double> alpha(0.1, 2.0), beta(r.beta_lo, r.beta_hi), x(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const Theta theta{alpha(rng), beta(rng)};
    const double at = x(rng);
    const auto report = derivative_check(m, theta, at, 1e-5);
    for (const auto& e : report.entries) {
      EXPECT_TRUE(e.ok) << r.model << " " << e.field << " at theta=(" << theta.alpha << "," << theta.beta
                        << ") x=" << at << " rel_err=" << e.rel_err;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Benchmark, BuiltinDerivatives,
                         ::testing::Values(Range{"sin-diffusion", 0.0, 3.0}, Range{"arctan-diffusion", 0.0, 2.0},
                                           Range{"ou-const", 0.5, 5.0}));

}  // namespace
}  // namespace sdeest
