#include "cbf/asymptotics.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cbf;

namespace {

std::vector<std::pair<double, double>> planted(double alpha, double beta, double c,
                                               const std::vector<double>& grid = geometric_grid(1e-1, 1e-6, 24)) {
  std::vector<std::pair<double, double>> out;
  for (double s : grid) out.emplace_back(s, std::exp(c - 2 * alpha * std::log(s) + beta * std::log(-std::log(s))));
  return out;
}

FibrationModel node() { return FibrationModel(1, 1, {{1}, {1}}, {}, {"z1"}); }
FibrationModel double_fiber() { return FibrationModel(1, 1, {{2}, {0}}, {}, {"z1"}); }

}  // namespace

TEST(GeometricGrid, Shape) {
  auto g = geometric_grid(1e-1, 1e-6, 24);
  ASSERT_EQ(g.size(), 24u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-1);
  EXPECT_DOUBLE_EQ(g.back(), 1e-6);
  for (std::size_t k = 1; k < g.size(); ++k) EXPECT_LT(g[k], g[k - 1]);
  EXPECT_THROW(geometric_grid(1e-6, 1e-1, 10), DomainError);
  EXPECT_THROW(geometric_grid(1e-1, 1e-6, 1), DomainError);
}

TEST(Fit, RecoversPlantedExponents) {
  for (double alpha : {0.0, 1.0 / 3, 0.5, 5.0 / 6})
    for (double beta : {0.0, 1.0, 2.0}) {
      auto f = fit(planted(alpha, beta, 0.7));
      EXPECT_NEAR(f.alpha, alpha, 0.01) << alpha << " " << beta;
      EXPECT_NEAR(f.beta, beta, 0.1) << alpha << " " << beta;
      EXPECT_NEAR(f.constant, 0.7, 1e-6);
      EXPECT_LT(f.max_rel_residual, 1e-8);
    }
}

TEST(Fit, ConstantSeries) {
  auto f = fit(planted(0, 0, std::log(7.0)));
  EXPECT_NEAR(f.alpha, 0, 1e-9);
  EXPECT_NEAR(f.beta, 0, 1e-9);
  EXPECT_NEAR(f.constant, std::log(7.0), 1e-9);
}

TEST(Fit, TolerantOfSmallNoise) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0, 1e-4);
  auto s = planted(0.25, 1.0, 0.0);
  for (auto& [x, v] : s) v *= std::exp(noise(rng));
  auto f = fit(s);
  EXPECT_NEAR(f.alpha, 0.25, 0.01);
  EXPECT_NEAR(f.beta, 1.0, 0.1);
}

TEST(Fit, RejectsBadInput) {
  auto few = planted(0.5, 0, 0, geometric_grid(1e-1, 1e-2, 5));
  EXPECT_THROW(fit(few), FitError);
  auto s = planted(0.5, 0, 0);
  s[3].second = 0;
  EXPECT_THROW(fit(s), FitError);
}

TEST(Ray, PointsAndAnchor) {
  Ray r({1, 0}, geometric_grid(1e-1, 1e-3, 6), 0.4);
  auto p = r.point(0.01);
  EXPECT_DOUBLE_EQ(p.moduli()[0], 0.01);
  EXPECT_DOUBLE_EQ(p.moduli()[1], 0.4);
  Ray h({Rational(1, 2)});
  EXPECT_NEAR(h.point(0.04).moduli()[0], 0.2, 1e-15);
  EXPECT_THROW(Ray({0, 0}), DomainError);
  EXPECT_THROW(Ray({-1}), DomainError);
  EXPECT_THROW(Ray({1}, {0.1, 0.2}), DomainError);
}

TEST(SampleRay, NodeSamplesAreLogarithmic) {
  Ray r({1}, geometric_grid(1e-1, 1e-4, 8));
  auto samples = sample_ray(node(), r);
  ASSERT_EQ(samples.size(), 8u);
  for (const auto& x : samples) {
    ASSERT_TRUE(x.ok) << x.error;
    EXPECT_NEAR(x.value, -2 * std::numbers::pi * std::log(x.s), 1e-6 * x.value);
  }
  EXPECT_THROW(sample_ray(node(), Ray({1, 1})), DomainError);
}

TEST(SampleRay, EmptyRegionPointsAreFlagged) {
  // z1 = w1, z2 = w1 w2 is empty when |z2| > |z1|; along u = (2, 1) it always is.
  FibrationModel model(2, 0, {{1, 1}, {0, 1}}, {}, {"z1", "z2"});
  auto samples = sample_ray(model, Ray({2, 1}, geometric_grid(1e-1, 1e-3, 6)));
  for (const auto& x : samples) {
    EXPECT_FALSE(x.ok);
    EXPECT_FALSE(x.error.empty());
  }
  EXPECT_TRUE(usable(samples).empty());
}

TEST(VerifyPrediction, NodeDoubleFiberVerticalPole) {
  Ray r({1});
  auto check = [&](const FibrationModel& model, const Rational& expected, double beta) {
    auto f = fit(usable(sample_ray(model, r)));
    auto rep = verify_prediction(model, r, f, 0.01);
    EXPECT_EQ(rep.alpha_star, expected);
    EXPECT_TRUE(rep.pass) << rep.alpha;
    EXPECT_NEAR(rep.beta, beta, 0.1);
  };
  check(node(), 0, 1);
  check(double_fiber(), Rational(1, 2), 0);
  check(FibrationModel(1, 1, {{1}, {0}}, {Rational(1, 3), 0}, {"z1"}), Rational(1, 3), 0);
  check(FibrationModel(1, 1, {{1}, {0}}, {Rational(2, 3), 0}, {"z1"}), Rational(2, 3), 0);
}

TEST(VerifyPrediction, WrongExpectationFails) {
  Ray r({1});
  auto f = fit(usable(sample_ray(double_fiber(), r)));
  f.alpha += 0.05;
  EXPECT_FALSE(verify_prediction(double_fiber(), r, f, 0.01).pass);
}

TEST(Lelong, NodePassesPolynomialFails) {
  auto node_samples = usable(sample_ray(node(), Ray({1})));
  auto rep = lelong_zero_check(node_samples, 0.0);
  EXPECT_TRUE(rep.pass) << rep.slope;
  EXPECT_EQ(rep.per_epsilon.size(), 3u);
  EXPECT_FALSE(rep.note.empty());

  auto grows = planted(0.05, 0, 0);  // psi ~ s^{-0.1}
  auto bad = lelong_zero_check(grows, 0.0);
  EXPECT_FALSE(bad.pass);
  EXPECT_NEAR(bad.slope, -0.1, 1e-6);
  EXPECT_FALSE(bad.per_epsilon.back().second);

  EXPECT_TRUE(lelong_zero_check(planted(0, 0, 2.0), 0.0).pass);
  EXPECT_TRUE(lelong_zero_check(planted(0.5, 0, 1.0), 0.5).pass);
}

TEST(RayProperties, AdditiveOverBlockDiagonalModels) {
  // factors: vertical pole a = 1/3 over z1, double fiber over z2
  FibrationModel model(2, 1, {{1, 0}, {0, 2}, {0, 0}}, {Rational(1, 3), 0, 0}, {"z1", "z2"});
  auto alpha_on = [&](std::vector<Rational> u) {
    Ray r(std::move(u));
    return fit(usable(sample_ray(model, r))).alpha;
  };
  const double a10 = alpha_on({1, 0}), a01 = alpha_on({0, 1}), a11 = alpha_on({1, 1});
  EXPECT_NEAR(a10, 1.0 / 3, 0.02);
  EXPECT_NEAR(a01, 0.5, 0.02);
  EXPECT_NEAR(a11, a10 + a01, 0.02);
}

TEST(RayProperties, InvalidModelRejectedBeforeSampling) {
  FibrationModel bad(1, 1, {{1}, {0}}, {0, 1}, {"z1"});
  EXPECT_THROW(sample_ray(bad, Ray({1})), ModelError);
}

TEST(Lelong, ShortGridKeepsLogFactorsOut) {
  FibrationModel node_model(1, 1, {{1}, {1}}, {}, {"z1"});
  auto samples = usable(sample_ray(node_model, Ray({1}, geometric_grid(1e-1, 1e-6, 6))));
  EXPECT_TRUE(lelong_zero_check(samples, 0.0).pass);
  samples.resize(3);
  EXPECT_THROW(lelong_zero_check(samples, 0.0), FitError);
}
