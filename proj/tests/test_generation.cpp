#include <gtest/gtest.h>

#include <cmath>

#include "solar/errors.hpp"
#include "solar/generation.hpp"
#include "support/fixtures.hpp"

using namespace solar;

namespace {

// f(g) = g / 2 on [0, 2]
GenerationDistribution ramp() {
  return GenerationDistribution::tabulated({0.0, 1.0, 2.0}, {0.0, 0.5, 1.0});
}

}  // namespace

TEST(Generation, UniformMoments) {
  const auto g = GenerationDistribution::uniform(0.0, 1.0);
  EXPECT_DOUBLE_EQ(g.density(0.3), 1.0);
  EXPECT_DOUBLE_EQ(g.density(1.5), 0.0);
  EXPECT_DOUBLE_EQ(g.cdf(0.25), 0.25);
  EXPECT_DOUBLE_EQ(g.mean(), 0.5);
  EXPECT_DOUBLE_EQ(g.quantile(0.7), 0.7);
  EXPECT_NEAR(g.total_mass(), 1.0, 1e-12);
}

TEST(Generation, TruncatedMeanUniform) {
  const auto g = GenerationDistribution::uniform(0.0, 1.0);
  // E[G 1{dG <= 1}] = 1/(2d^2) for d >= 1
  EXPECT_NEAR(truncated_mean(g, 2.0, 1.0), 0.125, 1e-15);
  EXPECT_NEAR(truncated_mean(g, 1.0, 1.0), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(truncated_mean(g, 0.0, 1.0), 0.5);
  EXPECT_NEAR(truncated_mean(g, 0.5, 1.0), 0.5, 1e-15);
}

TEST(Generation, TruncatedMeanSlope) {
  const auto g = GenerationDistribution::uniform(0.0, 1.0);
  EXPECT_NEAR(truncated_mean_slope(g, 2.0, 1.0), -0.125, 1e-15);
  const double h = 1e-6;
  const double fd = (truncated_mean(g, 3.0 + h, 1.0) - truncated_mean(g, 3.0 - h, 1.0)) / (2 * h);
  EXPECT_NEAR(truncated_mean_slope(g, 3.0, 1.0), fd, 1e-8);
}

TEST(Generation, TruncatedMeanInverse) {
  const auto g = GenerationDistribution::uniform(0.0, 1.0);
  EXPECT_NEAR(truncated_mean_inverse(g, 0.125, 1.0), 2.0, 1e-12);
  EXPECT_EQ(truncated_mean_inverse(g, 0.6, 1.0), 0.0);
  // flat stretch on [0, 1]: the supremum is returned
  EXPECT_NEAR(truncated_mean_inverse(g, 0.5, 1.0), 1.0, 1e-12);
  for (double d : {1.2, 2.5, 7.0, 40.0}) {
    EXPECT_NEAR(truncated_mean_inverse(g, truncated_mean(g, d, 1.0), 1.0), d, 1e-9 * d);
  }
}

TEST(Generation, TabulatedRamp) {
  const auto g = ramp();
  EXPECT_NEAR(g.total_mass(), 1.0, 1e-15);
  EXPECT_NEAR(g.mean(), 4.0 / 3.0, 1e-14);
  EXPECT_NEAR(g.cdf(1.0), 0.25, 1e-15);
  EXPECT_NEAR(g.quantile(0.25), 1.0, 1e-12);
  EXPECT_NEAR(g.partial_mean(1.0), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(g.density(1.5), 0.75, 1e-15);
  for (double u : {0.01, 0.2, 0.5, 0.9, 0.999}) {
    EXPECT_NEAR(g.cdf(g.quantile(u)), u, 1e-12);
  }
}

TEST(Generation, ExpectBelowMatchesSimpson) {
  const auto g = ramp();
  const auto h = [](double x) { return std::exp(-x) * x; };
  const double oracle = solar::testing::simpson([&](double x) { return h(x) * x / 2.0; }, 0.0, 1.3);
  EXPECT_NEAR(g.expect_below(h, 1.3), oracle, 1e-12);
  const auto u = GenerationDistribution::uniform(0.0, 1.0);
  EXPECT_NEAR(u.expect_below([](double x) { return x * x; }, 0.5), 1.0 / 24.0, 1e-14);
}

TEST(Generation, TabulatedMassChecked) {
  EXPECT_THROW(GenerationDistribution::tabulated({0.0, 1.0}, {1.0, 2.0}), InvalidArgument);
  const auto g = GenerationDistribution::tabulated({0.0, 1.0}, {1.0, 2.0}, true);
  EXPECT_NEAR(g.total_mass(), 1.0, 1e-15);
  EXPECT_THROW(GenerationDistribution::tabulated({0.0, 0.0, 1.0}, {1, 1, 1}, true), InvalidArgument);
  EXPECT_THROW(GenerationDistribution::tabulated({0.0, 1.0}, {-1.0, 3.0}, true), InvalidArgument);
}

TEST(Generation, PointMass) {
  const auto g = GenerationDistribution::point_mass(0.0);
  EXPECT_FALSE(g.has_density());
  EXPECT_EQ(g.mean(), 0.0);
  EXPECT_EQ(truncated_mean(g, 5.0, 1.0), 0.0);
  EXPECT_EQ(g.cdf(0.0), 1.0);
  EXPECT_EQ(g.quantile(0.4), 0.0);
}

TEST(Generation, RejectsBadInput) {
  EXPECT_THROW(GenerationDistribution::uniform(1.0, 0.5), InvalidArgument);
  EXPECT_THROW(GenerationDistribution::uniform(-0.1, 0.5), InvalidArgument);
  const auto g = GenerationDistribution::uniform(0.0, 1.0);
  EXPECT_THROW(truncated_mean(g, -1.0, 1.0), InvalidArgument);
  EXPECT_THROW(g.quantile(1.5), InvalidArgument);
}
