#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "solar/asymptotics.hpp"
#include "solar/errors.hpp"
#include "support/fixtures.hpp"

using namespace solar;
using solar::testing::desk;

namespace {

// lambda = 2 M1 / E[V~] with M1 = int v~(p) p dp, by integration by parts
double lambda_oracle(const PremiumDistribution& v) {
  const double m1 = solar::testing::simpson([&](double p) { return v.base_complementary_quantile(p) * p; }, 0.0, 1.0);
  const double m0 = solar::testing::simpson([&](double p) { return v.base_complementary_quantile(p); }, 0.0, 1.0);
  return 2.0 * m1 / m0;
}

}  // namespace

TEST(Expansion, DeskSlopes) {
  const auto s = desk();
  EXPECT_NEAR(prt_slope_at_zero(s), 0.2, 1e-9);
  EXPECT_NEAR(cb_slope_at_zero(s), 0.3, 1e-9);
  EXPECT_NEAR(beta_constant(s), 0.04, 1e-9);
  const auto e = expansion_coefficients(s);
  EXPECT_NEAR(e.c0, 2.0, 1e-8);
  ASSERT_TRUE(e.lambda && e.beta);
  EXPECT_NEAR(*e.lambda, 2.0 / 3.0, 1e-14);
  EXPECT_GE(e.cb_slope - e.prt_slope, *e.beta);
}

TEST(Expansion, SlopesUseUnscaledPremium) {
  EXPECT_NEAR(prt_slope_at_zero(desk(0.25)), 0.2, 1e-9);
  EXPECT_NEAR(cb_slope_at_zero(desk(0.0)), 0.3, 1e-9);
}

TEST(Expansion, FiniteDifferences) {
  const auto s = desk();
  for (double h : {1e-3, 1e-2}) {
    const double c0 = solve_ne(s.with_epsilon(0.0), Mechanism::prt).capacity;
    const double fd_prt = (solve_ne(s.with_epsilon(2 * h), Mechanism::prt).capacity - c0) / (2 * h);
    const double fd_cb = (solve_ne(s.with_epsilon(2 * h), Mechanism::cb).capacity -
                          solve_ne(s.with_epsilon(0.0), Mechanism::cb).capacity) /
                         (2 * h);
    EXPECT_NEAR(fd_prt, 0.2, 5 * h * 0.2);
    EXPECT_NEAR(fd_cb, 0.3, 5 * h * 0.3);
  }
}

TEST(Expansion, ZeroPremium) {
  auto s = desk();
  s.premium = PremiumDistribution::uniform(0.0);
  EXPECT_EQ(prt_slope_at_zero(s), 0.0);
  EXPECT_EQ(cb_slope_at_zero(s), 0.0);
  EXPECT_THROW(lambda_ratio(s.premium), InvalidArgument);
  const auto e = expansion_coefficients(s);
  EXPECT_FALSE(e.lambda);
  EXPECT_FALSE(e.beta);
}

TEST(Expansion, SingularDerivative) {
  // f(g) = 2(1 - g): the zero-premium capacity saturates where the density is 0
  auto s = desk();
  s.periods[0].generation = GenerationDistribution::tabulated({0.0, 1.0}, {2.0, 0.0});
  s.pi0 = s.periods[0].generation.mean();
  EXPECT_THROW(prt_slope_at_zero(s), SingularDerivative);
  EXPECT_THROW(cb_slope_at_zero(s), SingularDerivative);
}

TEST(Lambda, Uniform) {
  EXPECT_NEAR(lambda_ratio(PremiumDistribution::uniform(0.6)), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(lambda_ratio(PremiumDistribution::uniform(3.0, 0.1)), 2.0 / 3.0, 1e-14);
}

TEST(Lambda, TruncatedExponential) {
  for (double rate : {-6.0, 2.0, 15.0}) {
    const auto v = PremiumDistribution::truncated_exponential(rate, 0.5);
    const double l = lambda_ratio(v);
    EXPECT_NEAR(l, lambda_oracle(v), 1e-8) << rate;
    EXPECT_GT(l, 0.0);
    EXPECT_LT(l, 1.0);
    EXPECT_NEAR(lambda_ratio(v.with_epsilon(0.01)), l, 1e-14);
  }
}

TEST(Lambda, Empirical) {
  std::mt19937_64 rng(5);
  std::gamma_distribution<double> gamma(2.0, 0.05);
  std::vector<double> samples(300);
  for (auto& x : samples) {
    x = gamma(rng);
  }
  const auto v = PremiumDistribution::empirical(samples);
  EXPECT_NEAR(lambda_ratio(v), lambda_oracle(v), 1e-4);
}

TEST(Flatness, Uniform) {
  const auto f = flatness_fit(desk(), 2.0);
  ASSERT_EQ(f.periods.size(), 1u);
  EXPECT_NEAR(f.periods[0].r0, 1.0, 1e-15);
  EXPECT_EQ(f.periods[0].delta, 0.0);
  EXPECT_EQ(f.max_delta, 0.0);
  EXPECT_THROW(flatness_fit(desk(), 0.0), InvalidArgument);
}

TEST(Flatness, TabulatedGridScan) {
  auto s = desk();
  s.periods[0].generation = GenerationDistribution::tabulated({0.0, 1.0}, {2.0, 0.0});
  const auto f = flatness_fit(s, 2.0);
  // density 2(1 - g) on (0, 0.5]: max just under 2, min 1
  const double hi = 2.0 * (1.0 - 0.5 / 2000.0);
  EXPECT_NEAR(f.periods[0].r0, 0.5 * (hi + 1.0), 1e-12);
  EXPECT_NEAR(f.periods[0].delta, (hi - 1.0) / (hi + 1.0), 1e-12);
}

TEST(Flatness, PointMassExcluded) {
  auto s = desk();
  PeriodProfile night;
  night.name = "night";
  night.generation = GenerationDistribution::point_mass(0.0);
  s.periods.push_back(night);
  const auto f = flatness_fit(s, 2.0);
  ASSERT_EQ(f.periods.size(), 2u);
  EXPECT_TRUE(f.periods[1].excluded);
  EXPECT_EQ(f.max_delta, 0.0);
}

TEST(Ordering, DeskGrid) {
  const auto r = ordering_report(desk(), {0.0, 0.25, 0.5, 1.0});
  EXPECT_TRUE(r.passed);
  ASSERT_EQ(r.rows.size(), 4u);
  ASSERT_TRUE(r.rows[0].all_equal);
  EXPECT_TRUE(*r.rows[0].all_equal);
  for (const auto& row : r.rows) {
    EXPECT_TRUE(row.srt_le_prt);
    EXPECT_TRUE(row.prt_eq_opt);
    EXPECT_TRUE(row.prt_le_cb);
    EXPECT_FALSE(row.prt_le_cb_informational);
    ASSERT_TRUE(row.first_order_ok);
    EXPECT_TRUE(*row.first_order_ok);
  }
  ASSERT_TRUE(r.k_estimate);
  EXPECT_NEAR(r.rows[3].c_cb, solar::testing::desk_cb(1.0), 1e-10);
  EXPECT_NEAR(r.rows[0].c_cb, 2.0, 1e-8);
  EXPECT_THROW(ordering_report(desk(), {-0.1}), InvalidArgument);
}
