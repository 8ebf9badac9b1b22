#include <gtest/gtest.h>

#include "solar/equilibrium.hpp"
#include "solar/errors.hpp"
#include "solar/market_clearing.hpp"
#include "support/fixtures.hpp"

using namespace solar;
using solar::testing::desk;

TEST(VerifyCe, DeskPassesAtEquilibrium) {
  const auto s = desk();
  for (Mechanism m : {Mechanism::srt, Mechanism::prt, Mechanism::cb}) {
    const double c = solve_ne(s, m).capacity;
    const auto r = verify_ce(s, m, c);
    EXPECT_TRUE(r.passed) << to_string(m) << " " << r.max_violation;
    EXPECT_LE(r.max_violation, 1e-6);
  }
}

TEST(VerifyCe, SamplesSplitIntoRegimes) {
  const auto s = desk();
  const auto r = verify_ce(s, Mechanism::prt, 2.19);
  EXPECT_EQ(r.samples, 1000u);
  EXPECT_EQ(r.limited_samples + r.abundant_samples, 1000u);
  EXPECT_GT(r.limited_samples, 300u);
  EXPECT_GT(r.abundant_samples, 300u);
}

TEST(VerifyCe, PerturbedPriceFails) {
  const auto s = desk();
  VerifyOptions o;
  o.price_perturbation = 0.01;
  for (Mechanism m : {Mechanism::srt, Mechanism::prt, Mechanism::cb}) {
    const double c = solve_ne(s, m).capacity;
    EXPECT_FALSE(verify_ce(s, m, c, o).passed) << to_string(m);
  }
}

TEST(VerifyCe, Deterministic) {
  const auto s = desk();
  const auto a = verify_ce(s, Mechanism::prt, 2.0);
  const auto b = verify_ce(s, Mechanism::prt, 2.0);
  EXPECT_EQ(a.limited_samples, b.limited_samples);
  EXPECT_EQ(a.max_violation, b.max_violation);
}

TEST(VerifyCe, RejectsBadInput) {
  const auto s = desk();
  EXPECT_THROW(verify_ce(s, Mechanism::opt, 2.0), InvalidArgument);
  VerifyOptions o;
  o.samples = 0;
  EXPECT_THROW(verify_ce(s, Mechanism::prt, 2.0, o), InvalidArgument);
  EXPECT_THROW(verify_ce(s, Mechanism::prt, -2.0), InvalidArgument);
}
