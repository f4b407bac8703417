#include "coarse/error.hpp"
#include "coarse/rational.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using coarse::Rational;

TEST(Rational, ParsesIntegersAndFractions) {
  EXPECT_EQ(coarse::parse_rational("3"), Rational(3));
  EXPECT_EQ(coarse::parse_rational("1/8"), coarse::make_rational(1, 8));
  EXPECT_EQ(coarse::parse_rational("-10/4"), coarse::make_rational(-5, 2));
  EXPECT_EQ(coarse::to_string(coarse::parse_rational("10/96")), "5/48");
  EXPECT_EQ(coarse::to_string(Rational(7)), "7");
}

TEST(Rational, RejectsMalformedText) {
  for (const char* bad : {"", "1/0", "0.125", "1/", "/2", "abc", "1 / 2"}) {
    EXPECT_THROW(coarse::parse_rational(bad), coarse::ConfigError) << bad;
  }
}

TEST(Rational, SquaresAndRoots) {
  EXPECT_TRUE(coarse::is_rational_square(coarse::make_rational(9, 4)));
  EXPECT_EQ(coarse::rational_sqrt(coarse::make_rational(9, 4)), coarse::make_rational(3, 2));
  EXPECT_FALSE(coarse::is_rational_square(Rational(2)));
  EXPECT_FALSE(coarse::is_rational_square(Rational(-4)));
}

TEST(Rational, ScaledSqrtComparisonMatchesFloatingPointAwayFromTies) {
  oracle::Rng rng(11);
  int checked = 0;
  for (int t = 0; t < 2000; ++t) {
    const auto c = coarse::make_rational(rng.uniform(-50, 50), rng.uniform(1, 9));
    const auto s = coarse::make_rational(rng.uniform(1, 60), rng.uniform(1, 9));
    const auto q = coarse::make_rational(rng.uniform(-50, 50), rng.uniform(1, 9));
    const double lhs = c.get_d() / std::sqrt(s.get_d());
    const double diff = lhs - q.get_d();
    const int got = coarse::compare_scaled_sqrt(c, s, q);
    if (std::abs(diff) > 1e-9) {
      EXPECT_EQ(got, diff > 0 ? 1 : -1);
      ++checked;
    }
  }
  EXPECT_GT(checked, 1900);
  // Exact tie: 3 / sqrt(9/4) = 2.
  EXPECT_EQ(coarse::compare_scaled_sqrt(Rational(3), coarse::make_rational(9, 4), Rational(2)), 0);
}
