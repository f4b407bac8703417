#include "coarse/error.hpp"
#include "coarse/property_a.hpp"
#include "coarse/spaces.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <memory>
#include <set>

namespace {

coarse::WindowPtr zwin(std::int64_t n) { return std::make_shared<const coarse::MetricWindow>(coarse::z_window(n)); }

using Set = std::set<std::pair<std::size_t, std::int64_t>>;

Set as_set(const std::vector<std::pair<std::size_t, std::int64_t>>& v) { return {v.begin(), v.end()}; }

coarse::WitnessFamily random_witness(const coarse::WindowPtr& w, std::int64_t s, oracle::Rng& rng) {
  coarse::WitnessFamily f{w, {}, s};
  f.sets.resize(w->size());
  for (std::size_t x = 0; x < w->size(); ++x) {
    Set a;
    for (std::size_t p = 0; p < w->size(); ++p) {
      if (w->dist(x, p) > s) continue;
      for (std::int64_t tag = 1; tag <= 2; ++tag)
        if (rng.coin()) a.emplace(p, tag);
    }
    if (a.empty()) a.emplace(x, 1);
    f.sets[x].assign(a.begin(), a.end());
  }
  return f;
}

}  // namespace

TEST(PropertyA, BallWitnessRatioIsTenOverNinetySix) {
  const auto w = zwin(400);
  const auto f = coarse::ball_witness(w, 50);
  const auto pass = coarse::check_witness(f, 5, coarse::make_rational(1, 8), 50);
  EXPECT_TRUE(pass.pass);
  ASSERT_TRUE(pass.worst_ratio.has_value());
  EXPECT_EQ(*pass.worst_ratio, coarse::make_rational(10, 96));
  const auto fail = coarse::check_witness(f, 5, coarse::make_rational(1, 10), 50);
  EXPECT_FALSE(fail.pass);
  ASSERT_TRUE(fail.worst_pair.has_value());
  EXPECT_EQ(w->dist(fail.worst_pair->first, fail.worst_pair->second), 5);
}

TEST(PropertyA, WitnessRatiosMatchSetOracle) {
  oracle::Rng rng(17);
  const auto w = zwin(12);
  for (int t = 0; t < 20; ++t) {
    const auto f = random_witness(w, 2, rng);
    const auto radius = rng.uniform(0, 3);
    coarse::Rational worst = 0;
    bool infinite = false;
    for (auto x : w->interior(2))
      for (auto y : w->interior(2)) {
        if (w->dist(x, y) > radius) continue;
        const auto [delta, cap] = oracle::delta_and_cap(as_set(f.sets[x]), as_set(f.sets[y]));
        if (cap == 0) {
          infinite = true;
        } else {
          worst = std::max(worst, coarse::make_rational(static_cast<std::int64_t>(delta), static_cast<std::int64_t>(cap)));
        }
      }
    const auto v = coarse::check_witness(f, radius, coarse::Rational(1000), 2);
    if (infinite) {
      EXPECT_FALSE(v.worst_ratio.has_value());
      EXPECT_FALSE(v.pass);
    } else {
      ASSERT_TRUE(v.worst_ratio.has_value());
      EXPECT_EQ(*v.worst_ratio, worst);
    }
  }
}

TEST(PropertyA, StrictAndInclusiveQuantifiersDifferAtDistanceR) {
  const auto w = zwin(60);
  const auto f = coarse::ball_witness(w, 10);
  // At d = R = 2 the ratio is 4/19; at d = 1 it is 2/20.
  const auto eps = coarse::make_rational(1, 5);
  EXPECT_FALSE(coarse::check_witness(f, 2, eps, 10, coarse::DistanceBound::inclusive).pass);
  EXPECT_TRUE(coarse::check_witness(f, 2, eps, 10, coarse::DistanceBound::strict).pass);
}

TEST(PropertyA, SingletonWitnessHasInfiniteRatio) {
  const auto w = zwin(20);
  const auto v = coarse::check_witness(coarse::singleton_witness(w), 2, coarse::Rational(1));
  EXPECT_FALSE(v.pass);
  EXPECT_FALSE(v.worst_ratio.has_value());
  EXPECT_TRUE(coarse::check_witness(coarse::singleton_witness(w), 0, coarse::Rational(1)).pass);
}

TEST(PropertyA, WitnessValidation) {
  const auto w = zwin(3);
  auto f = coarse::ball_witness(w, 1);
  EXPECT_NO_THROW(coarse::validate_witness(f));
  f.sets[0].clear();
  EXPECT_THROW(coarse::validate_witness(f), coarse::DomainError);
  f = coarse::ball_witness(w, 1);
  f.support_bound = 0;
  EXPECT_THROW(coarse::validate_witness(f), coarse::DomainError);
}

TEST(PropertyA, WitnessKernelIsPositiveWithSupportTwiceS) {
  oracle::Rng rng(31);
  const auto w = zwin(15);
  for (int t = 0; t < 10; ++t) {
    const auto f = random_witness(w, 2, rng);
    const auto u = coarse::witness_to_kernel(f);
    const auto psd = coarse::check_psd(u);
    EXPECT_TRUE(psd.pass);
    ASSERT_TRUE(psd.exact_psd.has_value());
    EXPECT_TRUE(*psd.exact_psd);
    EXPECT_TRUE(coarse::check_support(u, 4).pass);
    for (std::size_t x = 0; x < w->size(); ++x) EXPECT_EQ(u.rational_value(x, x), coarse::Rational(1));
  }
}

TEST(PropertyA, TriangularKernelVariationIsExact) {
  const auto w = zwin(200);
  const auto u = coarse::kernel_from_descriptor(w, "triangular:50");
  EXPECT_EQ(u.rational_value(w->index_of("0"), w->index_of("40")), coarse::make_rational(61, 101));
  const auto v = coarse::check_variation(u, 10, coarse::make_rational(1, 8));
  EXPECT_TRUE(v.pass);
  ASSERT_TRUE(v.worst_exact.has_value());
  EXPECT_EQ(*v.worst_exact, coarse::make_rational(10, 101));
  EXPECT_FALSE(coarse::check_variation(u, 10, coarse::make_rational(1, 11)).pass);
  const auto s = coarse::check_support(u, 100);
  EXPECT_TRUE(s.pass);
  EXPECT_EQ(s.max_nonzero_distance, 100);
  EXPECT_FALSE(coarse::check_support(u, 99).pass);
}

TEST(PropertyA, GaussianKernelIsFloatingPoint) {
  const auto w = zwin(20);
  const auto u = coarse::kernel_from_descriptor(w, "gaussian:3");
  EXPECT_FALSE(u.is_exact());
  EXPECT_TRUE(coarse::check_psd(u).pass);
  EXPECT_THROW(coarse::kernel_from_descriptor(w, "gaussian:-1"), coarse::ConfigError);
  EXPECT_THROW(coarse::kernel_from_descriptor(w, "box:3"), coarse::ConfigError);
}

TEST(PropertyA, NonPositiveKernelIsRejected) {
  const auto w = std::make_shared<const coarse::MetricWindow>(coarse::discrete_points(3));
  coarse::RationalMatrix m(3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m(i, j) = i == j ? 1 : -1;
  const auto u = coarse::Kernel::rational(w, m, std::nullopt, "signed");
  const auto v = coarse::check_psd(u);
  EXPECT_FALSE(v.pass);
  EXPECT_NEAR(v.lambda_min, -1.0, 1e-12);
}

TEST(PropertyA, LadderFindsTheSmallestTriangularParameter) {
  const auto w = zwin(400);
  const std::vector<coarse::ScheduleEntry> schedule = {
      {5, coarse::make_rational(1, 4)}, {10, coarse::make_rational(1, 4)}, {10, coarse::make_rational(1, 10)}};
  const auto rep = coarse::property_a_report(w, schedule, coarse::Ladder{});
  ASSERT_EQ(rep.entries.size(), 3u);
  const std::int64_t expected[] = {11, 21, 51};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(rep.entries[i].satisfied);
    EXPECT_EQ(rep.entries[i].parameter, expected[i]);
    EXPECT_EQ(rep.entries[i].support, 2 * expected[i]);
  }
}

TEST(PropertyA, SingletonLadderFailsAtPositiveRadius) {
  const auto w = zwin(30);
  coarse::Ladder l;
  l.family = coarse::LadderFamily::singleton_witness;
  const auto rep = coarse::property_a_report(w, {{2, coarse::Rational(1)}}, l);
  EXPECT_FALSE(rep.entries[0].satisfied);
}
