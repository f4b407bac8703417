#include "coarse/actions.hpp"
#include "coarse/error.hpp"
#include "coarse/spaces.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <memory>

namespace {

coarse::ScenarioPtr scenario(const std::string& group, const std::string& space, const std::string& action,
                             const std::string& base = "0") {
  return coarse::make_scenario({group, space, action, base, {}});
}

}  // namespace

TEST(Actions, DihedralProperWithStabilizerOfOrderTwo) {
  const auto s = scenario("DInfinity", "Z-window:40", "dihedral-on-Z");
  const auto p = coarse::check_properness(*s, 10);
  ASSERT_TRUE(p.certified);
  ASSERT_EQ(p.stabilizer.size(), 2u);
  EXPECT_EQ(s->group->format(p.stabilizer[0]), "e");
  EXPECT_EQ(s->group->format(p.stabilizer[1]), "r");
  EXPECT_FALSE(p.free_action);
  // N(r) = #{g : |g.0| <= r} = 2(2r+1).
  for (std::int64_t r = 0; r <= 10; ++r) EXPECT_EQ(p.counts[static_cast<std::size_t>(r)], 2u * (2 * r + 1));
}

TEST(Actions, TranslationIsFree) {
  const auto s = scenario("Z", "Z-window:30", "translation");
  const auto p = coarse::check_properness(*s, 5);
  ASSERT_TRUE(p.certified);
  EXPECT_TRUE(p.free_action);
  EXPECT_EQ(p.counts.back(), 11u);
}

TEST(Actions, PropernessRadiusBeyondDepthIsAResourceError) {
  const auto s = scenario("Z", "Z-window:5", "translation");
  EXPECT_THROW(coarse::check_properness(*s, 6), coarse::ResourceError);
}

TEST(Actions, CocompactnessRadii) {
  EXPECT_EQ(coarse::check_cocompactness(*scenario("DInfinity", "Z-window:20", "dihedral-on-Z")).radius, 0);
  const auto by2 = coarse::check_cocompactness(*scenario("Z", "Z-window:20", "translation-by-2"));
  EXPECT_TRUE(by2.cocompact);
  EXPECT_EQ(by2.radius, 1);
  EXPECT_FALSE(coarse::check_cocompactness(*scenario("Z", "ZZ-window:10", "translation-one-copy", "a:0")).cocompact);
  EXPECT_TRUE(coarse::check_cocompactness(*scenario("Zd:2", "Z2-window:4", "translation", "(0,0)")).cocompact);
}

TEST(Actions, ActionAxiomsHoldOnSamples) {
  for (const auto& s : {scenario("DInfinity", "Z-window:15", "dihedral-on-Z"),
                        scenario("Z", "Z-window:15", "translation-by-2"),
                        scenario("Cyclic:6", "cycle:6", "rotation"),
                        scenario("Symmetric:4", "points:4", "natural", "1")}) {
    const auto sample = coarse::enumerate_ball(s->group, 3).elements;
    EXPECT_FALSE(coarse::check_action_axioms(*s, sample).has_value()) << s->action;
  }
}

TEST(Actions, OrbitOfTranslationByTwoIsTheEvens) {
  const auto s = scenario("Z", "Z-window:10", "translation-by-2");
  const auto orbit = coarse::compute_orbit(*s);
  EXPECT_EQ(orbit.points.size(), 11u);
  for (auto p : orbit.points) EXPECT_EQ(coarse::integer_point(s->space->point(p)) % 2, 0);
}

TEST(Actions, SectionPoliciesOnDihedral) {
  const auto s = scenario("DInfinity", "Z-window:12", "dihedral-on-Z");
  const auto& g = *s->group;
  const auto minsec = coarse::build_section(s, coarse::SectionPolicy::min_length_then_lex);
  const auto maxsec = coarse::build_section(s, coarse::SectionPolicy::max_length_then_lex);
  for (std::size_t k = 0; k < minsec.size(); ++k) {
    const auto n = coarse::integer_point(minsec.orbit_window()->point(k));
    const std::string tn = n == 0 ? "e" : "t^" + std::to_string(n);
    EXPECT_EQ(g.format(minsec.phi(k)), tn);
    const std::string tnr = n == 0 ? "r" : "t^" + std::to_string(n) + " r";
    EXPECT_EQ(g.format(maxsec.phi(k)), tnr);
    EXPECT_EQ(*s->act(minsec.phi(k), s->basepoint), minsec.space_index(k));
    EXPECT_EQ(*s->act(maxsec.phi(k), s->basepoint), maxsec.space_index(k));
  }
}

TEST(Actions, PartialActionMatchesBruteForce) {
  for (auto policy : {coarse::SectionPolicy::min_length_then_lex, coarse::SectionPolicy::max_length_then_lex}) {
    const auto s = scenario("DInfinity", "Z-window:9", "dihedral-on-Z");
    const auto sec = coarse::build_section(s, policy);
    const auto& g = sec.group();
    for (const auto& elem : coarse::enumerate_ball(s->group, 4).elements) {
      const auto pa = coarse::partial_action(sec, elem);
      std::map<std::size_t, std::size_t> got;
      for (const auto& [x, y] : pa.translation.pairs) got[y] = x;
      for (std::size_t y = 0; y < sec.size(); ++y) {
        const auto expect = oracle::partial_action_brute(g, sec.phis(), elem, y);
        if (expect) {
          ASSERT_TRUE(got.count(y)) << g.format(elem);
          EXPECT_EQ(got[y], *expect);
        } else {
          EXPECT_FALSE(got.count(y)) << g.format(elem);
        }
      }
      EXPECT_TRUE(pa.displacement_constant);
      EXPECT_EQ(pa.displacement, g.word_length(elem));
    }
  }
}

TEST(Actions, ERSetOfDihedralIsIntegerShifts) {
  const auto s = scenario("DInfinity", "Z-window:30", "dihedral-on-Z");
  const auto sec = coarse::build_section(s, coarse::SectionPolicy::min_length_then_lex);
  const auto er = coarse::compute_E_R(sec, 4);
  ASSERT_EQ(er.elements.size(), 9u);
  for (const auto& w : er.elements) EXPECT_EQ(w.g.word.back(), 0) << sec.group().format(w.g);
  EXPECT_EQ(er.ball_radius, 4);
  const auto maxsec = coarse::build_section(s, coarse::SectionPolicy::max_length_then_lex);
  EXPECT_EQ(coarse::compute_E_R(maxsec, 4).elements.size(), 9u);
}

TEST(Actions, InverseControlOfTheSection) {
  const auto s = scenario("Z", "Z-window:20", "translation-by-2");
  const auto sec = coarse::build_section(s, coarse::SectionPolicy::min_length_then_lex);
  const auto table = coarse::inverse_control(sec, 5);
  for (std::size_t r = 0; r < table.size(); ++r) EXPECT_EQ(table[r], 2 * static_cast<std::int64_t>(r));
}

TEST(Actions, SymmetricSectionIsInjectiveOnAFiniteOrbit) {
  const auto s = scenario("Symmetric:4", "points:4", "natural", "1");
  const auto sec = coarse::build_section(s, coarse::SectionPolicy::min_length_then_lex);
  EXPECT_EQ(sec.size(), 4u);
  std::set<coarse::Element> seen(sec.phis().begin(), sec.phis().end());
  EXPECT_EQ(seen.size(), 4u);
}

TEST(Actions, UnknownActionsAndMismatchesAreConfigErrors) {
  EXPECT_THROW(scenario("Z", "Z-window:5", "spin"), coarse::ConfigError);
  EXPECT_THROW(scenario("Free:2", "Z-window:5", "dihedral-on-Z"), coarse::ConfigError);
  EXPECT_THROW(scenario("Z", "Z-window:5", "translation", "99"), coarse::ConfigError);
  EXPECT_THROW(coarse::parse_section_policy("random"), coarse::ConfigError);
}
