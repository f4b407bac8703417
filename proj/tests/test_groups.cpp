#include "coarse/error.hpp"
#include "coarse/groups.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace {

const std::vector<std::string> kFamilies = {"Z",        "Zd:2",      "Zd:3",        "Free:1",     "Free:2",
                                            "Free:3",   "DInfinity", "Cyclic:5",    "Cyclic:8",   "Symmetric:3",
                                            "Symmetric:4"};

}  // namespace

TEST(Groups, BallEnumerationMatchesBfsOracleForAllFamilies) {
  for (const auto& spec : kFamilies) {
    const auto g = coarse::make_group(spec);
    for (std::int64_t r = 0; r <= 6; ++r) {
      const auto bfs = oracle::bfs_ball(*g, r);
      const auto ball = coarse::enumerate_ball(g, r);
      ASSERT_EQ(ball.elements.size(), bfs.size()) << spec << " R=" << r;
      EXPECT_EQ(g->predicted_ball_size(r), bfs.size()) << spec << " R=" << r;
      for (const auto& e : ball.elements) {
        const auto it = bfs.find(e);
        ASSERT_NE(it, bfs.end()) << spec << " " << g->format(e);
        EXPECT_EQ(g->word_length(e), it->second) << spec << " " << g->format(e);
      }
    }
  }
}

TEST(Groups, KnownBallSizes) {
  EXPECT_EQ(coarse::enumerate_ball(coarse::make_group("Zd:2"), 2).elements.size(), 13u);
  EXPECT_EQ(coarse::enumerate_ball(coarse::make_group("Free:2"), 2).elements.size(), 17u);
  EXPECT_EQ(coarse::enumerate_ball(coarse::make_group("DInfinity"), 3).elements.size(), 12u);
  EXPECT_EQ(coarse::enumerate_ball(coarse::make_group("Symmetric:3"), 3).elements.size(), 6u);
}

TEST(Groups, BallsAreShortlexOrdered) {
  for (const auto& spec : kFamilies) {
    const auto g = coarse::make_group(spec);
    const auto b = coarse::enumerate_ball(g, 3);
    EXPECT_TRUE(std::is_sorted(b.elements.begin(), b.elements.end(),
                               [&](const auto& x, const auto& y) { return coarse::shortlex_less(*g, x, y); }))
        << spec;
    EXPECT_EQ(b.elements.front(), g->identity());
  }
}

TEST(Groups, GroupAxiomsOnRandomElements) {
  oracle::Rng rng(5);
  for (const auto& spec : kFamilies) {
    const auto g = coarse::make_group(spec);
    const auto pool = coarse::enumerate_ball(g, 4).elements;
    const auto pick = [&] { return pool[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(pool.size()) - 1))]; };
    for (int t = 0; t < 200; ++t) {
      const auto a = pick(), b = pick(), c = pick();
      EXPECT_EQ(g->multiply(g->multiply(a, b), c), g->multiply(a, g->multiply(b, c))) << spec;
      EXPECT_EQ(g->multiply(a, g->invert(a)), g->identity()) << spec;
      EXPECT_EQ(g->multiply(g->identity(), a), a) << spec;
      EXPECT_EQ(g->word_length(g->invert(a)), g->word_length(a)) << spec;
      EXPECT_LE(g->word_length(g->multiply(a, b)), g->word_length(a) + g->word_length(b)) << spec;
      EXPECT_EQ(g->parse(g->format(a)), a) << spec << " " << g->format(a);
      EXPECT_NO_THROW(g->validate(a));
    }
  }
}

TEST(Groups, DihedralNormalFormsAndLengths) {
  const auto g = coarse::make_group("DInfinity");
  const auto t = g->parse("t^1");
  const auto r = g->parse("r");
  EXPECT_EQ(g->format(g->identity()), "e");
  EXPECT_EQ(g->multiply(r, r), g->identity());
  // r t r = t^-1
  EXPECT_EQ(g->multiply(g->multiply(r, t), r), g->invert(t));
  EXPECT_EQ(g->word_length(g->parse("t^3 r")), 4);
  EXPECT_EQ(g->word_length(g->parse("t^-2")), 2);
  EXPECT_EQ(g->generators().size(), 3u);
}

TEST(Groups, FreeGroupWordsReduce) {
  const auto g = coarse::make_group("Free:2");
  const auto w = g->parse("a b^-1");
  EXPECT_EQ(g->word_length(w), 2);
  EXPECT_EQ(g->multiply(w, g->parse("b")), g->parse("a"));
  EXPECT_EQ(g->format(g->multiply(w, g->invert(w))), g->format(g->identity()));
}

TEST(Groups, SymmetricLengthIsInversionCount) {
  const auto g = coarse::make_group("Symmetric:4");
  EXPECT_EQ(g->word_length(g->parse("[3,2,1,0]")), 6);
  EXPECT_EQ(g->word_length(g->parse("[1,0,2,3]")), 1);
  EXPECT_EQ(coarse::enumerate_ball(g, 6).elements.size(), 24u);
}

TEST(Groups, ValidationRejectsNonNormalForms) {
  const auto z2 = coarse::make_group("Zd:2");
  EXPECT_THROW(z2->validate(coarse::Element{{1, 2, 3}}), coarse::DomainError);
  const auto f = coarse::make_group("Free:2");
  EXPECT_THROW(f->validate(coarse::Element{{1, -1}}), coarse::DomainError);
  EXPECT_THROW(f->validate(coarse::Element{{3}}), coarse::DomainError);
  const auto d = coarse::make_group("DInfinity");
  EXPECT_THROW(d->validate(coarse::Element{{1, 2}}), coarse::DomainError);
  const auto s = coarse::make_group("Symmetric:3");
  EXPECT_THROW(s->validate(coarse::Element{{0, 0, 1}}), coarse::DomainError);
  EXPECT_THROW(coarse::word_length_of(*s, coarse::Element{{0, 1}}), coarse::DomainError);
}

TEST(Groups, UnknownSpecsAreConfigErrors) {
  for (const char* bad : {"Q", "Zd:0", "Free:", "Cyclic:0", "Symmetric:x"}) {
    EXPECT_THROW(coarse::make_group(bad), coarse::ConfigError) << bad;
  }
}

TEST(Groups, BallCapRaisesResourceError) {
  const auto g = coarse::make_group("Free:3");
  EXPECT_THROW(coarse::enumerate_ball(g, 12, 1000), coarse::ResourceError);
}

TEST(Groups, GroupWindowIsTheWordMetric) {
  const auto g = coarse::make_group("Free:2");
  const auto w = coarse::group_window(g, 2);
  EXPECT_EQ(w.size(), 17u);
  EXPECT_EQ(oracle::metric_violation(w.size(), w.dist_matrix()), "");
  EXPECT_EQ(w.depth(w.index_of(g->format(g->identity()))), 2);
}
