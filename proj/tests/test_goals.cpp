#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>

#include "support/naive.hpp"
#include "trashfuzz/goals.hpp"
#include "trashfuzz/manifest.hpp"

using namespace trashfuzz;
using namespace trashfuzz::stl;

namespace {

std::multiset<std::string> formulas(const GoalSet& g) {
  std::multiset<std::string> out;
  for (const auto& x : g.goals) out.insert(format(x.formula));
  return out;
}

}  // namespace

TEST(Goals, AlwaysOfConjunctionSplits) {
  auto g = decompose(parse_spec("G(mu1 and mu2)"));
  EXPECT_EQ(formulas(g), (std::multiset<std::string>{format(parse_spec("G mu1")), format(parse_spec("G mu2"))}));
  EXPECT_EQ(goal_count(parse_spec("G(mu1 and mu2)")), 2u);
}

TEST(Goals, PropositionIsItsOwnGoal) {
  auto g = decompose(parse_spec("mu"));
  ASSERT_EQ(g.goals.size(), 1u);
  EXPECT_EQ(g.goals[0].formula, parse_spec("mu"));
  EXPECT_EQ(goal_count(parse_spec("mu")), 1u);
}

TEST(Goals, UntilOfConjunctionsCrossProduct) {
  auto g = decompose(parse_spec("(m1 and m2) U (m3 and m4)"));
  std::multiset<std::string> want;
  for (const char* l : {"m1", "m2"})
    for (const char* r : {"m3", "m4"})
      want.insert(format(Formula::until({}, parse_spec(l), parse_spec(r))));
  EXPECT_EQ(formulas(g), want);
}

TEST(Goals, IdsUniqueAndStable) {
  Formula f = parse_spec("G((a > 1 or b > 2) and F[0,4] (c < 1 and a < 3))");
  auto g1 = decompose(f, "law"), g2 = decompose(f, "law");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < g1.goals.size(); ++i) {
    EXPECT_EQ(g1.goals[i].id, g2.goals[i].id);
    EXPECT_TRUE(ids.insert(g1.goals[i].id).second);
    EXPECT_EQ(g1.goals[i].id.rfind("law/", 0), 0u);
  }
  EXPECT_EQ(g1.goals.size(), goal_count(f));
}

TEST(Goals, CapRaisesGoalExplosion) {
  std::string src = "a1 or a2";
  for (int i = 3; i <= 15; ++i) src = "(" + src + ") or (b" + std::to_string(i) + " and c" + std::to_string(i) + ")";
  Formula f = parse_spec(src);
  EXPECT_GT(goal_count(f), 4096u);
  EXPECT_THROW(decompose(f), GoalExplosion);
  EXPECT_NO_THROW(decompose(parse_spec("a and b"), "x", 2));
  EXPECT_THROW(decompose(parse_spec("a and b and c"), "x", 2), GoalExplosion);
}

TEST(Goals, CountMatchesDecomposeOnRandomFormulas) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 500; ++i) {
    Formula f = tftest::random_formula(rng, 4);
    ASSERT_EQ(decompose(f).goals.size(), goal_count(f)) << format(f);
  }
}

TEST(Goals, ViolatingAGoalViolatesTheFormula) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 1000; ++i) {
    Formula f = tftest::random_formula(rng, 4);
    Trace tr = tftest::random_trace(rng);
    double rf = tftest::naive_rho(f, tr, 0);
    for (const auto& g : decompose(f).goals)
      if (tftest::naive_rho(g.formula, tr, 0) <= 0.0) ASSERT_LE(rf, 0.0) << format(f) << " / " << format(g.formula);
  }
}

TEST(Goals, DemoPackTotals) {
  LawPack pack = load_law_pack(fs::path(TF_DATA_DIR) / "laws.tfl");
  EXPECT_EQ(pack.laws.size(), 4u);
  std::uint64_t total = 0;
  for (const auto& l : pack.laws) total += goal_count(l.formula);
  EXPECT_EQ(pack.goals().size(), total);
  EXPECT_EQ(total, 7u);
}
