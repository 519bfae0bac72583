#include <gtest/gtest.h>

#include <random>

#include "support/naive.hpp"
#include "trashfuzz/stl/desugar.hpp"
#include "trashfuzz/stl/negate.hpp"
#include "trashfuzz/stl/parser.hpp"

using namespace trashfuzz;
using namespace trashfuzz::stl;

namespace {

Formula mu(const std::string& s) { return Formula::prop(Proposition{LinearExpr::signal(s), Comparator::Greater}); }

}  // namespace

TEST(Parse, AlwaysSpeedLimit) {
  Formula f = parse_spec("G (speed < 100)");
  ASSERT_EQ(f.kind(), Kind::Always);
  EXPECT_TRUE(f.interval().is_default());
  const auto& p = f.lhs().proposition();
  EXPECT_EQ(p.cmp, Comparator::Less);
  EXPECT_EQ(p.expr, LinearExpr::signal("speed") - LinearExpr(100));
}

TEST(Parse, RedundantParenthesesDropped) {
  Formula f = parse_spec("(mu1)");
  EXPECT_EQ(f, mu("mu1"));
  EXPECT_EQ(parse_spec(format(f)), f);
}

TEST(Parse, UnclosedIntervalReportsPosition) {
  try {
    parse_spec("a U[0,5 b");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.column(), 9u);
    EXPECT_NE(std::find(e.expected().begin(), e.expected().end(), "]"), e.expected().end());
  }
}

TEST(Parse, MalformedInputs) {
  for (const char* bad : {"", "G", "a <", "(a > 1", "a and", "G[3,1] a", "F[1,x] a", "a > 1 b"})
    EXPECT_THROW(parse_spec(bad), SyntaxError) << bad;
}

TEST(Parse, PrecedenceAndAssociativity) {
  EXPECT_EQ(parse_spec("a or b and c"), Formula::disjunction(mu("a"), Formula::conjunction(mu("b"), mu("c"))));
  EXPECT_EQ(parse_spec("not a and b"), Formula::conjunction(Formula::negation(mu("a")), mu("b")));
  EXPECT_EQ(parse_spec("a U b U c"),
            Formula::until({}, Formula::until({}, mu("a"), mu("b")), mu("c")));
  EXPECT_EQ(parse_spec("F[2,5] X a"), Formula::eventually({2, 5}, Formula::next(mu("a"))));
}

TEST(Parse, LinearExpressions) {
  Formula f = parse_spec("2*x - y + 3 >= x");
  const auto& p = f.proposition();
  EXPECT_EQ(p.cmp, Comparator::GreaterEq);
  EXPECT_EQ(p.expr, LinearExpr::signal("x") - LinearExpr::signal("y") + LinearExpr(3));
}

TEST(Parse, LawPack) {
  auto laws = parse_law_pack("law a \"first\" { G(x < 1) }\nlaw b { F y }");
  ASSERT_EQ(laws.size(), 2u);
  EXPECT_EQ(laws[0].name, "a");
  EXPECT_EQ(laws[0].description, "first");
  EXPECT_EQ(laws[1].formula, Formula::eventually({}, mu("y")));
  EXPECT_THROW(parse_law_pack("law a { x } law a { y }"), SyntaxError);
  EXPECT_THROW(parse_law_pack("# only a comment\n"), SyntaxError);
}

TEST(Format, CanonicalForms) {
  EXPECT_EQ(format(parse_spec("G (speed < 100)")), "G (speed < 100)");
  EXPECT_EQ(format(Formula::conjunction(mu("mu1"), Formula::disjunction(mu("mu2"), mu("mu3")))),
            "(mu1) and ((mu2) or (mu3))");
  EXPECT_EQ(format(Formula::until({2, 7}, mu("mu1"), mu("mu2"))), "(mu1) U[2,7] (mu2)");
}

TEST(Format, RoundTripRandomFormulas) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    Formula f = tftest::random_formula(rng, 4);
    ASSERT_EQ(parse_spec(format(f)), f) << format(f);
  }
}

TEST(Desugar, EventuallyAndAlways) {
  EXPECT_EQ(desugar(Formula::eventually({0, 3}, mu("m"))), Formula::until({0, 3}, Formula::truth(), mu("m")));
  EXPECT_EQ(desugar(Formula::always({1, 4}, mu("m"))),
            Formula::negation(Formula::until({1, 4}, Formula::truth(), Formula::negation(mu("m")))));
  EXPECT_EQ(desugar(mu("m")), mu("m"));
}

TEST(Desugar, PreservesRobustness) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 2000; ++i) {
    Formula f = tftest::random_formula(rng, 4);
    Trace tr = tftest::random_trace(rng);
    for (std::size_t t = 0; t < tr.length(); ++t)
      ASSERT_EQ(tftest::naive_rho(desugar(f), tr, t), tftest::naive_rho(f, tr, t)) << format(f);
  }
}

TEST(Negate, Propositions) {
  auto p = parse_spec("speed < 100").proposition();
  EXPECT_EQ(negate_prop(p).cmp, Comparator::GreaterEq);
  EXPECT_EQ(negate_prop(parse_spec("x <= y").proposition()).cmp, Comparator::Greater);
  EXPECT_EQ(negate_prop(parse_spec("x == y").proposition()).cmp, Comparator::NotEqual);
  for (int c = 0; c < 6; ++c) {
    Proposition m{LinearExpr::signal("x"), static_cast<Comparator>(c)};
    EXPECT_EQ(negate_prop(negate_prop(m)), m);
  }
}

TEST(Negate, DoubleNegationAndNoNotNodes) {
  EXPECT_EQ(negate(Formula::negation(mu("a"))), mu("a"));
  std::function<bool(const Formula&)> has_not = [&](const Formula& f) {
    if (f.kind() == Kind::Not) return true;
    if (is_leaf(f.kind())) return false;
    return has_not(f.lhs()) || (is_binary(f.kind()) && has_not(f.rhs()));
  };
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) ASSERT_FALSE(has_not(negate(tftest::random_formula(rng, 4))));
}

TEST(Negate, UntilMatchesNegationOnCounterexampleTrace) {
  // One step with a violated and b satisfied: the until holds via b, so its
  // negation must be violated.
  Formula f = Formula::until({0, 2}, mu("a"), mu("b"));
  Trace tr({"a", "b"});
  tr.push({-1, 1});
  EXPECT_EQ(tftest::naive_rho(negate(f), tr, 0), -tftest::naive_rho(f, tr, 0));
}

TEST(Formula, DepthSizeSignals) {
  Formula f = parse_spec("G(a > 1 and F[0,3] (b + c < 2))");
  EXPECT_EQ(f.depth(), 4u);
  EXPECT_EQ(f.size(), 5u);
  EXPECT_EQ(signals_of(f), (std::vector<std::string>{"a", "b", "c"}));
}
