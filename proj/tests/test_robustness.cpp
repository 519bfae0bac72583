#include <gtest/gtest.h>

#include <random>

#include "support/naive.hpp"
#include "trashfuzz/stl/parser.hpp"
#include "trashfuzz/stl/robustness.hpp"

using namespace trashfuzz;
using namespace trashfuzz::stl;

namespace {

Trace speeds(std::initializer_list<double> v) {
  Trace tr({"speed"});
  for (double x : v) tr.push({x});
  return tr;
}

}  // namespace

TEST(Robustness, SpeedLimitExample) {
  Formula f = parse_spec("G(speed < 100)");
  Trace tr = speeds({0, 20, 45, 70, 90, 80});
  EXPECT_EQ(robustness(f, tr), 10.0);
  EXPECT_TRUE(satisfies(f, tr));
  EXPECT_FALSE(satisfies(f, speeds({0, 150, 20})));
}

TEST(Robustness, BoundaryIsViolation) {
  Trace tr = speeds({100});
  EXPECT_EQ(robustness(parse_spec("speed < 100"), tr), 0.0);
  EXPECT_FALSE(satisfies(parse_spec("speed < 100"), tr));
  EXPECT_FALSE(satisfies(parse_spec("0 >= 0"), tr));
}

TEST(Robustness, UntilHandEnumerated) {
  Trace tr({"a", "b"});
  for (auto [a, b] : {std::pair{1.0, -1.0}, {2.0, -1.0}, {-1.0, 3.0}, {5.0, 9.0}}) tr.push({a, b});
  // t1 = 0: min(b0, a0) = -1; t1 = 1: min(-1, 1) = -1; t1 = 2: min(3, min(1, 2, -1)) = -1.
  EXPECT_EQ(robustness(parse_spec("(a > 0) U[0,2] (b > 0)"), tr), -1.0);
  // Window [2,3] from t = 1: t1 = 2 gives min(3, min(2, -1)); t1 = 3 gives min(9, -1).
  EXPECT_EQ(robustness(parse_spec("(a > 0) U[1,2] (b > 0)"), tr, 1), -1.0);
  EXPECT_EQ(robustness(parse_spec("(a > 0) U[0,0] (b > 0)"), tr, 3), 5.0);
}

TEST(Robustness, EmptyWindowsAndNext) {
  Trace tr = speeds({1, 2});
  const double L = RobustnessOptions{}.large;
  EXPECT_EQ(robustness(parse_spec("G[5,9] speed > 0"), tr), L);
  EXPECT_EQ(robustness(parse_spec("F[5,9] speed > 0"), tr), -L);
  EXPECT_EQ(robustness(parse_spec("X speed > 0"), tr, 1), -L);
  EXPECT_EQ(robustness(parse_spec("X speed > 0"), tr, 0), 2.0);
}

TEST(Robustness, Errors) {
  Trace tr = speeds({1});
  EXPECT_THROW(robustness(parse_spec("accel > 0"), tr), UnknownSignal);
  EXPECT_THROW(robustness(parse_spec("speed > 0"), tr, 1), IndexOutOfRange);
}

TEST(Robustness, MatchesNaiveOracleSmallSample) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1500; ++i) {
    Formula f = tftest::random_formula(rng, 4);
    Trace tr = tftest::random_trace(rng);
    auto fast = robustness_series(f, tr);
    for (std::size_t t = 0; t < tr.length(); ++t) ASSERT_EQ(fast[t], tftest::naive_rho(f, tr, t)) << format(f);
  }
}

TEST(Trace, CsvAndJsonRoundTrip) {
  Trace tr({"x", "y"}, 0.2);
  tr.push({0.1, -3.25});
  tr.push({1e-7, 12345.678});
  EXPECT_EQ(trace_from_csv(to_csv(tr), 0.2), tr);
  EXPECT_EQ(trace_from_json(to_json(tr)), tr);
  EXPECT_THROW(trace_from_csv("x,y\n1,2\n"), SchemaError);
}

TEST(Trace, RejectsInconsistentScenes) {
  EXPECT_THROW(Trace::from_scenes({}), SchemaError);
  EXPECT_THROW(Trace::from_scenes({{{"a", 1}}, {{"b", 1}}}), SchemaError);
  Trace tr = Trace::from_scenes({{{"a", 1}, {"b", 2}}});
  EXPECT_EQ(tr.at("b", 0), 2.0);
}
