#include <gtest/gtest.h>

#include <atomic>

#include "trashfuzz/fuzzer.hpp"
#include "trashfuzz/manifest.hpp"
#include "trashfuzz/stl/robustness.hpp"
#include "trashfuzz/toy_sim.hpp"

using namespace trashfuzz;

namespace {

const Library& lib() {
  static Library l = default_library();
  return l;
}

const MapModel& demo_map() {
  static MapModel m = map_from_json(read_json(fs::path(TF_DATA_DIR) / "demo_map.json"));
  return m;
}

const std::vector<ViolationGoal>& goals() {
  static auto g = load_law_pack(fs::path(TF_DATA_DIR) / "laws.tfl").goals();
  return g;
}

SutInterface toy() { return toy_sim_sut(demo_map(), lib(), default_toy_sim_config()); }

CampaignConfig small(Engine e, std::size_t m = 120) {
  CampaignConfig c;
  c.engine = e;
  c.max_queries = m;
  c.n_objects = 4;
  c.seed = 3;
  return c;
}

}  // namespace

TEST(Gradient, FiniteDifference) {
  EXPECT_DOUBLE_EQ(gradient(2.0, 4.0, 1.0, 5.0, Dimension::Forward), 2.0);
  EXPECT_DOUBLE_EQ(gradient(0.0, 3.0, 1.0, 5.0, Dimension::Type), -4.0);
  EXPECT_THROW(gradient(1.0, 1.0, 0.0, 1.0, Dimension::Right), ZeroDelta);
  EXPECT_THROW(gradient(1.0, 1.0, 0.0, 1.0, Dimension::Type), ZeroDelta);

  EncodedScenario a, b;
  a.rows = {{1, 2, 3, 0}, {4, 5, 6, 1}};
  b = a;
  EXPECT_THROW(gradient(a, b, 0, 1), ZeroDelta);
  b.rows[1][2] = 16;
  EXPECT_DOUBLE_EQ(gradient(a, b, 3.0, 1.0), 2.0 / -10.0);
  EXPECT_EQ(differing_cell(a, b), (CellRef{1, Dimension::Rotation}));
  b.rows[0][0] = 0;
  EXPECT_THROW(gradient(a, b, 0, 1), InvalidScenario);
}

TEST(Seed, StartsEmpty) {
  Seed s;
  EXPECT_EQ(s.gradient, 0.0);
  EXPECT_FALSE(s.element.has_value());
}

TEST(Campaign, ZeroBudgetIsEmpty) {
  for (Engine e : {Engine::TrashFuzz, Engine::Genetic, Engine::Random}) {
    auto r = run_campaign(goals(), small(e, 0), toy(), demo_map(), lib());
    EXPECT_EQ(r.queries, 0u);
    EXPECT_EQ(r.covered_count(), 0u);
    EXPECT_EQ(r.goals.size(), goals().size());
  }
}

TEST(Campaign, DeterministicAndWithinBudget) {
  for (Engine e : {Engine::TrashFuzz, Engine::Genetic, Engine::Random}) {
    auto cfg = small(e);
    auto a = run_campaign(goals(), cfg, toy(), demo_map(), lib());
    auto b = run_campaign(goals(), cfg, toy(), demo_map(), lib());
    EXPECT_LE(a.queries, cfg.max_queries) << to_string(e);
    EXPECT_EQ(a.query_log.size(), a.queries);
    EXPECT_EQ(to_json(a, cfg).dump(), to_json(b, cfg).dump()) << to_string(e);
  }
}

TEST(Campaign, WorkerCountDoesNotChangeResults) {
  for (Engine e : {Engine::TrashFuzz, Engine::Genetic, Engine::Random}) {
    auto c1 = small(e), c4 = small(e);
    c4.workers = 4;
    auto a = run_campaign(goals(), c1, toy(), demo_map(), lib());
    auto b = run_campaign(goals(), c4, toy(), demo_map(), lib());
    EXPECT_EQ(to_json(a, c1).dump(), to_json(b, c1).dump()) << to_string(e);
  }
}

TEST(Campaign, WitnessesReplayAndAreCompliant) {
  auto cfg = small(Engine::Random, 300);
  cfg.n_objects = 7;
  auto r = run_campaign(goals(), cfg, toy(), demo_map(), lib());
  for (const auto& [id, w] : r.covered) {
    EXPECT_LE(w.robustness, 0.0);
    EXPECT_TRUE(check_rules(w.scenario, demo_map(), lib()).valid());
    auto tr = run_sut(w.scenario, toy());
    const ViolationGoal* g = nullptr;
    for (const auto& x : r.goals)
      if (x.id == id) g = &x;
    ASSERT_NE(g, nullptr);
    EXPECT_LE(stl::robustness(g->formula, tr), 0.0) << id;
  }
}

TEST(Campaign, SutFailureAbortsWithPartialResult) {
  auto base = toy();
  auto calls = std::make_shared<std::atomic<int>>(0);
  SutInterface flaky = base;
  flaky.parallel_safe = false;
  flaky.run = [base, calls](const Scenario& s) {
    if (++*calls > 10) throw SutFailure("simulated crash");
    return base.run(s);
  };
  auto r = run_campaign(goals(), small(Engine::TrashFuzz), flaky, demo_map(), lib());
  EXPECT_TRUE(r.aborted);
  EXPECT_FALSE(r.abort_reason.empty());
  EXPECT_EQ(r.queries, 10u);
}

TEST(Campaign, ConfigJsonRoundTrip) {
  CampaignConfig c = small(Engine::Genetic, 77);
  c.ga.population = 12;
  c.restart_after = 9;
  auto j = to_json(c);
  EXPECT_EQ(to_json(campaign_config_from_json(j)), j);
  j["engine"] = "annealing";
  EXPECT_ANY_THROW(campaign_config_from_json(j));
}
