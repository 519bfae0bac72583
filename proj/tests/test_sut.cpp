#include <gtest/gtest.h>

#include "trashfuzz/manifest.hpp"
#include "trashfuzz/sampling.hpp"
#include "trashfuzz/stl/robustness.hpp"
#include "trashfuzz/sut.hpp"
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

const LawPack& laws() {
  static LawPack p = load_law_pack(fs::path(TF_DATA_DIR) / "laws.tfl");
  return p;
}

double law_rho(const std::string& name, const stl::Trace& tr) {
  return stl::robustness(laws().find(name)->formula, tr);
}

Scenario with(std::vector<PlacedObject> objs) {
  Scenario s;
  s.ego_start = RouteSpec{}.start;
  s.ego_destination = RouteSpec{}.destination;
  s.objects = std::move(objs);
  return s;
}

// Two bins on the south footway, 0.8 m apart, about 12 m before the light.
Scenario bins_before_light() { return with({{62.0, 2.45, 270.0, 0}, {63.4, 2.45, 270.0, 1}}); }

ToySimConfig always_green() {
  ToySimConfig c;
  c.lights.initial_red = 0.0;
  c.lights.green = 1e6;
  return c;
}

}  // namespace

TEST(ToySim, EmptyScenarioUnderGreenIsLawful) {
  auto tr = run_toy_sim(with({}), always_green(), demo_map(), lib());
  EXPECT_GT(tr.at("at_destination", tr.length() - 1), 0.5);
  for (std::size_t t = 0; t < tr.length(); ++t) EXPECT_LE(tr.at("speed", t), 12.0 + 1e-9);
  for (const auto& l : laws().laws) EXPECT_GT(stl::robustness(l.formula, tr), 0.0) << l.name;
}

TEST(ToySim, DefaultScheduleBugFreeRunIsLawful) {
  ToySimConfig c;
  auto tr = run_toy_sim(bins_before_light(), c, demo_map(), lib());
  for (const auto& l : laws().laws) EXPECT_GT(stl::robustness(l.formula, tr), 0.0) << l.name;
}

TEST(ToySim, GreenOverrideRunsTheRedLight) {
  auto tr = run_toy_sim(bins_before_light(), default_toy_sim_config(), demo_map(), lib());
  EXPECT_LE(law_rho("traffic_light", tr), 0.0);
  bool mismatch = false;
  for (std::size_t t = 0; t < tr.length(); ++t)
    mismatch |= tr.at("perceived_light_color", t) == 2.0 && tr.at("actual_light_color", t) == 0.0;
  EXPECT_TRUE(mismatch);
}

TEST(ToySim, RedOverrideHaltsAtGreen) {
  ToySimConfig c = always_green();
  PlantedBug b;
  b.name = "red_at_bins";
  b.trigger.kind = TriggerKind::NearLight;
  b.trigger.classes = {"bin"};
  b.trigger.min_count = 2;
  b.trigger.max_gap = 1.5;
  b.trigger.light_radius = 15.0;
  b.trigger.sensor_range = 60.0;
  b.effect = {EffectKind::TrafficLightOverride, "", "", LightColor::Red};
  b.persistence = 30;
  c.perception_bugs = {b};
  auto tr = run_toy_sim(bins_before_light(), c, demo_map(), lib());
  EXPECT_LT(tr.at("at_destination", tr.length() - 1), 0.5);
  EXPECT_LE(law_rho("progress", tr), 0.0);
}

TEST(ToySim, InvariantsOnSampledScenarios) {
  ToySimConfig buggy = default_toy_sim_config(), clean;
  Rng rng(11);
  for (int i = 0; i < 40; ++i) {
    Scenario s = sample_valid(demo_map(), lib(), 1 + i % 7, rng);
    auto a = run_toy_sim(s, buggy, demo_map(), lib());
    EXPECT_EQ(a, run_toy_sim(s, buggy, demo_map(), lib()));
    auto b = run_toy_sim(s, clean, demo_map(), lib());
    for (std::size_t t = 0; t < a.length(); ++t) {
      EXPECT_GE(a.at("speed", t), 0.0);
      EXPECT_EQ(a.at("actual_light_color", t), static_cast<double>(buggy.lights.at(a.at("time", t))));
      if (t > 0) {
        double dv = a.at("speed", t) - a.at("speed", t - 1);
        EXPECT_LE(dv, buggy.max_accel * buggy.dt + 1e-9);
        EXPECT_GE(dv, -buggy.emergency_decel * buggy.dt - 1e-9);
      }
    }
    // Without bugs the perceived light is the actual light.
    for (std::size_t t = 0; t < b.length(); ++t)
      EXPECT_EQ(b.at("perceived_light_color", t), b.at("actual_light_color", t));
  }
}

TEST(Sut, SignalContractViolation) {
  SutInterface sut = toy_sim_sut(demo_map(), lib(), ToySimConfig{});
  sut.declared_signals.push_back("wiper_speed");
  try {
    run_sut(with({}), sut);
    FAIL() << "expected SignalContractViolation";
  } catch (const SignalContractViolation& e) {
    EXPECT_NE(std::string(e.what()).find("wiper_speed"), std::string::npos);
  }
}

TEST(Sut, ExceptionsBecomeSutFailure) {
  SutInterface sut;
  sut.run = [](const Scenario&) -> stl::Trace { throw std::runtime_error("boom"); };
  EXPECT_THROW(run_sut(with({}), sut), SutFailure);
}

TEST(Sut, SubprocessLoopbackMatchesInProcess) {
  auto dir = fs::temp_directory_path() / "trashfuzz_test_sut";
  fs::remove_all(dir);
  fs::create_directories(dir);
  ToySimConfig cfg = default_toy_sim_config();
  write_text(dir / "toy.json", to_json(cfg).dump(2));
  std::string cmd = std::string(TF_CLI_PATH) + " sim --config " + detail::shell_quote((dir / "toy.json").string());
  auto map_path = fs::path(TF_DATA_DIR) / "demo_map.json";
  SutInterface ext = subprocess_sut(cmd, map_path, toy_signal_names(), dir / "x");
  Scenario s = bins_before_light();
  auto a = run_sut(s, ext);
  auto b = run_sut(s, toy_sim_sut(demo_map(), lib(), cfg));
  ASSERT_EQ(a.length(), b.length());
  for (const auto& name : toy_signal_names())
    for (std::size_t t = 0; t < a.length(); ++t) ASSERT_DOUBLE_EQ(a.at(name, t), b.at(name, t)) << name;

  SutInterface broken = subprocess_sut("false", map_path, toy_signal_names(), dir / "y");
  EXPECT_THROW(run_sut(s, broken), SutFailure);
  fs::remove_all(dir);
}
