#include <gtest/gtest.h>

#include <fstream>

#include "trashfuzz/manifest.hpp"
#include "trashfuzz/sampling.hpp"
#include "trashfuzz/scenario.hpp"

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

Scenario with(std::vector<PlacedObject> objs) {
  Scenario s;
  s.ego_start = RouteSpec{}.start;
  s.ego_destination = RouteSpec{}.destination;
  s.objects = std::move(objs);
  return s;
}

}  // namespace

TEST(Encode, TableRows) {
  Scenario s = with({{25.04, 2.63, 25.78, lib().id_of("Bench1")}, {18.95, -9.83, 290.48, lib().id_of("TrashBin(Green)")}});
  EncodedScenario e = encode(s);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e.rows[0], (std::array<double, 4>{25.04, 2.63, 25.78, 9.0}));
  EXPECT_EQ(e.rows[1], (std::array<double, 4>{18.95, -9.83, 290.48, 0.0}));
  EXPECT_EQ(encode(with({})).size(), 0u);
}

TEST(Decode, RoundTripAndNormalization) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    Scenario s = sample_valid(demo_map(), lib(), 1 + i % 7, rng);
    EXPECT_EQ(decode(encode(s), s.ego_start, s.ego_destination, lib()), s);
  }
  EncodedScenario e;
  e.rows.push_back({10, 3, 372.5, 0});
  EXPECT_EQ(decode(e, {}, {}, lib()).objects[0].rotation, 12.5);
  e.rows[0] = {10, 3, 0, 99};
  EXPECT_THROW(decode(e, {}, {}, lib()), UnknownTypeId);
  e.rows[0] = {std::nan(""), 3, 0, 0};
  EXPECT_THROW(decode(e, {}, {}, lib()), NonFiniteValue);
}

TEST(ScenarioJson, RoundTripAndNames) {
  Scenario s = with({{12.5, 4.25, 90, 3}});
  EXPECT_EQ(scenario_from_json(to_json(s), lib()), s);
  auto j = to_json(s);
  j["objects"][0]["type"] = "Hydrant";
  EXPECT_EQ(scenario_from_json(j, lib()).objects[0].type_id, lib().id_of("Hydrant"));
  j["format_version"] = 2;
  EXPECT_THROW(scenario_from_json(j, lib()), SchemaError);
  EXPECT_THROW(scenario_from_json(nlohmann::json::object(), lib()), SchemaError);
}

TEST(Library, ValidatesDefinitions) {
  EXPECT_EQ(lib().size(), 15u);
  EXPECT_EQ(library_from_json(to_json(lib())).defs().size(), lib().size());
  auto j = to_json(lib());
  j["objects"][0]["handle_axis"] = {1.0, 1.0};
  EXPECT_THROW(library_from_json(j), SchemaError);
  EXPECT_THROW(lib().at(15), UnknownTypeId);
}

TEST(Mutate, ChangesExactlyOneCellAndStaysCompliant) {
  Rng rng(4);
  Scenario s = sample_valid(demo_map(), lib(), 5, rng);
  for (int d = 0; d < 4; ++d)
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
      Mutation m = mutate_element(s, i, static_cast<Dimension>(d), rng, demo_map(), lib());
      auto a = encode(s), b = encode(m.scenario);
      int changed = 0;
      for (std::size_t r = 0; r < a.size(); ++r)
        for (int c = 0; c < 4; ++c) changed += a.rows[r][c] != b.rows[r][c];
      EXPECT_EQ(changed, 1);
      EXPECT_TRUE(check_rules(m.scenario, demo_map(), lib()).valid());
      if (d == 3) EXPECT_EQ(m.delta, 1.0);
      else EXPECT_EQ(m.delta, b.rows[i][d] - a.rows[i][d]);
    }
}

TEST(Mutate, SeededDeterminism) {
  Rng r1(5), r2(5);
  Scenario s = sample_valid(demo_map(), lib(), 3, r1);
  Scenario t = sample_valid(demo_map(), lib(), 3, r2);
  ASSERT_EQ(s, t);
  EXPECT_EQ(mutate_element(s, 1, Dimension::Forward, r1, demo_map(), lib()).scenario,
            mutate_element(t, 1, Dimension::Forward, r2, demo_map(), lib()).scenario);
}

TEST(Mutate, ZeroWidthRegionIsStuck) {
  Rng rng(6);
  Scenario s = sample_valid(demo_map(), lib(), 1, rng);
  MutationOptions opt;
  opt.region = {s.objects[0].forward, s.objects[0].forward, s.objects[0].right, s.objects[0].right};
  EXPECT_THROW(mutate_element(s, 0, Dimension::Forward, rng, demo_map(), lib(), opt), MutationStuck);
  EXPECT_THROW(mutate_element(s, 3, Dimension::Forward, rng, demo_map(), lib()), InvalidScenario);
}

TEST(Mutate, BinTypeSwapHasUnitDelta) {
  Scenario s = with({{30.0, 3.25, 270.0, 0}});
  ASSERT_TRUE(check_rules(s, demo_map(), lib()).valid());
  Rng rng(7);
  Mutation m = mutate_element(s, 0, Dimension::Type, rng, demo_map(), lib());
  EXPECT_EQ(m.delta, 1.0);
  EXPECT_NE(m.scenario.objects[0].type_id, 0);
}

TEST(Hash, StableAndSensitive) {
  Scenario s = with({{1, 2, 3, 4}});
  Scenario t = s;
  EXPECT_EQ(scenario_hash(s), scenario_hash(t));
  t.objects[0].forward = 1.0000001;
  EXPECT_NE(scenario_hash(s), scenario_hash(t));
  EXPECT_EQ(scenario_hash(s).size(), 16u);
}
