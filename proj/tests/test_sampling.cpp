#include <gtest/gtest.h>

#include "trashfuzz/manifest.hpp"
#include "trashfuzz/sampling.hpp"

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

}  // namespace

TEST(Sampler, ValidAtEveryObjectCount) {
  for (std::size_t n = 0; n <= 7; ++n) {
    Rng rng(100 + n);
    for (int i = 0; i < 200; ++i) {
      Scenario s = sample_valid(demo_map(), lib(), n, rng);
      ASSERT_EQ(s.objects.size(), n);
      ASSERT_TRUE(check_rules(s, demo_map(), lib()).valid());
      for (const auto& o : s.objects) ASSERT_TRUE(PlacementRegion{}.contains(o.forward, o.right));
    }
  }
}

TEST(Sampler, ReproducibleFromSeed) {
  Rng a(42), b(42);
  EXPECT_EQ(sample_valid(demo_map(), lib(), 7, a), sample_valid(demo_map(), lib(), 7, b));
}

TEST(Sampler, EmptyRegionRaises) {
  SamplerOptions opt;
  opt.region = {20.0, 21.0, -3.0, -2.0};  // the middle of the carriageway
  Library bins_only({lib().at(0)});
  Rng rng(1);
  EXPECT_THROW(sample_valid(demo_map(), bins_only, 1, rng, opt), RegionEmpty);
}

TEST(Sampler, UniformBaselineOftenInvalid) {
  Rng rng(7);
  int valid1 = 0, valid7 = 0;
  for (int i = 0; i < 1000; ++i) {
    valid1 += check_rules(sample_uniform(lib(), 1, rng), demo_map(), lib()).valid();
    valid7 += check_rules(sample_uniform(lib(), 7, rng), demo_map(), lib()).valid();
  }
  EXPECT_LT(valid1, 1000);
  EXPECT_LT(valid7, valid1);
}

TEST(Sampler, RepairRestoresCompliance) {
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    Scenario s = sample_uniform(lib(), 4, rng);
    Scenario r = repair(s, demo_map(), lib(), rng);
    EXPECT_EQ(r.objects.size(), s.objects.size());
    EXPECT_TRUE(check_rules(r, demo_map(), lib()).valid());
  }
  Scenario ok = sample_valid(demo_map(), lib(), 3, rng);
  EXPECT_EQ(repair(ok, demo_map(), lib(), rng), ok);
}
