#pragma once

// Exhaustive coarse-grid search used as the reachability oracle for planted
// bugs: every rule-compliant single object on a 2 m / 45 degree grid, and
// every compliant pair on 4-adjacent grid cells. Library types with identical
// geometry and classes are tried once.

#include <chrono>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "trashfuzz/fuzzer.hpp"

namespace tftest {

using namespace trashfuzz;

struct OracleResult {
  std::map<std::string, Scenario> reachable;  // goal id -> first witness
  std::size_t singles = 0;
  std::size_t pairs = 0;
  double seconds = 0.0;
};

inline std::vector<int> representative_types(const Library& lib) {
  std::set<std::tuple<int, std::set<std::string>, double, double, double, double, double>> seen;
  std::vector<int> out;
  for (const auto& d : lib.defs())
    if (seen.insert({static_cast<int>(d.category), d.classes, d.width, d.depth, d.height, d.handle_axis.x,
                     d.handle_axis.y})
            .second)
      out.push_back(d.type_id);
  return out;
}

inline OracleResult grid_oracle(const std::vector<ViolationGoal>& goals, const SutInterface& sut, const MapModel& map,
                                const Library& lib, const SamplerOptions& opt = {}, double step = 2.0,
                                double rot_step = 45.0) {
  auto t0 = std::chrono::steady_clock::now();
  OracleResult res;
  Scenario s;
  s.ego_start = opt.route.start;
  s.ego_destination = opt.route.destination;

  auto evaluate = [&](const Scenario& sc) {
    stl::Trace tr = run_sut(sc, sut);
    for (const auto& g : goals)
      if (!res.reachable.count(g.id) && stl::robustness(g.formula, tr) <= 0.0) res.reachable[g.id] = sc;
  };
  evaluate(s);

  const auto types = representative_types(lib);
  const auto& R = opt.region;
  int nf = static_cast<int>((R.forward_max - R.forward_min) / step);
  int nr = static_cast<int>((R.right_max - R.right_min) / step);
  std::map<std::pair<int, int>, std::vector<PlacedObject>> cells;
  s.objects.resize(1);
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nr; ++j)
      for (double rot = 0.0; rot < 360.0; rot += rot_step)
        for (int t : types) {
          s.objects[0] = PlacedObject{R.forward_min + step * (i + 0.5), R.right_min + step * (j + 0.5), rot, t};
          if (!check_rules(s, map, lib).valid()) continue;
          cells[{i, j}].push_back(s.objects[0]);
          ++res.singles;
          evaluate(s);
        }

  s.objects.resize(2);
  for (const auto& [cell, here] : cells)
    for (auto [di, dj] : {std::pair{1, 0}, std::pair{0, 1}}) {
      auto it = cells.find({cell.first + di, cell.second + dj});
      if (it == cells.end()) continue;
      for (const auto& a : here)
        for (const auto& b : it->second) {
          s.objects[0] = a;
          s.objects[1] = b;
          if (!check_rules(s, map, lib).valid()) continue;
          ++res.pairs;
          evaluate(s);
        }
    }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace tftest
