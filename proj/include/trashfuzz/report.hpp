#pragma once

// Coverage tables: one row per (engine, object count), one column per
// repetition, then the average.

#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "trashfuzz/error.hpp"
#include "trashfuzz/fuzzer.hpp"

namespace trashfuzz {

/// The parts of a result document a coverage table needs.
struct RunSummary {
  std::string engine;
  std::size_t n_objects = 0;
  std::uint64_t seed = 0;
  std::size_t goals_total = 0;
  std::size_t goals_covered = 0;
};

inline RunSummary summarize(const CampaignResult& r, const CampaignConfig& cfg) {
  return {to_string(r.engine), cfg.n_objects, cfg.seed, r.goals.size(), r.covered.size()};
}

inline RunSummary run_summary_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != 1) throw SchemaError("unsupported result format_version");
    const auto& c = j.at("config");
    return {j.at("engine").get<std::string>(), c.at("n_objects").get<std::size_t>(), c.at("seed").get<std::uint64_t>(),
            j.at("goals_total").get<std::size_t>(), j.at("goals_covered").get<std::size_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed result JSON: ") + e.what());
  }
}

struct CoverageRow {
  std::string engine;
  std::size_t n_objects = 0;
  std::vector<std::size_t> covered;  // one entry per repetition, by seed

  double average() const {
    if (covered.empty()) return 0.0;
    double s = 0.0;
    for (auto c : covered) s += static_cast<double>(c);
    return s / static_cast<double>(covered.size());
  }
};

/// Groups runs by (engine, object count); repetitions are ordered by seed.
inline std::vector<CoverageRow> coverage_rows(std::vector<RunSummary> runs) {
  std::stable_sort(runs.begin(), runs.end(), [](const RunSummary& a, const RunSummary& b) {
    return std::tie(a.engine, a.n_objects, a.seed) < std::tie(b.engine, b.n_objects, b.seed);
  });
  std::vector<CoverageRow> rows;
  for (const auto& r : runs) {
    if (rows.empty() || rows.back().engine != r.engine || rows.back().n_objects != r.n_objects)
      rows.push_back({r.engine, r.n_objects, {}});
    rows.back().covered.push_back(r.goals_covered);
  }
  return rows;
}

inline std::string coverage_table(const std::vector<RunSummary>& runs) {
  auto rows = coverage_rows(runs);
  std::size_t reps = 0, total = 0;
  for (const auto& r : rows) reps = std::max(reps, r.covered.size());
  for (const auto& r : runs) total = std::max(total, r.goals_total);

  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-10s %4s", "Engine", "Num");
  out << buf;
  for (std::size_t i = 0; i < reps; ++i) {
    std::snprintf(buf, sizeof buf, " %4s", ("R" + std::to_string(i + 1)).c_str());
    out << buf;
  }
  out << "    Avg\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-10s %4zu", r.engine.c_str(), r.n_objects);
    out << buf;
    for (std::size_t i = 0; i < reps; ++i) {
      if (i < r.covered.size()) std::snprintf(buf, sizeof buf, " %4zu", r.covered[i]);
      else std::snprintf(buf, sizeof buf, " %4s", "-");
      out << buf;
    }
    std::snprintf(buf, sizeof buf, " %6.2f\n", r.average());
    out << buf;
  }
  out << "(goals covered out of " << total << ")\n";
  return out.str();
}

}  // namespace trashfuzz
