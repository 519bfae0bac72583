#pragma once

// Subcommand bodies behind the command-line tool. Each returns the process
// exit code and writes human output to `out`, diagnostics to `err`.
//
//   0  success / valid / reproduced
//   1  invalid scenario / not reproduced
//   2  schema, parse or lookup error
//   3  SUT failure

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "trashfuzz/error.hpp"
#include "trashfuzz/fuzzer.hpp"
#include "trashfuzz/manifest.hpp"
#include "trashfuzz/report.hpp"
#include "trashfuzz/rules.hpp"
#include "trashfuzz/sampling.hpp"

namespace trashfuzz::cli {

enum Exit { kOk = 0, kNo = 1, kSchema = 2, kSut = 3 };

/// Flags shared by every subcommand; unset ones keep file-provided values.
struct Globals {
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::optional<fs::path> out;
};

namespace detail {

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const SutFailure& e) {
    err << "error: " << e.what() << "\n";
    return kSut;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kSchema;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kSchema;
  }
}

inline Library library_or_default(const std::optional<fs::path>& p) {
  return p ? library_from_json(read_json(*p)) : default_library();
}

inline CampaignManifest manifest_with(const fs::path& path, const Globals& g) {
  CampaignManifest m = load_manifest(path);
  if (g.seed) m.config.seed = *g.seed;
  if (g.out) m.out_dir = *g.out;
  m.config.workers = std::max(1u, g.workers);
  return m;
}

}  // namespace detail

inline int cmd_validate(const fs::path& scenario, const fs::path& map_path, const std::optional<fs::path>& library,
                        std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    MapModel map = map_from_json(read_json(map_path));
    Library lib = detail::library_or_default(library);
    Scenario s = scenario_from_json(read_json(scenario), lib);
    RuleReport r = check_rules(s, map, lib);
    out << to_json(r).dump(2) << "\n";
    return r.valid() ? kOk : kNo;
  });
}

inline int cmd_sample(const fs::path& map_path, const std::optional<fs::path>& library,
                      const std::optional<fs::path>& config, std::size_t n, const Globals& g, std::ostream& out,
                      std::ostream& err) {
  return detail::guarded(err, [&] {
    MapModel map = map_from_json(read_json(map_path));
    Library lib = detail::library_or_default(library);
    CampaignConfig cfg = config ? campaign_config_from_json(read_json(*config)) : CampaignConfig{};
    Rng rng(g.seed.value_or(cfg.seed));
    Scenario s = sample_valid(map, lib, n, rng, cfg.sampler);
    std::string text = to_json(s).dump(2) + "\n";
    if (g.out) write_text(*g.out, text);
    else out << text;
    return kOk;
  });
}

inline int cmd_goals(const fs::path& laws, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    LawPack pack = load_law_pack(laws);
    std::size_t total = 0;
    for (const auto& law : pack.laws) {
      auto set = decompose(law.formula, law.name);
      out << law.name;
      if (!law.description.empty()) out << "  \"" << law.description << "\"";
      out << "  (" << set.goals.size() << " goals)\n";
      for (const auto& goal : set.goals) out << "  " << goal.id << "  " << stl::format(goal.formula) << "\n";
      total += set.goals.size();
    }
    out << "total " << total << " goals in " << pack.laws.size() << " laws\n";
    return kOk;
  });
}

/// Runs the manifest's campaign and writes its outputs. Sets `run_dir` to the
/// output directory when one was written.
inline int cmd_fuzz(const fs::path& manifest, const Globals& g, std::ostream& out, std::ostream& err,
                    fs::path* run_dir = nullptr) {
  return detail::guarded(err, [&] {
    CampaignManifest m = detail::manifest_with(manifest, g);
    SutInterface sut = m.make_sut();
    CampaignResult r = run_campaign(m.laws.goals(m.config.goal_cap), m.config, sut, m.map, m.library);
    std::string table = coverage_table({summarize(r, m.config)});
    fs::path dir = write_campaign_outputs(m, r, table);
    if (run_dir) *run_dir = dir;
    out << table << "results: " << dir.string() << "\n";
    if (r.aborted) {
      err << "error: campaign aborted after " << r.queries << " queries: " << r.abort_reason << "\n";
      return kSut;
    }
    return kOk;
  });
}

/// Re-executes a witness `times` times; reproduced only if every run has
/// robustness <= 0 for the goal.
inline int cmd_replay(const fs::path& scenario, const fs::path& manifest, const std::string& goal_id, int times,
                      const Globals& g, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    CampaignManifest m = detail::manifest_with(manifest, g);
    const ViolationGoal* goal = nullptr;
    auto goals = m.laws.goals(m.config.goal_cap);
    for (const auto& x : goals)
      if (x.id == goal_id) goal = &x;
    if (!goal) {
      err << "error: no goal '" << goal_id << "' in " << m.laws_path.string() << "\n";
      return kSchema;
    }
    Scenario s = scenario_from_json(read_json(scenario), m.library);
    if (!check_rules(s, m.map, m.library).valid()) {
      err << "error: witness scenario violates the placement rules\n";
      return kSchema;
    }
    SutInterface sut = m.make_sut();
    bool all = true;
    for (int k = 0; k < std::max(1, times); ++k) {
      double rho = stl::robustness(goal->formula, run_sut(s, sut));
      bool hit = rho <= 0.0;
      all = all && hit;
      out << "run " << k + 1 << ": robustness " << rho << (hit ? " (violated)" : " (not violated)") << "\n";
    }
    out << (all ? "reproduced" : "not reproduced") << "\n";
    return all ? kOk : kNo;
  });
}

inline int cmd_report(const std::vector<fs::path>& results, const Globals& g, std::ostream& out,
                      std::ostream& err) {
  return detail::guarded(err, [&] {
    std::vector<RunSummary> runs;
    for (const auto& p : results) runs.push_back(run_summary_from_json(read_json(p)));
    std::string table = coverage_table(runs);
    if (g.out) write_text(*g.out, table);
    out << table;
    return kOk;
  });
}

/// The toy simulator behind the subprocess adapter protocol.
inline int cmd_sim(const fs::path& scenario, const fs::path& map_path, const fs::path& trace_out,
                   const std::optional<fs::path>& library, const std::optional<fs::path>& config,
                   std::ostream& err) {
  return detail::guarded(err, [&] {
    MapModel map = map_from_json(read_json(map_path));
    Library lib = detail::library_or_default(library);
    ToySimConfig cfg = config ? toy_sim_config_from_json(read_json(*config)) : default_toy_sim_config();
    Scenario s = scenario_from_json(read_json(scenario), lib);
    write_text(trace_out, stl::to_json(run_toy_sim(s, cfg, map, lib)).dump() + "\n");
    return kOk;
  });
}

}  // namespace trashfuzz::cli
