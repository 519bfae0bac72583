#pragma once

// Campaign manifests: one JSON file naming the map, object library, law pack,
// SUT and campaign config. Relative paths resolve against the manifest's
// directory. Loading validates everything before any SUT run.
//
//   {"format_version": 1, "map": "demo_map.json", "library": "library.json",
//    "laws": "laws.tfl", "sut": {"kind": "toy", "config": "toy_sim.json"},
//    "campaign": {...}, "out": "out"}
//
// A subprocess SUT is {"kind": "subprocess", "command": "...",
// "signals": [...], "step_seconds": 0.1}.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "trashfuzz/error.hpp"
#include "trashfuzz/fuzzer.hpp"
#include "trashfuzz/goals.hpp"
#include "trashfuzz/map_model.hpp"
#include "trashfuzz/scenario.hpp"
#include "trashfuzz/stl/parser.hpp"
#include "trashfuzz/sut.hpp"
#include "trashfuzz/toy_sim.hpp"

namespace trashfuzz {

namespace fs = std::filesystem;

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw SchemaError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json read_json(const fs::path& p) {
  try {
    return nlohmann::json::parse(read_text(p));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(p.string() + ": " + e.what());
  }
}

inline void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

struct LawPack {
  std::vector<stl::Law> laws;

  std::vector<ViolationGoal> goals(std::size_t cap = kDefaultGoalCap) const { return goals_of(laws, cap); }
  const stl::Law* find(const std::string& name) const {
    for (const auto& l : laws)
      if (l.name == name) return &l;
    return nullptr;
  }
};

/// Parses a pack and checks it is non-empty, names are unique and every law
/// decomposes under the cap. SyntaxError and GoalExplosion propagate.
inline LawPack parse_law_pack_checked(std::string_view text, std::size_t cap = kDefaultGoalCap) {
  LawPack p{stl::parse_law_pack(text)};
  if (p.laws.empty()) throw SchemaError("law pack contains no laws");
  std::set<std::string> names;
  for (const auto& l : p.laws) {
    if (!names.insert(l.name).second) throw SchemaError("duplicate law name '" + l.name + "'");
    decompose(l.formula, l.name, cap);
  }
  return p;
}

inline LawPack load_law_pack(const fs::path& p, std::size_t cap = kDefaultGoalCap) {
  return parse_law_pack_checked(read_text(p), cap);
}

struct SutSpec {
  std::string kind = "toy";
  fs::path config;  // toy: optional ToySimConfig file
  std::string command;  // subprocess
  std::vector<std::string> signals;
  double step_seconds = 0.1;
};

struct CampaignManifest {
  fs::path source;
  nlohmann::json document;
  fs::path map_path, library_path, laws_path, out_dir;
  SutSpec sut;
  CampaignConfig config;

  MapModel map;
  Library library;
  LawPack laws;
  ToySimConfig toy;

  /// Content-addressed directory name: hash of the manifest document and seed.
  std::string campaign_id() const {
    return hex64(fnv1a(std::to_string(config.seed), fnv1a(document.dump())));
  }
  fs::path run_dir() const { return out_dir / campaign_id(); }

  SutInterface make_sut() const {
    if (sut.kind == "toy") return toy_sim_sut(map, library, toy);
    return subprocess_sut(sut.command, map_path, sut.signals, run_dir() / "sut_exchange", sut.step_seconds);
  }
};

inline CampaignManifest load_manifest(const fs::path& path) {
  CampaignManifest m;
  m.source = path;
  m.document = read_json(path);
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  try {
    const auto& d = m.document;
    if (d.at("format_version").get<int>() != 1) throw SchemaError("unsupported manifest format_version");
    m.map_path = resolve(d.at("map").get<std::string>());
    m.library_path = d.contains("library") ? resolve(d["library"].get<std::string>()) : fs::path();
    m.laws_path = resolve(d.at("laws").get<std::string>());
    m.out_dir = resolve(d.value("out", std::string("out")));
    if (d.contains("campaign")) {
      const auto& c = d["campaign"];
      m.config = campaign_config_from_json(c.is_string() ? read_json(resolve(c.get<std::string>())) : c);
    }
    const auto& s = d.at("sut");
    m.sut.kind = s.at("kind").get<std::string>();
    if (m.sut.kind == "toy") {
      if (s.contains("config")) m.sut.config = resolve(s["config"].get<std::string>());
    } else if (m.sut.kind == "subprocess") {
      m.sut.command = s.at("command").get<std::string>();
      m.sut.signals = s.at("signals").get<std::vector<std::string>>();
      m.sut.step_seconds = s.value("step_seconds", 0.1);
      if (m.sut.signals.empty()) throw SchemaError("subprocess SUT must declare its signals");
    } else {
      throw SchemaError("unknown SUT kind '" + m.sut.kind + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }

  m.map = map_from_json(read_json(m.map_path));
  m.library = m.library_path.empty() ? default_library() : library_from_json(read_json(m.library_path));
  m.laws = load_law_pack(m.laws_path, m.config.goal_cap);
  m.toy = m.sut.config.empty() ? default_toy_sim_config() : toy_sim_config_from_json(read_json(m.sut.config));
  find_route(m.map, {m.config.sampler.route.start.x, m.config.sampler.route.start.y},
             m.config.sampler.route.destination);
  return m;
}

/// Goal ids contain '/'; witness directories use '.' instead.
inline std::string goal_dir_name(const std::string& id) {
  std::string out = id;
  std::replace(out.begin(), out.end(), '/', '.');
  return out;
}

/// Writes result.json, coverage.txt and one witness directory per covered
/// goal under the manifest's run directory. Returns that directory.
inline fs::path write_campaign_outputs(const CampaignManifest& m, const CampaignResult& r,
                                       const std::string& coverage_text) {
  fs::path dir = m.run_dir();
  fs::create_directories(dir);
  write_text(dir / "result.json", to_json(r, m.config).dump(2) + "\n");
  write_text(dir / "coverage.txt", coverage_text);
  for (const auto& [id, w] : r.covered) {
    fs::path wd = dir / "witnesses" / goal_dir_name(id);
    write_text(wd / "scenario.json", to_json(w.scenario).dump(2) + "\n");
    write_text(wd / "trace.csv", stl::to_csv(w.trace));
  }
  return dir;
}

}  // namespace trashfuzz
