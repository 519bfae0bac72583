#pragma once

// The system under test seen as a black box: scenario in, trace out.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "trashfuzz/error.hpp"
#include "trashfuzz/scenario.hpp"
#include "trashfuzz/stl/trace.hpp"

namespace trashfuzz {

struct SutInterface {
  std::function<stl::Trace(const Scenario&)> run;
  std::vector<std::string> declared_signals;
  double step_seconds = 0.1;
  /// Whether run() may be called from several threads at once.
  bool parallel_safe = true;
};

/// Runs the SUT and checks that the trace honours the signal contract.
inline stl::Trace run_sut(const Scenario& s, const SutInterface& sut) {
  stl::Trace tr;
  try {
    tr = sut.run(s);
  } catch (const SutFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw SutFailure(std::string("system under test failed: ") + e.what());
  }
  std::vector<std::string> missing;
  for (const auto& name : sut.declared_signals)
    if (!tr.has(name)) missing.push_back(name);
  if (!missing.empty()) throw SignalContractViolation(missing);
  if (tr.empty()) throw SutFailure("system under test returned an empty trace");
  tr.set_step_seconds(sut.step_seconds);
  return tr;
}

namespace detail {

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  return out + "'";
}

}  // namespace detail

/// External SUT behind the file-exchange protocol:
///   <command> --scenario <path> --map <path> --out <path>
/// The adapter must exit 0 and leave trace JSON at the --out path.
/// Calls through one adapter instance are serialized.
inline SutInterface subprocess_sut(const std::string& command, const std::filesystem::path& map_path,
                                   std::vector<std::string> signals,
                                   std::filesystem::path workdir, double step_seconds = 0.1) {
  auto mu = std::make_shared<std::mutex>();
  auto counter = std::make_shared<unsigned long>(0);
  SutInterface sut;
  sut.declared_signals = std::move(signals);
  sut.step_seconds = step_seconds;
  sut.parallel_safe = false;
  sut.run = [=](const Scenario& s) {
    std::lock_guard lock(*mu);
    std::filesystem::create_directories(workdir);
    auto id = std::to_string((*counter)++);
    auto scen = workdir / ("scenario_" + id + ".json");
    auto out = workdir / ("trace_" + id + ".json");
    {
      std::ofstream f(scen);
      f << to_json(s).dump(2) << "\n";
    }
    std::filesystem::remove(out);
    std::string cmd = command + " --scenario " + detail::shell_quote(scen.string()) + " --map " +
                      detail::shell_quote(std::filesystem::absolute(map_path).string()) + " --out " +
                      detail::shell_quote(out.string()) + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    if (rc != 0) throw SutFailure("adapter exited with status " + std::to_string(rc));
    std::ifstream in(out);
    if (!in) throw SutFailure("adapter produced no trace at " + out.string());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw SutFailure(std::string("adapter trace is not JSON: ") + e.what());
    }
    std::filesystem::remove(scen);
    std::filesystem::remove(out);
    return stl::trace_from_json(j);
  };
  return sut;
}

}  // namespace trashfuzz
