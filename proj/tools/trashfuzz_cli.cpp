#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trashfuzz/cli.hpp"

namespace fs = std::filesystem;
using namespace trashfuzz;

int main(int argc, char** argv) {
  CLI::App app{"Adversarial roadside-object fuzzing against traffic-law specifications"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string out;
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the file's value)");
  app.add_option("--workers", workers, "parallel SUT executions (never changes results)")->check(CLI::PositiveNumber);
  auto* out_opt = app.add_option("--out", out, "output directory (fuzz) or file (sample, report)");

  std::string scenario, map, library, laws, manifest, goal, config, trace;
  std::size_t n = 7;
  int times = 3;
  std::vector<std::string> results;

  auto* validate = app.add_subcommand("validate", "check a scenario against the placement rules");
  validate->add_option("scenario", scenario, "scenario JSON")->required();
  validate->add_option("--map", map, "map JSON")->required();
  validate->add_option("--library", library, "object library JSON (default: built-in)");

  auto* sample = app.add_subcommand("sample", "draw one rule-compliant scenario");
  sample->add_option("--map", map, "map JSON")->required();
  sample->add_option("--library", library, "object library JSON (default: built-in)");
  sample->add_option("--config", config, "campaign config JSON for region and route");
  sample->add_option("-n,--objects", n, "number of objects");

  auto* goals = app.add_subcommand("goals", "list the violation goals of a law pack");
  goals->add_option("laws", laws, "law pack file")->required();

  auto* fuzz = app.add_subcommand("fuzz", "run the campaign described by a manifest");
  fuzz->add_option("manifest", manifest, "campaign manifest JSON")->required();

  auto* replay = app.add_subcommand("replay", "re-execute a witness against one goal");
  replay->add_option("scenario", scenario, "witness scenario JSON")->required();
  replay->add_option("--manifest", manifest, "campaign manifest JSON")->required();
  replay->add_option("--goal", goal, "goal id")->required();
  replay->add_option("--times", times, "repetitions that must all reproduce")->check(CLI::PositiveNumber);

  auto* report = app.add_subcommand("report", "render result files as a coverage table");
  report->add_option("results", results, "result.json files")->required();

  auto* sim = app.add_subcommand("sim", "toy simulator adapter: --scenario S --map M --out T");
  sim->add_option("--scenario", scenario, "scenario JSON")->required();
  sim->add_option("--map", map, "map JSON")->required();
  sim->add_option("--library", library, "object library JSON (default: built-in)");
  sim->add_option("--config", config, "toy simulator config JSON");
  sim->add_option("--trace", trace, "trace output path (alias of --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kSchema;
  }

  cli::Globals g;
  if (*seed_opt) g.seed = seed;
  g.workers = workers;
  if (*out_opt) g.out = out;
  auto opt = [](const std::string& s) { return s.empty() ? std::optional<fs::path>() : std::optional<fs::path>(s); };

  if (*validate) return cli::cmd_validate(scenario, map, opt(library), std::cout, std::cerr);
  if (*sample) return cli::cmd_sample(map, opt(library), opt(config), n, g, std::cout, std::cerr);
  if (*goals) return cli::cmd_goals(laws, std::cout, std::cerr);
  if (*fuzz) return cli::cmd_fuzz(manifest, g, std::cout, std::cerr);
  if (*replay) return cli::cmd_replay(scenario, manifest, goal, times, g, std::cout, std::cerr);
  if (*report) return cli::cmd_report(std::vector<fs::path>(results.begin(), results.end()), g, std::cout, std::cerr);
  if (*sim) {
    std::string dest = !trace.empty() ? trace : out;
    if (dest.empty()) {
      std::cerr << "error: sim needs --out\n";
      return cli::kSchema;
    }
    return cli::cmd_sim(scenario, map, dest, opt(library), opt(config), std::cerr);
  }
  return cli::kSchema;
}
