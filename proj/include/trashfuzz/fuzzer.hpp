#pragma once

// Search engines over scenario placements: the greedy gradient-guided
// campaign, a genetic baseline and a random baseline. All three share the
// evaluation bookkeeping (budget, coverage, query log) in CampaignRun.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "trashfuzz/error.hpp"
#include "trashfuzz/goals.hpp"
#include "trashfuzz/map_model.hpp"
#include "trashfuzz/rules.hpp"
#include "trashfuzz/sampling.hpp"
#include "trashfuzz/scenario.hpp"
#include "trashfuzz/stl/parser.hpp"
#include "trashfuzz/stl/robustness.hpp"
#include "trashfuzz/sut.hpp"

namespace trashfuzz {

struct CellRef {
  std::size_t index = 0;
  Dimension dimension = Dimension::Forward;
  friend bool operator==(const CellRef&, const CellRef&) = default;
};

/// The single greedy seed: the steepest gradient seen so far and the cell it
/// was measured on.
struct Seed {
  double gradient = 0.0;
  std::optional<CellRef> element;
  double value = 0.0;  // the cell value of the child that produced the gradient
};

/// Finite-difference gradient between two scenarios differing in one cell:
/// (rho0 - rhok) / (cell0 - cellk), with denominator 1 for type swaps.
inline double gradient(double cell0, double cellk, double rho0, double rhok, Dimension dim) {
  if (dim == Dimension::Type) {
    if (cell0 == cellk) throw ZeroDelta();
    return (rho0 - rhok) / 1.0;
  }
  double d = cell0 - cellk;
  if (d == 0.0) throw ZeroDelta();
  return (rho0 - rhok) / d;
}

inline CellRef differing_cell(const EncodedScenario& a, const EncodedScenario& b) {
  if (a.size() != b.size()) throw InvalidScenario("encoded scenarios have different object counts");
  std::optional<CellRef> found;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int d = 0; d < 4; ++d)
      if (a.rows[i][static_cast<std::size_t>(d)] != b.rows[i][static_cast<std::size_t>(d)]) {
        if (found) throw InvalidScenario("encoded scenarios differ in more than one cell");
        found = CellRef{i, static_cast<Dimension>(d)};
      }
  if (!found) throw ZeroDelta();
  return *found;
}

inline double gradient(const EncodedScenario& enc0, const EncodedScenario& enck, double rho0, double rhok) {
  CellRef c = differing_cell(enc0, enck);
  return gradient(enc0.cell(c.index, c.dimension), enck.cell(c.index, c.dimension), rho0, rhok, c.dimension);
}

enum class Engine { TrashFuzz, Genetic, Random };

inline const char* to_string(Engine e) {
  switch (e) {
    case Engine::TrashFuzz: return "trashfuzz";
    case Engine::Genetic: return "ga";
    case Engine::Random: return "random";
  }
  return "?";
}

inline Engine engine_from(const std::string& s) {
  if (s == "trashfuzz") return Engine::TrashFuzz;
  if (s == "ga") return Engine::Genetic;
  if (s == "random") return Engine::Random;
  throw SchemaError("unknown engine '" + s + "'");
}

struct GaOptions {
  std::size_t population = 30;
  std::size_t generations = 20;
  std::size_t elitism = 2;
  std::size_t tournament = 3;
  double mutation_rate = 0.1;
};

struct CampaignConfig {
  Engine engine = Engine::TrashFuzz;
  std::size_t n_objects = 7;
  std::size_t max_queries = 620;
  std::size_t children_per_round = 0;  // 0 = one child per object
  std::uint64_t seed = 1;
  std::size_t goal_cap = kDefaultGoalCap;
  unsigned workers = 1;  // never changes results
  int restart_after = 5;
  SamplerOptions sampler;
  MutationOptions mutation;
  GaOptions ga;
};

struct QueryRecord {
  std::size_t query = 0;  // 1-based SUT execution number
  std::string scenario_hash;
  std::vector<double> robustness;  // per goal, in goal order
};

struct Witness {
  std::string goal_id;
  std::size_t query = 0;
  double robustness = 0.0;
  Scenario scenario;
  stl::Trace trace;
};

struct CampaignResult {
  Engine engine = Engine::TrashFuzz;
  std::vector<ViolationGoal> goals;
  std::map<std::string, Witness> covered;
  std::vector<double> per_goal_best;  // in goal order
  std::vector<QueryRecord> query_log;
  std::size_t queries = 0;
  bool aborted = false;
  std::string abort_reason;

  bool is_covered(const std::string& id) const { return covered.count(id) != 0; }
  std::size_t covered_count() const { return covered.size(); }
};

/// Violation goals of a law pack, in law order, ids prefixed by law name.
inline std::vector<ViolationGoal> goals_of(const std::vector<stl::Law>& laws, std::size_t cap = kDefaultGoalCap) {
  std::vector<ViolationGoal> out;
  for (const auto& l : laws)
    for (auto& g : decompose(l.formula, l.name, cap).goals) out.push_back(std::move(g));
  return out;
}

namespace detail {

struct Evaluation {
  Scenario scenario;
  stl::Trace trace;
  std::vector<double> rho;
};

/// Budget, coverage and logging shared by the engines.
class CampaignRun {
public:
  CampaignRun(std::vector<ViolationGoal> goals, const CampaignConfig& cfg, const SutInterface& sut)
      : cfg_(cfg), sut_(sut) {
    std::vector<std::string> missing;
    for (const auto& g : goals)
      for (const auto& s : stl::signals_of(g.formula))
        if (std::find(sut.declared_signals.begin(), sut.declared_signals.end(), s) == sut.declared_signals.end() &&
            std::find(missing.begin(), missing.end(), s) == missing.end())
          missing.push_back(s);
    if (!missing.empty()) throw SignalContractViolation(missing);
    result_.engine = cfg.engine;
    result_.goals = std::move(goals);
    result_.per_goal_best.assign(result_.goals.size(), std::numeric_limits<double>::infinity());
    remaining_.assign(result_.goals.size(), true);
    remaining_count_ = result_.goals.size();
  }

  bool done() const { return result_.aborted || remaining_count_ == 0 || result_.queries >= cfg_.max_queries; }
  std::size_t budget_left() const { return cfg_.max_queries - result_.queries; }
  bool remaining(std::size_t g) const { return remaining_[g]; }
  std::size_t goal_count() const { return result_.goals.size(); }
  CampaignResult take() { return std::move(result_); }

  /// Executes as many scenarios as the budget allows, in parallel when the
  /// SUT permits, and records them in input order. Entries past the budget
  /// or after a SUT failure come back empty.
  std::vector<std::optional<Evaluation>> run(const std::vector<Scenario>& batch) {
    std::size_t n = std::min(batch.size(), result_.aborted ? 0 : budget_left());
    std::vector<std::optional<Evaluation>> out(batch.size());
    std::vector<std::exception_ptr> errors(n);
    auto work = [&](std::size_t i) {
      try {
        Evaluation e{batch[i], run_sut(batch[i], sut_), {}};
        e.rho.reserve(result_.goals.size());
        for (const auto& g : result_.goals) e.rho.push_back(stl::robustness(g.formula, e.trace));
        out[i] = std::move(e);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    };
    unsigned workers = sut_.parallel_safe ? std::max(1u, cfg_.workers) : 1u;
    if (workers == 1 || n <= 1) {
      for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < std::min<std::size_t>(workers, n); ++w)
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < n; i = next++) work(i);
        });
      for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (errors[i]) {
        for (std::size_t k = i; k < out.size(); ++k) out[k].reset();
        result_.aborted = true;
        try {
          std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
          result_.abort_reason = e.what();
        }
        break;
      }
      record(*out[i]);
    }
    return out;
  }

  std::optional<Evaluation> run_one(const Scenario& s) { return std::move(run({s}).front()); }

private:
  void record(const Evaluation& e) {
    ++result_.queries;
    result_.query_log.push_back({result_.queries, scenario_hash(e.scenario), e.rho});
    for (std::size_t g = 0; g < e.rho.size(); ++g) {
      result_.per_goal_best[g] = std::min(result_.per_goal_best[g], e.rho[g]);
      if (remaining_[g] && e.rho[g] <= 0.0) {
        remaining_[g] = false;
        --remaining_count_;
        result_.covered[result_.goals[g].id] = Witness{result_.goals[g].id, result_.queries, e.rho[g], e.scenario, e.trace};
      }
    }
  }

  const CampaignConfig& cfg_;
  const SutInterface& sut_;
  CampaignResult result_;
  std::vector<bool> remaining_;
  std::size_t remaining_count_ = 0;
};

inline Scenario fresh(const MapModel& map, const Library& lib, const CampaignConfig& cfg, Rng& rng) {
  return sample_valid(map, lib, cfg.n_objects, rng, cfg.sampler);
}

inline MutationOptions mutation_options(const CampaignConfig& cfg) {
  MutationOptions m = cfg.mutation;
  m.region = cfg.sampler.region;
  return m;
}

// Steps the seed's cell of lambda0 in the robustness-decreasing direction and
// projects it back onto the compliant set. For a type cell that direction is
// the swapped type when the swap lowered robustness, and no change otherwise.
// Empty when no compliant step exists.
inline std::optional<Scenario> step_seed(const Scenario& s0, const Seed& seed, const MapModel& map,
                                         const Library& lib, const MutationOptions& mopt, Rng& rng) {
  const CellRef c = *seed.element;
  const double cell = get_cell(s0.objects.at(c.index), c.dimension);
  if (c.dimension == Dimension::Type) {
    if (seed.gradient <= 0 || seed.value == cell) return s0;
    Scenario s = s0;
    if (detail::admissible(s, c.index, c.dimension, seed.value, cell, map, lib, mopt.region)) return s;
    return s0;
  }
  double base = c.dimension == Dimension::Rotation ? mopt.rotation_step : mopt.position_step;
  double dir = seed.gradient > 0 ? -1.0 : 1.0;
  double target = cell + dir * base * std::clamp(std::fabs(seed.gradient), 0.5, 2.0);
  if (auto s = project_cell(s0, c.index, c.dimension, target, map, lib, mopt)) return s;
  try {
    return mutate_element(s0, c.index, c.dimension, rng, map, lib, mopt).scenario;
  } catch (const MutationStuck&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// Greedy gradient-guided search. Each round executes the current scenario
/// (when new) and one single-cell mutation per object, covers every goal a
/// trace violates, keeps the steepest gradient over the remaining goals as
/// the seed, and steps the seed's cell to form the next scenario. After
/// `restart_after` rounds without a steeper gradient it restarts from a
/// fresh compliant sample with a reset seed.
inline CampaignResult trashfuzz_campaign(std::vector<ViolationGoal> goals, const CampaignConfig& cfg,
                                         const SutInterface& sut, const MapModel& map, const Library& lib) {
  detail::CampaignRun run(std::move(goals), cfg, sut);
  if (cfg.max_queries == 0) return run.take();
  Rng rng(cfg.seed);
  const MutationOptions mopt = detail::mutation_options(cfg);
  const std::size_t children = cfg.children_per_round ? cfg.children_per_round : cfg.n_objects;

  Scenario s0 = detail::fresh(map, lib, cfg, rng);
  std::optional<detail::Evaluation> e0;
  Seed seed;
  int stall = 0;
  while (!run.done()) {
    if (!e0) {
      e0 = run.run_one(s0);
      if (!e0 || run.done()) break;
    }
    if (cfg.n_objects == 0) break;

    std::vector<Scenario> batch;
    std::vector<CellRef> cells;
    for (std::size_t k = 0; k < children; ++k) {
      CellRef c{k % cfg.n_objects, static_cast<Dimension>(uniform_index(rng, 4))};
      try {
        batch.push_back(mutate_element(s0, c.index, c.dimension, rng, map, lib, mopt).scenario);
        cells.push_back(c);
      } catch (const MutationStuck&) {
      }
    }
    std::vector<bool> open(run.goal_count());
    for (std::size_t g = 0; g < open.size(); ++g) open[g] = run.remaining(g);
    auto evals = run.run(batch);

    // Children are scanned in order against the goals open at round start,
    // so a goal covered by a later child still steers earlier ones.
    bool improved = false;
    for (std::size_t k = 0; k < evals.size(); ++k) {
      if (!evals[k]) continue;
      const CellRef c = cells[k];
      const double cell0 = get_cell(s0.objects[c.index], c.dimension);
      const double cellk = get_cell(batch[k].objects[c.index], c.dimension);
      for (std::size_t g = 0; g < run.goal_count(); ++g) {
        if (!open[g]) continue;
        if (evals[k]->rho[g] <= 0.0) {
          open[g] = false;
          continue;
        }
        double G = gradient(cell0, cellk, e0->rho[g], evals[k]->rho[g], c.dimension);
        if (std::fabs(G) > std::fabs(seed.gradient)) {
          seed = Seed{G, c, cellk};
          improved = true;
        }
      }
    }
    if (run.done()) break;

    stall = improved ? 0 : stall + 1;
    std::optional<Scenario> next;
    if (stall < cfg.restart_after && seed.element) next = detail::step_seed(s0, seed, map, lib, mopt, rng);
    if (!next) {
      if (stall < cfg.restart_after && !seed.element) continue;  // keep lambda0, draw new children
      next = detail::fresh(map, lib, cfg, rng);
      seed = Seed{};
      stall = 0;
    }
    if (*next != s0) {
      s0 = std::move(*next);
      e0.reset();
    }
  }
  return run.take();
}

namespace detail {

inline double fitness(const Evaluation& e, const CampaignRun& run) {
  double f = 0.0;
  for (std::size_t g = 0; g < e.rho.size(); ++g)
    if (run.remaining(g)) f += std::max(0.0, e.rho[g]);
  return f;
}

}  // namespace detail

/// Genetic baseline: tournament selection, single-point crossover over
/// object rows, per-cell mutation followed by rule repair, and elitism.
/// Fitness is the summed positive robustness over the goals not yet covered.
inline CampaignResult ga_campaign(std::vector<ViolationGoal> goals, const CampaignConfig& cfg,
                                  const SutInterface& sut, const MapModel& map, const Library& lib) {
  detail::CampaignRun run(std::move(goals), cfg, sut);
  if (cfg.max_queries == 0) return run.take();
  Rng rng(cfg.seed);
  const GaOptions& ga = cfg.ga;
  const std::size_t P = std::max<std::size_t>(ga.population, 1);

  std::vector<Scenario> init;
  for (std::size_t i = 0; i < P; ++i) init.push_back(detail::fresh(map, lib, cfg, rng));
  std::vector<detail::Evaluation> pop;
  for (auto& e : run.run(init))
    if (e) pop.push_back(std::move(*e));

  for (std::size_t gen = 1; gen < ga.generations && !run.done() && !pop.empty(); ++gen) {
    std::vector<double> fit;
    for (const auto& e : pop) fit.push_back(detail::fitness(e, run));
    std::vector<std::size_t> order(pop.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fit[a] < fit[b]; });

    auto tournament = [&]() -> const Scenario& {
      std::size_t best = uniform_index(rng, pop.size());
      for (std::size_t t = 1; t < ga.tournament; ++t) {
        std::size_t c = uniform_index(rng, pop.size());
        if (fit[c] < fit[best]) best = c;
      }
      return pop[best].scenario;
    };

    std::vector<detail::Evaluation> next;
    for (std::size_t i = 0; i < std::min(ga.elitism, pop.size()); ++i) next.push_back(pop[order[i]]);
    std::vector<Scenario> offspring;
    while (next.size() + offspring.size() < P) {
      Scenario child = tournament();
      const Scenario& other = tournament();
      std::size_t n = child.objects.size();
      if (n >= 2) {
        std::size_t cut = 1 + uniform_index(rng, n - 1);
        for (std::size_t r = cut; r < n; ++r) child.objects[r] = other.objects[r];
      }
      for (auto& o : child.objects) {
        for (int d = 0; d < 4; ++d) {
          if (uniform(rng, 0.0, 1.0) >= ga.mutation_rate) continue;
          auto dim = static_cast<Dimension>(d);
          if (dim == Dimension::Type) {
            set_cell(o, dim, static_cast<double>(uniform_index(rng, lib.size())));
          } else {
            double step = dim == Dimension::Rotation ? cfg.mutation.rotation_step : cfg.mutation.position_step;
            set_cell(o, dim, get_cell(o, dim) + uniform(rng, -step, step));
          }
        }
      }
      offspring.push_back(repair(child, map, lib, rng, cfg.sampler));
    }
    for (auto& e : run.run(offspring))
      if (e) next.push_back(std::move(*e));
    pop = std::move(next);
  }
  return run.take();
}

/// Control baseline: independent compliant samples.
inline CampaignResult random_campaign(std::vector<ViolationGoal> goals, const CampaignConfig& cfg,
                                      const SutInterface& sut, const MapModel& map, const Library& lib) {
  detail::CampaignRun run(std::move(goals), cfg, sut);
  Rng rng(cfg.seed);
  // Fixed batch size: the stopping point must not depend on the worker count.
  const std::size_t batch_size = 16;
  while (!run.done()) {
    std::vector<Scenario> batch;
    for (std::size_t i = 0; i < std::min(batch_size, run.budget_left()); ++i)
      batch.push_back(detail::fresh(map, lib, cfg, rng));
    run.run(batch);
  }
  return run.take();
}

inline CampaignResult run_campaign(std::vector<ViolationGoal> goals, const CampaignConfig& cfg,
                                   const SutInterface& sut, const MapModel& map, const Library& lib) {
  switch (cfg.engine) {
    case Engine::TrashFuzz: return trashfuzz_campaign(std::move(goals), cfg, sut, map, lib);
    case Engine::Genetic: return ga_campaign(std::move(goals), cfg, sut, map, lib);
    case Engine::Random: return random_campaign(std::move(goals), cfg, sut, map, lib);
  }
  return {};
}

/// Single-formula convenience form.
inline CampaignResult trashfuzz_campaign(const stl::Formula& spec, const CampaignConfig& cfg,
                                         const SutInterface& sut, const MapModel& map, const Library& lib) {
  return trashfuzz_campaign(decompose(spec, "goal", cfg.goal_cap).goals, cfg, sut, map, lib);
}

inline nlohmann::json to_json(const CampaignConfig& c) {
  return {{"engine", to_string(c.engine)},
          {"n_objects", c.n_objects},
          {"max_queries", c.max_queries},
          {"children_per_round", c.children_per_round},
          {"seed", c.seed},
          {"goal_cap", c.goal_cap},
          {"restart_after", c.restart_after},
          {"region",
           {{"forward_min", c.sampler.region.forward_min}, {"forward_max", c.sampler.region.forward_max},
            {"right_min", c.sampler.region.right_min}, {"right_max", c.sampler.region.right_max}}},
          {"ego_start",
           {{"x", c.sampler.route.start.x}, {"y", c.sampler.route.start.y},
            {"heading_deg", c.sampler.route.start.heading_deg}}},
          {"ego_destination", {{"x", c.sampler.route.destination.x}, {"y", c.sampler.route.destination.y}}},
          {"mutation",
           {{"position_step", c.mutation.position_step}, {"rotation_step", c.mutation.rotation_step},
            {"retries", c.mutation.retries}, {"projection_resolution", c.mutation.projection_resolution}}},
          {"ga",
           {{"population", c.ga.population}, {"generations", c.ga.generations}, {"elitism", c.ga.elitism},
            {"tournament", c.ga.tournament}, {"mutation_rate", c.ga.mutation_rate}}}};
}

/// Missing keys keep their defaults. `workers` is a runtime flag and is not
/// part of the config document.
inline CampaignConfig campaign_config_from_json(const nlohmann::json& j) {
  CampaignConfig c;
  try {
    if (j.contains("engine")) c.engine = engine_from(j["engine"].get<std::string>());
    c.n_objects = j.value("n_objects", c.n_objects);
    c.max_queries = j.value("max_queries", c.max_queries);
    c.children_per_round = j.value("children_per_round", c.children_per_round);
    c.seed = j.value("seed", c.seed);
    c.goal_cap = j.value("goal_cap", c.goal_cap);
    c.restart_after = j.value("restart_after", c.restart_after);
    if (j.contains("region")) {
      const auto& r = j["region"];
      c.sampler.region.forward_min = r.value("forward_min", c.sampler.region.forward_min);
      c.sampler.region.forward_max = r.value("forward_max", c.sampler.region.forward_max);
      c.sampler.region.right_min = r.value("right_min", c.sampler.region.right_min);
      c.sampler.region.right_max = r.value("right_max", c.sampler.region.right_max);
    }
    if (j.contains("ego_start")) {
      const auto& s = j["ego_start"];
      c.sampler.route.start = {s.at("x").get<double>(), s.at("y").get<double>(), s.value("heading_deg", 0.0)};
    }
    if (j.contains("ego_destination")) {
      const auto& d = j["ego_destination"];
      c.sampler.route.destination = {d.at("x").get<double>(), d.at("y").get<double>()};
    }
    if (j.contains("mutation")) {
      const auto& m = j["mutation"];
      c.mutation.position_step = m.value("position_step", c.mutation.position_step);
      c.mutation.rotation_step = m.value("rotation_step", c.mutation.rotation_step);
      c.mutation.retries = m.value("retries", c.mutation.retries);
      c.mutation.projection_resolution = m.value("projection_resolution", c.mutation.projection_resolution);
    }
    if (j.contains("ga")) {
      const auto& g = j["ga"];
      c.ga.population = g.value("population", c.ga.population);
      c.ga.generations = g.value("generations", c.ga.generations);
      c.ga.elitism = g.value("elitism", c.ga.elitism);
      c.ga.tournament = g.value("tournament", c.ga.tournament);
      c.ga.mutation_rate = g.value("mutation_rate", c.ga.mutation_rate);
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed campaign config: ") + e.what());
  }
  if (c.restart_after < 1) throw SchemaError("restart_after must be >= 1");
  if (!(c.mutation.projection_resolution > 0)) throw SchemaError("projection_resolution must be > 0");
  if (c.ga.tournament < 1) throw SchemaError("ga.tournament must be >= 1");
  return c;
}

/// Result document. Witness traces are not embedded; the CLI writes them next
/// to the result.
inline nlohmann::json to_json(const CampaignResult& r, const CampaignConfig& cfg) {
  nlohmann::json goals = nlohmann::json::array();
  for (std::size_t g = 0; g < r.goals.size(); ++g) {
    const auto& goal = r.goals[g];
    nlohmann::json e = {{"id", goal.id}, {"formula", stl::format(goal.formula)}, {"covered", r.is_covered(goal.id)}};
    double best = r.per_goal_best[g];
    e["best_robustness"] = std::isfinite(best) ? nlohmann::json(best) : nlohmann::json(nullptr);
    goals.push_back(std::move(e));
  }
  nlohmann::json covered = nlohmann::json::array();
  for (const auto& goal : r.goals) {
    auto it = r.covered.find(goal.id);
    if (it == r.covered.end()) continue;
    const Witness& w = it->second;
    covered.push_back({{"goal", w.goal_id},
                       {"query", w.query},
                       {"robustness", w.robustness},
                       {"scenario_hash", scenario_hash(w.scenario)},
                       {"scenario", to_json(w.scenario)}});
  }
  nlohmann::json log = nlohmann::json::array();
  for (const auto& q : r.query_log)
    log.push_back({{"query", q.query}, {"scenario_hash", q.scenario_hash}, {"robustness", q.robustness}});
  return {{"format_version", 1},
          {"engine", to_string(r.engine)},
          {"config", to_json(cfg)},
          {"queries", r.queries},
          {"goals_total", r.goals.size()},
          {"goals_covered", r.covered.size()},
          {"aborted", r.aborted},
          {"abort_reason", r.aborted ? nlohmann::json(r.abort_reason) : nlohmann::json(nullptr)},
          {"goals", goals},
          {"covered", covered},
          {"query_log", log}};
}

}  // namespace trashfuzz
