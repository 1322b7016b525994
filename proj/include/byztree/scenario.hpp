#pragma once

// JSON scenario files. A scenario names a task (kld, blind, attack, design,
// simulate) plus the sections that task needs:
//
//   {
//     "task": "attack",
//     "shape": {"K": 3, "a": 2},
//     "costs": [52, 48, 24],
//     "budgets": {"attacker": 50}
//   }
//
// Every section is re-validated against the library's invariants on load and
// unknown keys are rejected.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "byztree/designer.hpp"
#include "byztree/divergence.hpp"
#include "byztree/figures.hpp"
#include "byztree/knapsack.hpp"
#include "byztree/sim.hpp"
#include "byztree/table.hpp"

namespace byztree {

/// Malformed scenario text; the message carries line and column.
class ScenarioParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed scenario that violates a named invariant.
class ScenarioInvariantError : public std::runtime_error {
 public:
  ScenarioInvariantError(std::string invariant, const std::string& detail)
      : std::runtime_error("invariant '" + invariant + "' violated: " + detail),
        invariant_(std::move(invariant)) {}
  const std::string& invariant() const { return invariant_; }

 private:
  std::string invariant_;
};

struct ScenarioOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;
  unsigned threads = 0;
};

namespace detail {

using json = nlohmann::json;

inline void rejectUnknownKeys(const json& obj, const std::set<std::string>& known,
                              const std::string& where) {
  if (!obj.is_object()) {
    throw ScenarioInvariantError(where, "expected an object");
  }
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) {
      throw ScenarioInvariantError(where, "unknown key '" + key + "'");
    }
  }
}

template <class T>
T field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) {
    throw ScenarioInvariantError(where, "missing key '" + key + "'");
  }
  try {
    if constexpr (std::is_integral_v<T>) {
      if (!obj.at(key).is_number_integer()) {
        throw ScenarioInvariantError(where + "." + key, "must be an integer");
      }
    }
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioInvariantError(where + "." + key, e.what());
  }
}

template <class Fn>
auto guarded(const std::string& invariant, Fn fn) {
  try {
    return fn();
  } catch (const std::domain_error& e) {
    throw ScenarioInvariantError(invariant, e.what());
  } catch (const std::overflow_error& e) {
    throw ScenarioInvariantError(invariant, e.what());
  }
}

inline TreeShape readShape(const json& doc) {
  if (!doc.contains("shape")) throw ScenarioInvariantError("shape", "missing section 'shape'");
  const auto& s = doc.at("shape");
  rejectUnknownKeys(s, {"K", "a"}, "shape");
  return guarded("shape", [&] {
    return TreeShape(field<int>(s, "K", "shape"), field<int>(s, "a", "shape"));
  });
}

inline SensorProfile readProfile(const json& doc) {
  if (!doc.contains("profile")) {
    return SensorProfile::identical(0.8, 0.2);
  }
  const auto& p = doc.at("profile");
  rejectUnknownKeys(p, {"pdH", "pfaH", "pdB", "pfaB"}, "profile");
  return guarded("profile", [&] {
    return SensorProfile::make(field<double>(p, "pdH", "profile"), field<double>(p, "pfaH", "profile"),
                               field<double>(p, "pdB", "profile"), field<double>(p, "pfaB", "profile"));
  });
}

inline std::optional<FlipStrategy> readStrategy(const json& doc) {
  if (!doc.contains("strategy")) return std::nullopt;
  const auto& s = doc.at("strategy");
  rejectUnknownKeys(s, {"p10", "p01"}, "strategy");
  return guarded("strategy", [&] {
    return FlipStrategy::make(field<double>(s, "p10", "strategy"), field<double>(s, "p01", "strategy"));
  });
}

inline CostSchedule readCosts(const json& doc) {
  if (!doc.contains("costs") || !doc.at("costs").is_array()) {
    throw ScenarioInvariantError("costs", "expected an array of positive integers");
  }
  std::vector<std::int64_t> costs;
  for (const auto& c : doc.at("costs")) {
    if (!c.is_number_integer()) {
      throw ScenarioInvariantError("costs", "costs must be integers");
    }
    costs.push_back(c.get<std::int64_t>());
  }
  return guarded("costs", [&] { return CostSchedule(std::move(costs)); });
}

inline AttackAllocation readAllocation(const json& doc, const TreeShape& shape) {
  if (!doc.contains("allocation") || !doc.at("allocation").is_array()) {
    throw ScenarioInvariantError("allocation", "expected an array of per-level counts");
  }
  std::vector<std::int64_t> counts;
  for (const auto& c : doc.at("allocation")) {
    if (!c.is_number_integer()) {
      throw ScenarioInvariantError("allocation", "counts must be integers");
    }
    counts.push_back(c.get<std::int64_t>());
  }
  return guarded("allocation", [&] { return AttackAllocation(shape, std::move(counts)); });
}

inline std::int64_t readBudget(const json& doc, const std::string& which) {
  if (!doc.contains("budgets")) {
    throw ScenarioInvariantError("budgets", "missing section 'budgets'");
  }
  const auto& b = doc.at("budgets");
  rejectUnknownKeys(b, {"network", "attacker"}, "budgets");
  const auto v = field<std::int64_t>(b, which, "budgets");
  if (v < 0) throw ScenarioInvariantError("budgets." + which, "must be non-negative");
  return v;
}

inline double readCoverage(const json& doc) {
  if (!doc.contains("coverage") || !doc.at("coverage").is_number()) {
    throw ScenarioInvariantError("coverage", "expected a number in [0, 1]");
  }
  const double t = doc.at("coverage").get<double>();
  if (!(t >= 0.0 && t <= 1.0)) throw ScenarioInvariantError("coverage", "must lie in [0, 1]");
  return t;
}

inline double nanIfMissing(const std::optional<double>& v) {
  return v.value_or(std::numeric_limits<double>::quiet_NaN());
}

inline ResultTable taskKld(const json& doc, std::uint64_t seed) {
  const double t = readCoverage(doc);
  const auto profile = readProfile(doc);
  auto strat = readStrategy(doc);
  if (!strat) {
    strat = guarded("profile", [&] { return minKld(t, profile).strategy; });
  }
  const auto dist = receivedDistributions(t, profile, *strat);
  ResultTable table("scenario kld", seed, {"t", "p10", "p01", "pi11", "pi10", "kld"});
  table.addRow({t, strat->p10, strat->p01, dist.pi11, dist.pi10, kld(dist)});
  return table;
}

inline ResultTable taskBlind(const json& doc, std::uint64_t seed) {
  const auto shape = readShape(doc);
  const auto alloc = readAllocation(doc, shape);
  const auto profile = readProfile(doc);
  const Rational t = coverageFraction(shape, alloc);
  // Blinding strategies only make sense for a genuine fraction.
  const double tt = std::min(t.toDouble(), 1.0);
  const auto solution = blindingStrategy(tt, profile);
  const auto strat = representative(solution);
  std::optional<double> ratio;
  if (tt > 0.0) ratio = blindingRatio(tt, profile);
  ResultTable table("scenario blind", seed,
                    {"covered_fraction", "blind", "implies_blind", "ratio", "p10", "p01"});
  table.addRow({t.toDouble(), toDoubleBool(isBlinding(shape, alloc)),
                toDoubleBool(classifyArrangement(shape, alloc) == Arrangement::ImpliesBlind),
                nanIfMissing(ratio), nanIfMissing(strat ? std::optional(strat->p10) : std::nullopt),
                nanIfMissing(strat ? std::optional(strat->p01) : std::nullopt)});
  table.setMeta("covered_fraction_exact", t.str());
  return table;
}

inline ResultTable taskAttack(const json& doc, std::uint64_t seed) {
  const auto shape = readShape(doc);
  const auto sched = readCosts(doc);
  const auto budget = readBudget(doc, "attacker");
  const auto profile = readProfile(doc);
  const AttackBudgetProblem problem{shape, sched, budget};
  const auto s = guarded("costs", [&] { return solveLLP(problem); });
  std::vector<std::string> cols = {"K", "a", "covered_fraction", "blind", "spent_cost", "min_kld"};
  for (Level k = 1; k <= shape.depth(); ++k) cols.push_back("B_" + std::to_string(k));
  ResultTable table("scenario attack", seed, cols);
  std::vector<double> row = {static_cast<double>(shape.depth()),
                             static_cast<double>(shape.branching()), s.objective.toDouble(),
                             toDoubleBool(s.blind), static_cast<double>(s.spentCost),
                             minKld(std::min(s.objective.toDouble(), 1.0), profile).value};
  for (const auto b : s.alloc.counts()) row.push_back(static_cast<double>(b));
  table.addRow(std::move(row));
  table.setMeta("covered_fraction_exact", s.objective.str());
  table.setMeta("arrangement", toString(classifyArrangement(shape, s.alloc)));
  return table;
}

inline ResultTable taskDesign(const json& doc, std::uint64_t seed, std::vector<std::string>& warnings) {
  DesignScenario scenario;
  scenario.sched = readCosts(doc);
  scenario.networkBudget = readBudget(doc, "network");
  scenario.attackerBudget = readBudget(doc, "attacker");
  if (!doc.contains("design")) throw ScenarioInvariantError("design", "missing section 'design'");
  const auto& d = doc.at("design");
  rejectUnknownKeys(d, {"aMin", "aMax", "kMin", "nMin"}, "design");
  scenario.aMin = d.contains("aMin") ? field<int>(d, "aMin", "design") : 3;
  scenario.aMax = field<int>(d, "aMax", "design");
  scenario.kMin = d.contains("kMin") ? field<int>(d, "kMin", "design") : 2;
  scenario.nMin = field<std::int64_t>(d, "nMin", "design");
  guarded("design", [&] {
    scenario.validate();
    return 0;
  });
  const auto profile = readProfile(doc);
  Algorithm1Result result;
  try {
    result = algorithm1(scenario);
  } catch (const ConfigurationError& e) {
    throw ScenarioInvariantError("costs", e.what());
  }
  warnings = result.warnings;
  ResultTable table("scenario design", seed,
                    {"feasible", "K", "a", "nodes", "deploy_cost", "covered_fraction", "min_kld"});
  if (result.outcome) {
    const auto& shape = *result.outcome;
    const auto s = solveLLP({shape, scenario.sched, scenario.attackerBudget});
    table.addRow({1.0, static_cast<double>(shape.depth()), static_cast<double>(shape.branching()),
                  static_cast<double>(shape.totalNodes()),
                  static_cast<double>(deploymentCost(shape, scenario.sched)), s.objective.toDouble(),
                  minKld(std::min(s.objective.toDouble(), 1.0), profile).value});
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    table.addRow({0.0, nan, nan, nan, nan, nan, nan});
  }
  for (const auto& w : warnings) table.setMeta("warning", w);
  return table;
}

inline ResultTable taskSimulate(const json& doc, const ScenarioOptions& opts) {
  SimConfig cfg;
  if (doc.contains("sim")) {
    const auto& s = doc.at("sim");
    rejectUnknownKeys(s, {"samples", "seed", "mode"}, "sim");
    if (s.contains("samples")) cfg.samples = field<std::int64_t>(s, "samples", "sim");
    if (s.contains("seed")) cfg.seed = field<std::uint64_t>(s, "seed", "sim");
    if (s.contains("mode")) {
      const auto mode = field<std::string>(s, "mode", "sim");
      if (mode == "fc") cfg.mode = SimMode::FcView;
      else if (mode == "tree") cfg.mode = SimMode::TreePropagation;
      else throw ScenarioInvariantError("sim.mode", "expected 'fc' or 'tree'");
    }
  }
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.samples) cfg.samples = *opts.samples;
  cfg.threads = opts.threads;
  guarded("sim", [&] {
    cfg.validate();
    return 0;
  });
  const auto profile = readProfile(doc);
  const auto strat = readStrategy(doc).value_or(FlipStrategy::fullFlip());

  double t = 0;
  EmpiricalPair emp;
  std::string command;
  if (cfg.mode == SimMode::FcView) {
    t = readCoverage(doc);
    emp = simulateFcView(t, profile, strat, cfg);
    command = "scenario simulate fc";
  } else {
    const auto shape = readShape(doc);
    const auto alloc = readAllocation(doc, shape);
    std::vector<NodeId> placement;
    try {
      placement = placeDisjoint(shape, alloc);
    } catch (const OverlappingPlacement& e) {
      throw ScenarioInvariantError("allocation", e.what());
    }
    const auto res = guarded("shape", [&] { return simulateTree(shape, placement, profile, strat, cfg); });
    t = res.coverage.toDouble();
    emp = res.dist;
    command = "scenario simulate tree";
  }
  const auto analytic = receivedDistributions(t, profile, strat);
  ResultTable table(command, cfg.seed,
                    {"t", "pi11_hat", "pi10_hat", "stderr11", "stderr10", "pi11", "pi10", "trials",
                     "kld_hat"});
  table.addRow({t, emp.pi11Hat, emp.pi10Hat, emp.stdErr11, emp.stdErr10, analytic.pi11,
                analytic.pi10, static_cast<double>(emp.trials),
                kld({emp.pi11Hat, emp.pi10Hat})});
  table.setMeta("rng", kRngAlgorithm);
  table.setMeta("samples", std::to_string(cfg.samples));
  return table;
}

}  // namespace detail

inline const std::set<std::string>& scenarioKeys() {
  static const std::set<std::string> keys = {"task",     "shape",      "profile", "strategy",
                                             "coverage", "allocation", "costs",   "budgets",
                                             "design",   "sim"};
  return keys;
}

/// Runs an already-parsed scenario document.
inline ResultTable runScenarioDocument(const nlohmann::json& doc, const ScenarioOptions& opts = {},
                                       std::vector<std::string>* warnings = nullptr) {
  detail::rejectUnknownKeys(doc, scenarioKeys(), "scenario");
  const auto task = detail::field<std::string>(doc, "task", "scenario");
  const std::uint64_t seed = opts.seed.value_or(0);
  std::vector<std::string> sink;
  auto& w = warnings ? *warnings : sink;
  if (task == "kld") return detail::taskKld(doc, seed);
  if (task == "blind") return detail::taskBlind(doc, seed);
  if (task == "attack") return detail::taskAttack(doc, seed);
  if (task == "design") return detail::taskDesign(doc, seed, w);
  if (task == "simulate") return detail::taskSimulate(doc, opts);
  throw ScenarioInvariantError("task", "unknown task '" + task +
                                           "' (expected kld, blind, attack, design, simulate)");
}

inline nlohmann::json parseScenarioText(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioParseError(e.what());
  }
}

inline ResultTable runScenarioText(const std::string& text, const ScenarioOptions& opts = {},
                                   std::vector<std::string>* warnings = nullptr) {
  return runScenarioDocument(parseScenarioText(text), opts, warnings);
}

inline ResultTable runScenario(const std::string& path, const ScenarioOptions& opts = {},
                               std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioParseError("cannot open scenario file '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  auto table = runScenarioText(buf.str(), opts, warnings);
  table.setMeta("scenario", path);
  return table;
}

}  // namespace byztree
