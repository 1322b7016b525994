#pragma once

// Experiment harness: the data grids behind the five published figures, with
// locked default parameters and typed key=value overrides.

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "byztree/designer.hpp"
#include "byztree/divergence.hpp"
#include "byztree/knapsack.hpp"
#include "byztree/table.hpp"

namespace byztree {

/// Bad command-line or override input; the message names the offending key.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class FigureId { f2, f3, f4, f5, f6 };

inline FigureId parseFigureId(const std::string& id) {
  static const std::map<std::string, FigureId> ids = {
      {"f2", FigureId::f2}, {"f3", FigureId::f3}, {"f4", FigureId::f4},
      {"f5", FigureId::f5}, {"f6", FigureId::f6}};
  const auto it = ids.find(id);
  if (it == ids.end()) {
    throw UsageError("unknown figure '" + id + "' (expected f2..f6)");
  }
  return it->second;
}

inline const char* toString(FigureId id) {
  switch (id) {
    case FigureId::f2: return "f2";
    case FigureId::f3: return "f3";
    case FigureId::f4: return "f4";
    case FigureId::f5: return "f5";
    case FigureId::f6: return "f6";
  }
  return "?";
}

struct FigureDefaults {
  // f2, f3
  double pd = 0.8;
  double pfa = 0.2;
  double f2Coverage = 0.4;
  int f2Steps = 101;
  int f3Points = 51;
  // f4, f5
  std::vector<std::int64_t> sweepCosts{52, 48, 24, 16, 12, 8, 10, 6, 4};
  std::int64_t sweepBudget = 50;
  int f4Branching = 2;
  int f4DepthFrom = 2;
  int f4DepthTo = 9;
  int f5Depth = 6;
  int f5BranchingFrom = 3;
  int f5BranchingTo = 11;
  // f6
  std::vector<std::int64_t> designCosts{52, 50, 25, 24, 16, 10, 8, 6, 5, 4};
  std::int64_t networkBudget = 400000;
  std::int64_t attackerBudget = 50;
  std::int64_t nMin = 1400;
  int kMin = 2;
  int kMax = 10;
  int aMin = 3;
  int aMax = 11;
};

/// Canonical text form of the defaults; its hash guards against drift.
inline std::string fingerprint(const FigureDefaults& d) {
  std::ostringstream os;
  const auto list = [&](const std::vector<std::int64_t>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  };
  os << "pd=" << formatCell(d.pd) << ";pfa=" << formatCell(d.pfa)
     << ";f2t=" << formatCell(d.f2Coverage) << ";f2steps=" << d.f2Steps
     << ";f3points=" << d.f3Points << ";sweepcosts=";
  list(d.sweepCosts);
  os << ";sweepbudget=" << d.sweepBudget << ";f4a=" << d.f4Branching << ";f4K=" << d.f4DepthFrom
     << ".." << d.f4DepthTo << ";f5K=" << d.f5Depth << ";f5a=" << d.f5BranchingFrom << ".."
     << d.f5BranchingTo << ";designcosts=";
  list(d.designCosts);
  os << ";netbudget=" << d.networkBudget << ";attbudget=" << d.attackerBudget
     << ";nmin=" << d.nMin << ";K=" << d.kMin << ".." << d.kMax << ";a=" << d.aMin << ".."
     << d.aMax;
  return os.str();
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

using Overrides = std::map<std::string, std::string>;

namespace detail {

inline double parseDouble(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw UsageError("override '" + key + "': '" + text + "' is not a number");
  }
  return v;
}

inline std::int64_t parseInt(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw UsageError("override '" + key + "': '" + text + "' is not an integer");
  }
  return v;
}

inline std::vector<std::int64_t> parseIntList(const std::string& key, const std::string& text) {
  std::vector<std::int64_t> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    out.push_back(parseInt(key, item));
  }
  if (out.empty()) {
    throw UsageError("override '" + key + "' needs a comma-separated integer list");
  }
  return out;
}

inline int toInt(const std::string& key, std::int64_t v) {
  if (v < INT32_MIN || v > INT32_MAX) {
    throw UsageError("override '" + key + "' out of range");
  }
  return static_cast<int>(v);
}

/// Applies overrides valid for one figure; anything else is a usage error.
inline FigureDefaults applyOverrides(FigureId id, const Overrides& overrides) {
  FigureDefaults d;
  for (const auto& [key, value] : overrides) {
    bool ok = true;
    switch (id) {
      case FigureId::f2:
        if (key == "pd") d.pd = parseDouble(key, value);
        else if (key == "pfa") d.pfa = parseDouble(key, value);
        else if (key == "t") d.f2Coverage = parseDouble(key, value);
        else if (key == "steps") d.f2Steps = toInt(key, parseInt(key, value));
        else ok = false;
        break;
      case FigureId::f3:
        if (key == "pd") d.pd = parseDouble(key, value);
        else if (key == "pfa") d.pfa = parseDouble(key, value);
        else if (key == "points") d.f3Points = toInt(key, parseInt(key, value));
        else ok = false;
        break;
      case FigureId::f4:
        if (key == "costs") d.sweepCosts = parseIntList(key, value);
        else if (key == "budget") d.sweepBudget = parseInt(key, value);
        else if (key == "a") d.f4Branching = toInt(key, parseInt(key, value));
        else if (key == "kfrom") d.f4DepthFrom = toInt(key, parseInt(key, value));
        else if (key == "kto") d.f4DepthTo = toInt(key, parseInt(key, value));
        else ok = false;
        break;
      case FigureId::f5:
        if (key == "costs") d.sweepCosts = parseIntList(key, value);
        else if (key == "budget") d.sweepBudget = parseInt(key, value);
        else if (key == "K") d.f5Depth = toInt(key, parseInt(key, value));
        else if (key == "afrom") d.f5BranchingFrom = toInt(key, parseInt(key, value));
        else if (key == "ato") d.f5BranchingTo = toInt(key, parseInt(key, value));
        else ok = false;
        break;
      case FigureId::f6:
        if (key == "pd") d.pd = parseDouble(key, value);
        else if (key == "pfa") d.pfa = parseDouble(key, value);
        else if (key == "costs") d.designCosts = parseIntList(key, value);
        else if (key == "network_budget") d.networkBudget = parseInt(key, value);
        else if (key == "attacker_budget") d.attackerBudget = parseInt(key, value);
        else if (key == "nmin") d.nMin = parseInt(key, value);
        else if (key == "kmin") d.kMin = toInt(key, parseInt(key, value));
        else if (key == "kmax") d.kMax = toInt(key, parseInt(key, value));
        else if (key == "amin") d.aMin = toInt(key, parseInt(key, value));
        else if (key == "amax") d.aMax = toInt(key, parseInt(key, value));
        else ok = false;
        break;
    }
    if (!ok) {
      throw UsageError("unknown override key '" + key + "' for figure " + toString(id));
    }
  }
  return d;
}

/// Runs fn(i) for i in [0, n) on a bounded pool; each index is owned by one worker.
template <class Fn>
void parallelFor(std::size_t n, Fn fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1U, std::thread::hardware_concurrency()), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline double toDoubleBool(bool b) { return b ? 1.0 : 0.0; }

}  // namespace detail

/// KLD over the (p10, p01) unit square at fixed coverage.
inline ResultTable figureKldSurface(const FigureDefaults& d, std::uint64_t seed = 0) {
  const auto profile = SensorProfile::identical(d.pd, d.pfa);
  if (d.f2Steps < 2) throw UsageError("override 'steps' must be >= 2");
  ResultTable table("figure f2", seed, {"p10", "p01", "kld"});
  const auto n = static_cast<std::size_t>(d.f2Steps);
  std::vector<std::vector<double>> rows(n * n);
  detail::parallelFor(n, [&](std::size_t i) {
    const double p10 = static_cast<double>(i) / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      const double p01 = static_cast<double>(j) / static_cast<double>(n - 1);
      rows[i * n + j] = {p10, p01,
                         kldOfAttack(d.f2Coverage, profile, FlipStrategy::make(p10, p01))};
    }
  });
  for (auto& r : rows) table.addRow(std::move(r));
  table.setMeta("t", formatCell(d.f2Coverage));
  table.setMeta("pd", formatCell(d.pd));
  table.setMeta("pfa", formatCell(d.pfa));
  return table;
}

/// Minimum KLD against covered fraction on [0, 1/2].
inline ResultTable figureDStar(const FigureDefaults& d, std::uint64_t seed = 0) {
  const auto profile = SensorProfile::identical(d.pd, d.pfa);
  if (d.f3Points < 2) throw UsageError("override 'points' must be >= 2");
  std::vector<double> grid;
  for (int i = 0; i < d.f3Points; ++i) {
    grid.push_back(0.5 * i / (d.f3Points - 1));
  }
  ResultTable table("figure f3", seed, {"t", "dstar"});
  for (const auto& pt : dStarCurve(profile, grid)) {
    table.addRow({pt.t, pt.dStar});
  }
  return table;
}

namespace detail {

inline std::vector<double> responseRow(double x, const AttackSolution& s) {
  return {x, toDouble(s.objective), toDoubleBool(s.blind), static_cast<double>(s.spentCost)};
}

}  // namespace detail

/// Attacker best-response coverage as the depth grows at fixed branching.
inline ResultTable figureCoverageVsDepth(const FigureDefaults& d, std::uint64_t seed = 0) {
  const CostSchedule sched(d.sweepCosts);
  ResultTable table("figure f4", seed, {"K", "covered_fraction", "blind", "spent_cost"});
  for (int k = d.f4DepthFrom; k <= d.f4DepthTo; ++k) {
    const auto s = solveLLP({TreeShape(k, d.f4Branching), sched, d.sweepBudget});
    table.addRow(detail::responseRow(k, s));
  }
  return table;
}

/// Attacker best-response coverage as the branching grows at fixed depth.
inline ResultTable figureCoverageVsBranching(const FigureDefaults& d, std::uint64_t seed = 0) {
  const CostSchedule sched(d.sweepCosts);
  ResultTable table("figure f5", seed, {"a", "covered_fraction", "blind", "spent_cost"});
  for (int a = d.f5BranchingFrom; a <= d.f5BranchingTo; ++a) {
    const auto s = solveLLP({TreeShape(d.f5Depth, a), sched, d.sweepBudget});
    table.addRow(detail::responseRow(a, s));
  }
  return table;
}

/// Min-KLD at the attacker's best response over the (K, a) design grid, with
/// feasibility flags, the exhaustive optimum and the Algorithm 1 pick.
inline ResultTable figureDesignSurface(const FigureDefaults& d, std::uint64_t seed = 0) {
  const auto profile = SensorProfile::identical(d.pd, d.pfa);
  DesignScenario scenario;
  scenario.sched = CostSchedule(d.designCosts);
  scenario.networkBudget = d.networkBudget;
  scenario.attackerBudget = d.attackerBudget;
  scenario.aMin = d.aMin;
  scenario.aMax = d.aMax;
  scenario.kMin = d.kMin;
  scenario.nMin = d.nMin;

  const auto brute = bruteForceBiLevel(scenario, d.kMax);
  const auto pick = algorithm1(scenario);

  ResultTable table("figure f6", seed,
                    {"K", "a", "deploy_cost", "nodes", "feasible", "covered_fraction", "min_kld",
                     "brute_force_pick", "alg1_pick"});
  for (const auto& cell : brute.table) {
    const double t = cell.response ? toDouble(cell.response->objective) : 1.0;
    const double dstar = minKld(std::min(t, 1.0), profile).value;
    const TreeShape here(cell.depth, cell.branching);
    table.addRow({static_cast<double>(cell.depth), static_cast<double>(cell.branching),
                  static_cast<double>(cell.deployCost), static_cast<double>(cell.nodes),
                  detail::toDoubleBool(cell.feasible()), t, dstar,
                  detail::toDoubleBool(brute.best && *brute.best == here),
                  detail::toDoubleBool(pick.outcome && *pick.outcome == here)});
  }
  table.setMeta("alg1", pick.outcome ? pick.outcome->str() : "infeasible");
  table.setMeta("brute_force", brute.best ? brute.best->str() : "infeasible");
  for (const auto& w : pick.warnings) table.setMeta("warning", w);
  return table;
}

inline ResultTable runFigure(FigureId id, const Overrides& overrides = {}, std::uint64_t seed = 0) {
  const auto d = detail::applyOverrides(id, overrides);
  switch (id) {
    case FigureId::f2: return figureKldSurface(d, seed);
    case FigureId::f3: return figureDStar(d, seed);
    case FigureId::f4: return figureCoverageVsDepth(d, seed);
    case FigureId::f5: return figureCoverageVsBranching(d, seed);
    case FigureId::f6: return figureDesignSurface(d, seed);
  }
  throw UsageError("unknown figure");
}

}  // namespace byztree
