#pragma once

// Fusion center's upper-level problem: choose (K, a) within budget, hardware
// and node-count constraints so that the attacker's best response covers as
// few nodes as possible.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "byztree/knapsack.hpp"
#include "byztree/topology.hpp"

namespace byztree {

struct DesignScenario {
  CostSchedule sched;
  std::int64_t networkBudget = 0;
  std::int64_t attackerBudget = 0;
  int aMin = 2;
  int aMax = 2;
  int kMin = 2;
  std::int64_t nMin = 1;

  void validate() const {
    if (aMin < 2) throw std::domain_error("aMin must be >= 2");
    if (kMin < 2) throw std::domain_error("kMin must be >= 2");
    if (aMin > aMax) throw std::domain_error("aMin must not exceed aMax");
    if (nMin < 1) throw std::domain_error("nMin must be >= 1");
    if (networkBudget < 0 || attackerBudget < 0) {
      throw std::domain_error("budgets must be non-negative");
    }
  }
};

/// Chosen topology, or std::nullopt when no (K, a) satisfies the constraints.
using DesignOutcome = std::optional<TreeShape>;

/// The cost schedule ran out of levels before the search terminated.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Deployment cost of T(K, a) if representable, nullopt on 64-bit overflow
/// (which is certainly over any representable budget).
inline std::optional<std::int64_t> deploymentCostOf(int depth, int branching,
                                                    const CostSchedule& sched) {
  try {
    return deploymentCost(TreeShape(depth, branching), sched);
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
}

inline bool affordable(int depth, int branching, const CostSchedule& sched, std::int64_t budget) {
  const auto cost = deploymentCostOf(depth, branching, sched);
  return cost && *cost <= budget;
}

}  // namespace detail

struct Algorithm1Result {
  DesignOutcome outcome;
  std::vector<std::string> warnings;
};

/// Start at (kMin, aMax). For each K shrink a to the largest affordable value
/// (never growing it back), give up once a < aMin, and stop at the first K
/// whose tree has at least nMin nodes.
inline Algorithm1Result algorithm1(const DesignScenario& scenario) {
  scenario.validate();
  Algorithm1Result result;
  int depth = scenario.kMin;
  int branching = scenario.aMax;
  for (;;) {
    if (depth > scenario.sched.levels()) {
      throw ConfigurationError("cost schedule has " + std::to_string(scenario.sched.levels()) +
                               " levels but the design search reached K = " +
                               std::to_string(depth));
    }
    while (branching >= scenario.aMin &&
           !detail::affordable(depth, branching, scenario.sched, scenario.networkBudget)) {
      --branching;
    }
    if (branching < scenario.aMin) {
      break;
    }
    const TreeShape shape(depth, branching);
    if (shape.totalNodes() >= scenario.nMin) {
      result.outcome = shape;
      break;
    }
    ++depth;
  }
  if (!scenario.sched.isStrictlyDecreasing(std::min(depth, scenario.sched.levels()))) {
    result.warnings.emplace_back(
        "cost schedule is not strictly decreasing over the levels examined; "
        "optimality of the returned design is not guaranteed");
  }
  return result;
}

struct BiLevelCell {
  int depth = 0;
  int branching = 0;
  bool representable = true;  // false when T(K, a) overflows 64-bit counts
  std::int64_t deployCost = 0;
  std::int64_t nodes = 0;
  bool withinBudget = false;
  bool enoughNodes = false;
  std::optional<AttackSolution> response;

  bool feasible() const { return representable && withinBudget && enoughNodes; }
};

struct BiLevelResult {
  DesignOutcome best;
  std::optional<Rational> bestCoverage;
  std::vector<BiLevelCell> table;  // row-major: K outer, a inner
};

/// Enumerates every (K, a) in [kMin, kMax] x [aMin, aMax], solves the
/// attacker's best response on each and keeps the feasible cell with the
/// smallest covered fraction, breaking ties by smaller K then larger a.
inline BiLevelResult bruteForceBiLevel(const DesignScenario& scenario, int kMax = -1) {
  scenario.validate();
  if (kMax < 0) {
    kMax = scenario.sched.levels();
  }
  if (kMax > scenario.sched.levels()) {
    throw ConfigurationError("kMax exceeds the cost schedule length");
  }
  BiLevelResult result;
  for (int depth = scenario.kMin; depth <= kMax; ++depth) {
    for (int branching = scenario.aMin; branching <= scenario.aMax; ++branching) {
      BiLevelCell cell;
      cell.depth = depth;
      cell.branching = branching;
      try {
        const TreeShape shape(depth, branching);
        cell.nodes = shape.totalNodes();
        const auto cost = detail::deploymentCostOf(depth, branching, scenario.sched);
        cell.deployCost = cost.value_or(INT64_MAX);
        cell.withinBudget = cost && *cost <= scenario.networkBudget;
        cell.enoughNodes = cell.nodes >= scenario.nMin;
        cell.response = solveLLP({shape, scenario.sched, scenario.attackerBudget});
      } catch (const std::overflow_error&) {
        cell.representable = false;
        cell.response.reset();
      }
      result.table.push_back(std::move(cell));
    }
  }
  const BiLevelCell* chosen = nullptr;
  for (const auto& cell : result.table) {
    if (!cell.feasible() || !cell.response) {
      continue;
    }
    const Rational t = cell.response->objective;
    if (chosen == nullptr) {
      chosen = &cell;
      continue;
    }
    const Rational best_t = chosen->response->objective;
    const bool better =
        t < best_t ||
        (t == best_t && (cell.depth < chosen->depth ||
                         (cell.depth == chosen->depth && cell.branching > chosen->branching)));
    if (better) {
      chosen = &cell;
    }
  }
  if (chosen != nullptr) {
    result.best = TreeShape(chosen->depth, chosen->branching);
    result.bestCoverage = chosen->response->objective;
  }
  return result;
}

/// Smallest a in [2, aMax] whose best response leaves t < 1/2.
inline std::optional<int> computeAMin(int depth, const CostSchedule& sched,
                                      std::int64_t attackerBudget, int aMax) {
  if (depth < 2) {
    throw std::domain_error("K must be >= 2");
  }
  for (int branching = 2; branching <= aMax; ++branching) {
    const auto response = solveLLP({TreeShape(depth, branching), sched, attackerBudget});
    if (!response.blind) {
      return branching;
    }
  }
  return std::nullopt;
}

namespace detail {

inline __int128 pow128(__int128 base, int exponent) {
  __int128 out = 1;
  for (int i = 0; i < exponent; ++i) {
    if (__builtin_mul_overflow(out, base, &out)) {
      throw std::overflow_error("128-bit overflow in power");
    }
  }
  return out;
}

inline __int128 mul128(__int128 a, __int128 b) {
  __int128 out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw std::overflow_error("128-bit overflow in product");
  }
  return out;
}

}  // namespace detail

struct BranchingInequalityCheck {
  bool strictPart;     // a[(a+1)^{K-k+1} - 1] - (a+1)[a^{K-k+1} - 1] > 0
  bool nonStrictPart;  // (a+1)^{K+1}[a^{K-k+1} - 1] - a^{K+1}[(a+1)^{K-k+1} - 1] >= 0
};

/// The two integer inequalities that together make a single captured node at
/// level k cover a strictly smaller fraction of T(K, a+1) than of T(K, a).
inline BranchingInequalityCheck branchingInequalities(int a, int depth, int k) {
  if (a < 2 || k < 1 || k > depth) {
    throw std::domain_error("need a >= 2 and 1 <= k <= K");
  }
  const int span = depth - k + 1;
  const __int128 lo = a;
  const __int128 hi = a + 1;
  const __int128 lo_span = detail::pow128(lo, span) - 1;
  const __int128 hi_span = detail::pow128(hi, span) - 1;
  const __int128 strict = detail::mul128(lo, hi_span) - detail::mul128(hi, lo_span);
  const __int128 non_strict = detail::mul128(detail::pow128(hi, depth + 1), lo_span) -
                              detail::mul128(detail::pow128(lo, depth + 1), hi_span);
  return {strict > 0, non_strict >= 0};
}

}  // namespace byztree
