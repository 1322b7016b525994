#pragma once

// Attacker's lower-level problem: capture B_k nodes per level to maximize
// sum_k P_k B_k subject to sum_k c_k B_k <= budget and B_k <= a^k. This is a
// bounded knapsack with one item type per level.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "byztree/attack.hpp"
#include "byztree/topology.hpp"

namespace byztree {

struct AttackBudgetProblem {
  TreeShape shape;
  CostSchedule sched;
  std::int64_t budget;

  void validate() const {
    if (sched.levels() < shape.depth()) {
      throw std::domain_error("cost schedule shorter than tree depth for " + shape.str());
    }
    if (budget < 0) {
      throw std::domain_error("attacker budget must be non-negative");
    }
  }
};

struct AttackSolution {
  AttackAllocation alloc;
  Rational objective;  // covered fraction t
  std::int64_t spentCost = 0;
  bool blind = false;
};

/// Raised when exhaustive search would exceed its enumeration guard.
class SearchRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Largest useful count per level: min(a^k, floor(budget / c_k)).
inline std::vector<std::int64_t> effectiveCaps(const AttackBudgetProblem& p) {
  std::vector<std::int64_t> caps;
  caps.reserve(static_cast<std::size_t>(p.shape.depth()));
  for (Level k = 1; k <= p.shape.depth(); ++k) {
    caps.push_back(std::min(p.shape.levelPopulation(k), p.budget / p.sched.cost(k)));
  }
  return caps;
}

inline AttackSolution makeSolution(const AttackBudgetProblem& p, std::vector<std::int64_t> counts) {
  AttackAllocation alloc(p.shape, std::move(counts));
  const Rational t = coverageFraction(p.shape, alloc);
  const std::int64_t spent = alloc.cost(p.sched);
  return {std::move(alloc), t, spent, t >= Rational(1, 2)};
}

}  // namespace detail

/// Exact pseudo-polynomial DP over the budget. Each level's multiplicity is
/// split into binary chunks and the suffix tables best[k][b] (levels k..K,
/// spend at most b) are kept so the lexicographically smallest optimal
/// (B_1, ..., B_K) can be read back.
inline AttackSolution solveLLP(const AttackBudgetProblem& problem) {
  problem.validate();
  const int depth = problem.shape.depth();
  const auto caps = detail::effectiveCaps(problem);

  // Spending beyond the price of everything is pointless. The value sum bounds
  // every table entry, so checking it once keeps the inner loops unchecked.
  std::int64_t everything = 0;
  [[maybe_unused]] std::int64_t max_value = 0;
  for (Level k = 1; k <= depth; ++k) {
    everything = checked::add(everything, checked::mul(problem.sched.cost(k), caps[k - 1]));
    max_value = checked::add(max_value, checked::mul(problem.shape.profit(k), caps[k - 1]));
  }
  const std::int64_t budget = std::min(problem.budget, everything);
  const auto width = static_cast<std::size_t>(budget + 1);

  std::vector<std::vector<std::int64_t>> best(static_cast<std::size_t>(depth + 2),
                                              std::vector<std::int64_t>(width, 0));
  for (Level k = depth; k >= 1; --k) {
    auto& row = best[static_cast<std::size_t>(k)];
    row = best[static_cast<std::size_t>(k + 1)];
    const std::int64_t cost = problem.sched.cost(k);
    const std::int64_t value = problem.shape.profit(k);
    std::int64_t remaining = caps[k - 1];
    for (std::int64_t chunk = 1; remaining > 0; chunk *= 2) {
      const std::int64_t take = std::min(chunk, remaining);
      remaining -= take;
      const std::int64_t chunk_cost = take * cost;
      const std::int64_t chunk_value = take * value;
      for (std::int64_t b = budget; b >= chunk_cost; --b) {
        row[b] = std::max(row[b], row[b - chunk_cost] + chunk_value);
      }
    }
  }

  std::vector<std::int64_t> counts(static_cast<std::size_t>(depth), 0);
  std::int64_t b = budget;
  for (Level k = 1; k <= depth; ++k) {
    const std::int64_t target = best[static_cast<std::size_t>(k)][b];
    const auto& next = best[static_cast<std::size_t>(k + 1)];
    const std::int64_t cost = problem.sched.cost(k);
    const std::int64_t value = problem.shape.profit(k);
    for (std::int64_t x = 0; x <= caps[k - 1] && x * cost <= b; ++x) {
      if (x * value + next[b - x * cost] == target) {
        counts[k - 1] = x;
        b -= x * cost;
        break;
      }
    }
  }
  return detail::makeSolution(problem, std::move(counts));
}

inline constexpr double kBruteForceGuard = 1e7;

/// Exhaustive enumeration in lexicographic order of (B_1, ..., B_K); keeps the
/// first strict improvement, so ties resolve exactly as in solveLLP. The
/// enumeration space counts only budget-reachable multiplicities.
inline AttackSolution bruteForceLLP(const AttackBudgetProblem& problem) {
  problem.validate();
  const int depth = problem.shape.depth();
  const auto caps = detail::effectiveCaps(problem);
  double space = 1.0;
  for (const auto c : caps) {
    space *= static_cast<double>(c + 1);
  }
  if (space > kBruteForceGuard) {
    throw SearchRefused("exhaustive LLP search space for " + problem.shape.str() +
                        " exceeds guard (" + std::to_string(static_cast<long long>(space)) + ")");
  }

  std::vector<std::int64_t> current(static_cast<std::size_t>(depth), 0);
  std::vector<std::int64_t> best_counts = current;
  std::int64_t best_value = -1;

  const auto recurse = [&](auto&& self, Level k, std::int64_t spent, std::int64_t value) -> void {
    if (k > depth) {
      if (value > best_value) {
        best_value = value;
        best_counts = current;
      }
      return;
    }
    const std::int64_t cost = problem.sched.cost(k);
    for (std::int64_t x = 0; x <= caps[k - 1] && spent + x * cost <= problem.budget; ++x) {
      current[k - 1] = x;
      self(self, k + 1, spent + x * cost, value + x * problem.shape.profit(k));
    }
    current[k - 1] = 0;
  };
  recurse(recurse, 1, 0, 0);
  return detail::makeSolution(problem, std::move(best_counts));
}

enum class Arrangement {
  DisjointPlaceable,  // at most one Byzantine per root-to-leaf path is achievable
  ImpliesBlind,       // a level is saturated or the counts must overlap
};

/// Sum_k B_k a^{K-k}: leaves below the Byzantines, counted with multiplicity.
inline std::int64_t coveredLeafCount(const TreeShape& shape, const AttackAllocation& alloc) {
  std::int64_t leaves = 0;
  for (Level k = 1; k <= shape.depth(); ++k) {
    const std::int64_t below = checked::pow(shape.branching(), shape.depth() - k);
    leaves = checked::add(leaves, checked::mul(alloc.count(k), below));
  }
  return leaves;
}

/// Either condition forces coverage of at least half of the network.
inline Arrangement classifyArrangement(const TreeShape& shape, const AttackAllocation& alloc) {
  if (alloc.levels() != shape.depth()) {
    throw std::domain_error("allocation length does not match " + shape.str());
  }
  for (Level k = 1; k <= shape.depth(); ++k) {
    if (alloc.count(k) >= shape.levelPopulation(k)) {
      return Arrangement::ImpliesBlind;
    }
  }
  if (coveredLeafCount(shape, alloc) > shape.levelPopulation(shape.depth())) {
    return Arrangement::ImpliesBlind;
  }
  return Arrangement::DisjointPlaceable;
}

/// 2 a^K >= a (a^K - 1) / (a - 1): the leaf level alone is at least half of
/// T(K, a). Evaluated cross-multiplied in exact integers.
inline bool leafLevelCoversHalf(int branching, int depth) {
  const std::int64_t leaves = checked::pow(branching, depth);
  const std::int64_t lhs = checked::mul(checked::mul(2, leaves), branching - 1);
  const std::int64_t rhs = checked::mul(branching, leaves - 1);
  return lhs >= rhs;
}

inline const char* toString(Arrangement a) {
  return a == Arrangement::DisjointPlaceable ? "DisjointPlaceable" : "ImpliesBlind";
}

}  // namespace byztree
