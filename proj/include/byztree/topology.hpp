#pragma once

// Perfect a-ary tree T(K, a) rooted at the fusion center. Levels are 1-based:
// level k holds a^k nodes, the fusion center itself is not counted.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "byztree/rational.hpp"

namespace byztree {

using Level = int;

class TreeShape {
 public:
  /// Throws std::domain_error unless depth >= 2 and branching >= 2, and
  /// std::overflow_error if the node count does not fit in 64 bits.
  TreeShape(int depth, int branching) : depth_(depth), branching_(branching) {
    if (depth < 2) {
      throw std::domain_error("tree depth K must be >= 2, got " + std::to_string(depth));
    }
    if (branching < 2) {
      throw std::domain_error("branching factor a must be >= 2, got " + std::to_string(branching));
    }
    populations_.reserve(static_cast<std::size_t>(depth));
    std::int64_t level_pop = 1;
    for (Level k = 1; k <= depth; ++k) {
      level_pop = checked::mul(level_pop, branching);
      populations_.push_back(level_pop);
      total_ = checked::add(total_, level_pop);
    }
    // P_K = 1, P_k = a * P_{k+1} + 1
    profits_.assign(static_cast<std::size_t>(depth), 1);
    for (Level k = depth - 1; k >= 1; --k) {
      profits_[k - 1] = checked::add(checked::mul(branching, profits_[k]), 1);
    }
  }

  int depth() const { return depth_; }
  int branching() const { return branching_; }

  std::int64_t levelPopulation(Level k) const { return populations_[index(k)]; }
  std::int64_t totalNodes() const { return total_; }

  /// Subtree size of a node at level k, itself included.
  std::int64_t profit(Level k) const { return profits_[index(k)]; }

  std::string str() const {
    return "T(" + std::to_string(depth_) + ", " + std::to_string(branching_) + ")";
  }

  friend bool operator==(const TreeShape& a, const TreeShape& b) {
    return a.depth_ == b.depth_ && a.branching_ == b.branching_;
  }

 private:
  std::size_t index(Level k) const {
    if (k < 1 || k > depth_) {
      throw std::domain_error("level " + std::to_string(k) + " outside [1, " +
                              std::to_string(depth_) + "]");
    }
    return static_cast<std::size_t>(k - 1);
  }

  int depth_;
  int branching_;
  std::int64_t total_ = 0;
  std::vector<std::int64_t> populations_;
  std::vector<std::int64_t> profits_;
};

/// Per-level cost c_k of capturing (or deploying) one node at level k.
/// Entries must be strictly positive; ordering is not enforced here.
class CostSchedule {
 public:
  CostSchedule() = default;
  explicit CostSchedule(std::vector<std::int64_t> costs) : costs_(std::move(costs)) {
    for (std::size_t i = 0; i < costs_.size(); ++i) {
      if (costs_[i] <= 0) {
        throw std::domain_error("cost c_" + std::to_string(i + 1) + " must be a positive integer");
      }
    }
  }
  CostSchedule(std::initializer_list<std::int64_t> costs)
      : CostSchedule(std::vector<std::int64_t>(costs)) {}

  int levels() const { return static_cast<int>(costs_.size()); }

  std::int64_t cost(Level k) const {
    if (k < 1 || k > levels()) {
      throw std::domain_error("cost schedule has no entry for level " + std::to_string(k));
    }
    return costs_[static_cast<std::size_t>(k - 1)];
  }

  std::span<const std::int64_t> values() const { return costs_; }

  /// c_k > c_{k+1} for k = 1..levels-1 (levels defaults to the whole schedule).
  bool isStrictlyDecreasing(int upToLevel = -1) const {
    const int last = upToLevel < 0 ? levels() : std::min(upToLevel, levels());
    for (int k = 1; k < last; ++k) {
      if (!(cost(k) > cost(k + 1))) {
        return false;
      }
    }
    return true;
  }

  friend bool operator==(const CostSchedule&, const CostSchedule&) = default;

 private:
  std::vector<std::int64_t> costs_;
};

/// beta_k = a^k / N.
inline Rational levelWeight(const TreeShape& shape, Level k) {
  return Rational(shape.levelPopulation(k), shape.totalNodes());
}

inline std::int64_t profit(const TreeShape& shape, Level k) { return shape.profit(k); }

/// Sum_{k=1..K} c_k a^k.
inline std::int64_t deploymentCost(const TreeShape& shape, const CostSchedule& sched) {
  if (sched.levels() < shape.depth()) {
    throw std::domain_error("cost schedule has " + std::to_string(sched.levels()) +
                            " levels, tree needs " + std::to_string(shape.depth()));
  }
  std::int64_t total = 0;
  for (Level k = 1; k <= shape.depth(); ++k) {
    total = checked::add(total, checked::mul(sched.cost(k), shape.levelPopulation(k)));
  }
  return total;
}

}  // namespace byztree
