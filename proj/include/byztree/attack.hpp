#pragma once

// Byzantine placement accounting: covered fraction t, the blinding condition,
// and the family of flip strategies that drive the KLD to zero.
//
// Probability-valued types are templated on the scalar so the same code runs
// in double precision and in exact rational arithmetic.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "byztree/rational.hpp"
#include "byztree/topology.hpp"

namespace byztree {

/// Byzantine counts B_k per level, 0 <= B_k <= a^k. Counts on different
/// levels may overlap (share a root-to-leaf path); see classifyArrangement.
class AttackAllocation {
 public:
  AttackAllocation() = default;
  AttackAllocation(const TreeShape& shape, std::vector<std::int64_t> counts)
      : counts_(std::move(counts)) {
    if (static_cast<int>(counts_.size()) != shape.depth()) {
      throw std::domain_error("allocation has " + std::to_string(counts_.size()) +
                              " levels, " + shape.str() + " has " + std::to_string(shape.depth()));
    }
    for (Level k = 1; k <= shape.depth(); ++k) {
      const auto b = counts_[static_cast<std::size_t>(k - 1)];
      if (b < 0 || b > shape.levelPopulation(k)) {
        throw std::domain_error("B_" + std::to_string(k) + " = " + std::to_string(b) +
                                " outside [0, " + std::to_string(shape.levelPopulation(k)) + "]");
      }
    }
  }

  static AttackAllocation empty(const TreeShape& shape) {
    return {shape, std::vector<std::int64_t>(static_cast<std::size_t>(shape.depth()), 0)};
  }

  int levels() const { return static_cast<int>(counts_.size()); }
  std::int64_t count(Level k) const { return counts_.at(static_cast<std::size_t>(k - 1)); }
  const std::vector<std::int64_t>& counts() const { return counts_; }

  std::int64_t cost(const CostSchedule& sched) const {
    std::int64_t total = 0;
    for (Level k = 1; k <= levels(); ++k) {
      total = checked::add(total, checked::mul(sched.cost(k), count(k)));
    }
    return total;
  }

  friend bool operator==(const AttackAllocation&, const AttackAllocation&) = default;

 private:
  std::vector<std::int64_t> counts_;
};

template <class Scalar>
inline void requireProbability(const Scalar& p, const char* name) {
  if (!(p >= Scalar(0) && p <= Scalar(1))) {
    throw std::domain_error(std::string(name) + " must lie in [0, 1]");
  }
}

/// Local detection / false-alarm probabilities of honest (H) and Byzantine (B)
/// sensors. Both kinds must be informative: pd > pfa.
template <class Scalar>
struct BasicSensorProfile {
  Scalar pdH;
  Scalar pfaH;
  Scalar pdB;
  Scalar pfaB;

  static BasicSensorProfile make(Scalar pdH, Scalar pfaH, Scalar pdB, Scalar pfaB) {
    BasicSensorProfile p{pdH, pfaH, pdB, pfaB};
    p.validate();
    return p;
  }

  static BasicSensorProfile identical(Scalar pd, Scalar pfa) { return make(pd, pfa, pd, pfa); }

  void validate() const {
    requireProbability(pdH, "pdH");
    requireProbability(pfaH, "pfaH");
    requireProbability(pdB, "pdB");
    requireProbability(pfaB, "pfaB");
    if (!(pdH > pfaH)) {
      throw std::domain_error("honest sensor must be informative (pdH > pfaH)");
    }
    if (!(pdB > pfaB)) {
      throw std::domain_error("Byzantine sensor must be informative (pdB > pfaB)");
    }
  }

  bool isIdentical() const { return pdH == pdB && pfaH == pfaB; }

  friend bool operator==(const BasicSensorProfile&, const BasicSensorProfile&) = default;
};

/// Byzantine transition probabilities: p10 = P(send 1 | saw 0),
/// p01 = P(send 0 | saw 1). Honest behaviour is (0, 0).
template <class Scalar>
struct BasicFlipStrategy {
  Scalar p10;
  Scalar p01;

  static BasicFlipStrategy make(Scalar p10, Scalar p01) {
    requireProbability(p10, "p10");
    requireProbability(p01, "p01");
    return {p10, p01};
  }

  static BasicFlipStrategy honest() { return {Scalar(0), Scalar(0)}; }
  static BasicFlipStrategy fullFlip() { return {Scalar(1), Scalar(1)}; }

  Scalar p11() const { return Scalar(1) - p01; }
  Scalar p00() const { return Scalar(1) - p10; }

  friend bool operator==(const BasicFlipStrategy&, const BasicFlipStrategy&) = default;
};

using SensorProfile = BasicSensorProfile<double>;
using FlipStrategy = BasicFlipStrategy<double>;
using ExactSensorProfile = BasicSensorProfile<Rational>;
using ExactFlipStrategy = BasicFlipStrategy<Rational>;

/// t = sum_k P_k B_k / N. Not clamped: overlapping allocations may exceed 1.
inline Rational coverageFraction(const TreeShape& shape, const AttackAllocation& alloc) {
  if (alloc.levels() != shape.depth()) {
    throw std::domain_error("allocation length does not match " + shape.str());
  }
  std::int64_t covered = 0;
  for (Level k = 1; k <= shape.depth(); ++k) {
    covered = checked::add(covered, checked::mul(shape.profit(k), alloc.count(k)));
  }
  return {covered, shape.totalNodes()};
}

/// The fusion center can be blinded iff at least half of the nodes are covered.
inline bool isBlinding(const TreeShape& shape, const AttackAllocation& alloc) {
  return coverageFraction(shape, alloc) >= Rational(1, 2);
}

namespace blinding {

struct Impossible {
  friend bool operator==(const Impossible&, const Impossible&) = default;
};

template <class Scalar>
struct Unique {
  BasicFlipStrategy<Scalar> strategy;
  friend bool operator==(const Unique&, const Unique&) = default;
};

/// All (p10, p01) with p10 + p01 - 1 = ratio and ratio <= p10 <= 1.
template <class Scalar>
struct Family {
  Scalar ratio;
  BasicFlipStrategy<Scalar> canonical;

  /// Member of the family selected by its p10 coordinate.
  BasicFlipStrategy<Scalar> member(Scalar p10) const {
    if (!(p10 >= ratio && p10 <= Scalar(1))) {
      throw std::domain_error("p10 outside the blinding family's range [r, 1]");
    }
    return BasicFlipStrategy<Scalar>::make(p10, Scalar(1) + ratio - p10);
  }

  friend bool operator==(const Family&, const Family&) = default;
};

}  // namespace blinding

template <class Scalar>
using BasicBlindingSolution =
    std::variant<blinding::Impossible, blinding::Unique<Scalar>, blinding::Family<Scalar>>;

using BlindingSolution = BasicBlindingSolution<double>;
using ExactBlindingSolution = BasicBlindingSolution<Rational>;

/// r = ((1 - t) / t) * (pdH - pfaH) / (pdB - pfaB); the value P_{0,1} - P_{0,0}
/// needed to equalize the received-bit distributions under both hypotheses.
template <class Scalar>
Scalar blindingRatio(const Scalar& t, const BasicSensorProfile<Scalar>& profile) {
  return ((Scalar(1) - t) / t) * ((profile.pdH - profile.pfaH) / (profile.pdB - profile.pfaB));
}

/// Strategies that make the KLD at the fusion center exactly zero for covered
/// fraction t. The canonical family member is the maximal zero-flipper p10 = 1.
template <class Scalar>
BasicBlindingSolution<Scalar> blindingStrategy(const Scalar& t,
                                               const BasicSensorProfile<Scalar>& profile) {
  profile.validate();
  if (!(t >= Scalar(0) && t <= Scalar(1))) {
    throw std::domain_error("covered fraction t must lie in [0, 1]");
  }
  if (t == Scalar(0)) {
    return blinding::Impossible{};
  }
  const Scalar r = blindingRatio(t, profile);
  if (r > Scalar(1)) {
    return blinding::Impossible{};
  }
  if (r == Scalar(1)) {
    return blinding::Unique<Scalar>{BasicFlipStrategy<Scalar>::fullFlip()};
  }
  return blinding::Family<Scalar>{r, BasicFlipStrategy<Scalar>::make(Scalar(1), r)};
}

/// Representative strategy of a solution, or nothing when blinding is impossible.
template <class Scalar>
std::optional<BasicFlipStrategy<Scalar>> representative(const BasicBlindingSolution<Scalar>& s) {
  if (const auto* u = std::get_if<blinding::Unique<Scalar>>(&s)) {
    return u->strategy;
  }
  if (const auto* f = std::get_if<blinding::Family<Scalar>>(&s)) {
    return f->canonical;
  }
  return std::nullopt;
}

}  // namespace byztree
