#pragma once

// KLD engine: received-bit distributions at the fusion center, their
// Kullback-Leibler divergence (natural log), analytic derivatives along the
// two deviation directions used in the optimality argument, the optimal
// attack and the D*(t) curve.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "byztree/attack.hpp"

namespace byztree {

/// pi11 = P(z = 1 | H1), pi10 = P(z = 1 | H0).
template <class Scalar>
struct BasicBitDistributionPair {
  Scalar pi11;
  Scalar pi10;

  Scalar pi01() const { return Scalar(1) - pi11; }
  Scalar pi00() const { return Scalar(1) - pi10; }

  friend bool operator==(const BasicBitDistributionPair&, const BasicBitDistributionPair&) = default;
};

using BitDistributionPair = BasicBitDistributionPair<double>;
using ExactBitDistributionPair = BasicBitDistributionPair<Rational>;

/// A covered bit goes through a Byzantine, an uncovered one arrives untouched:
///   P(z=1|H_h) = t [p10 (1 - p_h^B) + p11 p_h^B] + (1 - t) p_h^H
/// with p_h the detection probability under H1 and the false-alarm
/// probability under H0.
template <class Scalar>
BasicBitDistributionPair<Scalar> receivedDistributions(const Scalar& t,
                                                       const BasicSensorProfile<Scalar>& profile,
                                                       const BasicFlipStrategy<Scalar>& strat) {
  if (!(t >= Scalar(0) && t <= Scalar(1))) {
    throw std::domain_error("covered fraction t must lie in [0, 1]");
  }
  const Scalar one(1);
  const auto received = [&](const Scalar& pB, const Scalar& pH) {
    return t * (strat.p10 * (one - pB) + strat.p11() * pB) + (one - t) * pH;
  };
  return {received(profile.pdB, profile.pdH), received(profile.pfaB, profile.pfaH)};
}

namespace detail {

inline double relativeEntropyTerm(double p, double q) {
  if (p == 0.0) {
    return 0.0;
  }
  if (q == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return p * std::log(p / q);
}

}  // namespace detail

/// D(pi_{.,1} || pi_{.,0}) over the binary alphabet. Uses 0 log(0/q) = 0 and
/// returns +infinity when some outcome has positive mass under H1 only.
inline double kld(const BitDistributionPair& dist) {
  const double d = detail::relativeEntropyTerm(dist.pi11, dist.pi10) +
                   detail::relativeEntropyTerm(dist.pi01(), dist.pi00());
  // Rounding can leave a tiny negative value for nearly equal inputs.
  return std::isinf(d) ? d : std::max(d, 0.0);
}

inline double kldOfAttack(double t, const SensorProfile& profile, const FlipStrategy& strat) {
  return kld(receivedDistributions(t, profile, strat));
}

/// Which transition probability carries the deviation eps away from the
/// symmetric point (p, p).
enum class DeviatingFlip {
  p01,  // (p10, p01) = (p, p - eps)
  p10,  // (p10, p01) = (p - eps, p)
};

namespace detail {

inline void requireIdentical(const SensorProfile& profile) {
  profile.validate();
  if (!profile.isIdentical()) {
    throw std::domain_error("analysis requires identical honest and Byzantine sensor profiles");
  }
}

/// dD = dD/dpi11 * d11 + dD/dpi10 * d10.
inline double kldDirectionalDerivative(const BitDistributionPair& dist, double d11, double d10) {
  const double a = dist.pi11;
  const double b = dist.pi10;
  const double d_da = std::log(a / b) - std::log((1.0 - a) / (1.0 - b));
  const double d_db = -a / b + (1.0 - a) / (1.0 - b);
  return d_da * d11 + d_db * d10;
}

}  // namespace detail

/// Analytic dD/d(eps) along (p, p - eps) or (p - eps, p).
inline double dKLDdEpsilon(double t, const SensorProfile& profile, double p, double eps,
                           DeviatingFlip axis) {
  detail::requireIdentical(profile);
  if (!(eps >= 0.0 && eps <= p && p <= 1.0)) {
    throw std::domain_error("need 0 <= eps <= p <= 1");
  }
  const double pd = profile.pdH;
  const double pfa = profile.pfaH;
  if (axis == DeviatingFlip::p01) {
    const auto dist = receivedDistributions(t, profile, FlipStrategy::make(p, p - eps));
    return detail::kldDirectionalDerivative(dist, t * pd, t * pfa);
  }
  const auto dist = receivedDistributions(t, profile, FlipStrategy::make(p - eps, p));
  return detail::kldDirectionalDerivative(dist, -t * (1.0 - pd), -t * (1.0 - pfa));
}

/// Analytic dD/dp along the symmetric line p10 = p01 = p.
inline double dKLDdP(double t, const SensorProfile& profile, double p) {
  detail::requireIdentical(profile);
  const double pd = profile.pdH;
  const double pfa = profile.pfaH;
  const auto dist = receivedDistributions(t, profile, FlipStrategy::make(p, p));
  return detail::kldDirectionalDerivative(dist, t * (1.0 - 2.0 * pd), t * (1.0 - 2.0 * pfa));
}

struct MinKldResult {
  FlipStrategy strategy;
  double value;
};

/// Attacker's optimum. Below half coverage the full flip (1, 1) is optimal;
/// from half coverage on the fusion center can be blinded outright.
inline MinKldResult minKld(double t, const SensorProfile& profile) {
  detail::requireIdentical(profile);
  if (t >= 0.5) {
    const auto solution = blindingStrategy(t, profile);
    const auto strat = representative(solution);
    if (!strat) {
      throw std::logic_error("blinding reported impossible at t >= 1/2");
    }
    return {*strat, 0.0};
  }
  const auto strat = FlipStrategy::fullFlip();
  return {strat, kldOfAttack(t, profile, strat)};
}

struct DStarPoint {
  double t;
  double dStar;
};

/// D*(t) over a sorted grid in [0, 1/2].
inline std::vector<DStarPoint> dStarCurve(const SensorProfile& profile,
                                          std::span<const double> tGrid) {
  if (!std::is_sorted(tGrid.begin(), tGrid.end())) {
    throw std::domain_error("t grid must be sorted ascending");
  }
  if (!tGrid.empty() && (tGrid.front() < 0.0 || tGrid.back() > 0.5)) {
    throw std::domain_error("t grid must lie within [0, 1/2]");
  }
  std::vector<DStarPoint> curve;
  curve.reserve(tGrid.size());
  for (const double t : tGrid) {
    curve.push_back({t, minKld(t, profile).value});
  }
  return curve;
}

}  // namespace byztree
