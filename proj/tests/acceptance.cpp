// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "byztree/byztree.hpp"
#include "random_design.hpp"

using namespace byztree;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budgetSeconds;  // 0 = no runtime bound
  std::function<Outcome()> run;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

template <class Fn>
void forEachAllocation(const TreeShape& shape, Fn fn) {
  std::vector<std::int64_t> b(static_cast<std::size_t>(shape.depth()), 0);
  for (;;) {
    fn(AttackAllocation(shape, b));
    int k = 0;
    while (k < shape.depth() && b[k] == shape.levelPopulation(k + 1)) b[k++] = 0;
    if (k == shape.depth()) return;
    ++b[k];
  }
}

const std::vector<TreeShape> kSmallShapes{{2, 2}, {2, 3}, {3, 2}, {3, 3}};
const CostSchedule kSweepCosts{52, 48, 24, 16, 12, 8, 10, 6, 4};
const SensorProfile kProfile = SensorProfile::identical(0.8, 0.2);

// Blinding needs 1 - t <= t, i.e. 2 * covered >= N, checked on integers.
Outcome blindingThreshold() {
  const auto exact = ExactSensorProfile::identical(Rational(4, 5), Rational(1, 5));
  int count = 0;
  for (const auto& shape : kSmallShapes) {
    bool ok = true;
    forEachAllocation(shape, [&](const AttackAllocation& alloc) {
      std::int64_t covered = 0;
      for (int k = 1; k <= shape.depth(); ++k) covered += alloc.count(k) * shape.profit(k);
      const bool oracle = 2 * covered >= shape.totalNodes();
      const Rational t = coverageFraction(shape, alloc);
      const auto solution = blindingStrategy(std::min(t, Rational(1)), exact);
      const bool solvable = representative(solution).has_value();
      ok = ok && isBlinding(shape, alloc) == oracle && solvable == oracle &&
           (t >= Rational(1, 2)) == oracle;
      ++count;
    });
    if (!ok) return fail("mismatch on " + shape.str());
  }
  return {true, std::to_string(count) + " allocations"};
}

Outcome optimalStrategy() {
  const double t = 0.4;
  double best = INFINITY;
  int bi = -1;
  int bj = -1;
  int ties = 0;
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      const double v = kldOfAttack(t, kProfile, FlipStrategy::make(i / 100.0, j / 100.0));
      if (v < best) {
        best = v;
        bi = i;
        bj = j;
        ties = 0;
      } else if (v == best) {
        ++ties;
      }
    }
  }
  std::ostringstream os;
  os << "argmin (" << bi / 100.0 << ", " << bj / 100.0 << ") min " << best;
  if (bi != 100 || bj != 100 || ties != 0) return fail(os.str());
  if (std::abs(best - 0.028939) > 1e-5) return fail(os.str());
  return {true, os.str()};
}

Outcome dStar() {
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(0.5 * i / 49.0);
  const auto c = dStarCurve(kProfile, grid);
  std::ostringstream os;
  os << "D*(0) = " << c.front().dStar << ", D*(0.5) = " << c.back().dStar;
  if (std::abs(c.front().dStar - 0.831777) > 1e-5) return fail(os.str());
  if (c.back().dStar != 0.0) return fail(os.str());
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (!(c[i].dStar < c[i - 1].dStar)) return fail("not strictly decreasing at " + std::to_string(i));
  }
  for (std::size_t i = 1; i + 1 < c.size(); ++i) {
    if (c[i + 1].dStar - 2 * c[i].dStar + c[i - 1].dStar < -1e-9) {
      return fail("second difference below -1e-9 at " + std::to_string(i));
    }
  }
  return {true, os.str()};
}

Outcome derivatives() {
  const double h = 1e-6;
  int points = 0;
  double worst = 0;
  for (int i = 1; i <= 10; ++i) {
    const double p = i / 10.0;
    for (int j = 1; j <= 10; ++j) {
      const double eps = p * (j - 0.5) / 10.0;
      for (const double t : {0.05, 0.15, 0.25, 0.35, 0.45}) {
        for (const auto axis : {DeviatingFlip::p01, DeviatingFlip::p10}) {
          const auto f = [&](double e) {
            return kldOfAttack(t, kProfile,
                               axis == DeviatingFlip::p01 ? FlipStrategy::make(p, p - e)
                                                          : FlipStrategy::make(p - e, p));
          };
          const double fd = (f(eps + h) - f(eps - h)) / (2 * h);
          const double an = dKLDdEpsilon(t, kProfile, p, eps, axis);
          worst = std::max(worst, std::abs(an - fd) / std::abs(an));
          if (!(an > 0)) return fail("non-positive eps-derivative");
          ++points;
        }
      }
    }
    for (const double t : {0.05, 0.15, 0.25, 0.35, 0.45}) {
      const double q = (i - 0.5) / 10.0;
      const auto f = [&](double x) { return kldOfAttack(t, kProfile, FlipStrategy::make(x, x)); };
      const double fd = (f(q + h) - f(q - h)) / (2 * h);
      const double an = dKLDdP(t, kProfile, q);
      worst = std::max(worst, std::abs(an - fd) / std::abs(an));
      if (!(an < 0)) return fail("non-negative p-derivative");
      ++points;
    }
  }
  std::ostringstream os;
  os << points << " points, worst relative error " << worst;
  if (worst > 1e-6) return fail(os.str());
  return {true, os.str()};
}

Outcome llpSolver() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::int64_t> cost(1, 40);
  int instances = 0;
  for (const auto& shape : kSmallShapes) {
    std::vector<CostSchedule> schedules;
    schedules.emplace_back(std::vector<std::int64_t>(kSweepCosts.values().begin(),
                                                     kSweepCosts.values().begin() + shape.depth()));
    for (int r = 0; r < 6; ++r) {
      std::vector<std::int64_t> c;
      for (int k = 0; k < shape.depth(); ++k) c.push_back(cost(rng));
      schedules.emplace_back(c);
    }
    for (const auto& sched : schedules) {
      std::vector<std::int64_t> best(81, 0);
      forEachAllocation(shape, [&](const AttackAllocation& a) {
        const auto spent = a.cost(sched);
        std::int64_t v = 0;
        for (int k = 1; k <= shape.depth(); ++k) v += a.count(k) * shape.profit(k);
        for (auto b = spent; b <= 80; ++b) best[b] = std::max(best[b], v);
      });
      for (std::int64_t budget = 0; budget <= 80; ++budget) {
        const auto s = solveLLP({shape, sched, budget});
        if (s.objective != Rational(best[budget], shape.totalNodes())) {
          return fail("mismatch on " + shape.str() + " budget " + std::to_string(budget));
        }
        ++instances;
      }
    }
  }
  return {instances >= 2000, std::to_string(instances) + " instances, 0 mismatches"};
}

Outcome depthMonotone() {
  std::ostringstream os;
  Rational prev(-1);
  for (int depth = 2; depth <= 9; ++depth) {
    const auto t = solveLLP({TreeShape(depth, 2), kSweepCosts, 50}).objective;
    os << t << ' ';
    if (t < prev) return fail("decrease at K=" + std::to_string(depth) + ": " + os.str());
    prev = t;
  }
  return {true, "t = " + os.str()};
}

Outcome branchingMonotone() {
  std::ostringstream os;
  std::optional<Rational> prev;
  for (int a = 3; a <= 11; ++a) {
    const auto t = solveLLP({TreeShape(6, a), kSweepCosts, 50}).objective;
    os << t << ' ';
    if (t < Rational(1, 2) && prev && *prev < Rational(1, 2) && !(t < *prev)) {
      return fail("not decreasing at a=" + std::to_string(a));
    }
    prev = t;
  }
  return {true, "t = " + os.str()};
}

Outcome algorithm1Check() {
  DesignScenario fig6;
  fig6.sched = CostSchedule{52, 50, 25, 24, 16, 10, 8, 6, 5, 4};
  fig6.networkBudget = 400000;
  fig6.attackerBudget = 50;
  fig6.nMin = 1400;
  fig6.aMin = 3;
  fig6.aMax = 11;
  const auto pick = algorithm1(fig6).outcome;
  if (!pick || !(*pick == TreeShape(3, 11))) {
    return fail("reference design scenario returned " + (pick ? pick->str() : std::string("infeasible")));
  }
  const auto brute = bruteForceBiLevel(fig6, 10).best;
  if (!brute || !(*brute == *pick)) return fail("exhaustive search disagrees on the reference design scenario");

  std::mt19937_64 rng(1406);
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = testing::randomDesign(rng);
    const auto fast = algorithm1(d.scenario).outcome;
    const auto slow = bruteForceBiLevel(d.scenario, d.kMax).best;
    if (fast.has_value() != slow.has_value() || (fast && !(*fast == *slow))) {
      return fail("random scenario " + std::to_string(trial) + ": " +
                  (fast ? fast->str() : "infeasible") + " vs " + (slow ? slow->str() : "infeasible"));
    }
    solved += fast.has_value();
  }
  return {true, "T(3, 11); 100 random scenarios agree (" + std::to_string(solved) + " feasible)"};
}

Outcome appendixChecks() {
  int implied = 0;
  for (const auto& shape : kSmallShapes) {
    bool ok = true;
    forEachAllocation(shape, [&](const AttackAllocation& alloc) {
      if (classifyArrangement(shape, alloc) == Arrangement::ImpliesBlind) {
        ++implied;
        ok = ok && coverageFraction(shape, alloc) >= Rational(1, 2);
      }
    });
    if (!ok) return fail("ImpliesBlind below half coverage on " + shape.str());
  }
  int triples = 0;
  for (int a = 2; a <= 10; ++a) {
    for (int depth = 1; depth <= 10; ++depth) {
      if (!leafLevelCoversHalf(a, depth)) return fail("leaf-level inequality fails");
      for (int k = 1; k <= depth; ++k) {
        const auto r = branchingInequalities(a, depth, k);
        if (!r.strictPart || !r.nonStrictPart) return fail("branching inequality fails");
        ++triples;
      }
    }
  }
  return {true, std::to_string(implied) + " ImpliesBlind allocations, " + std::to_string(triples) +
                    " (a, K, k) triples"};
}

Outcome monteCarlo() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SimConfig cfg;
  cfg.samples = 1'000'000;
  int good = 0;
  for (int i = 0; i < 20; ++i) {
    const double t = unit(rng);
    const auto strat = FlipStrategy::make(unit(rng), unit(rng));
    cfg.seed = 100 + i;
    const auto e = simulateFcView(t, kProfile, strat, cfg);
    const auto truth = receivedDistributions(t, kProfile, strat);
    good += std::abs(e.pi11Hat - truth.pi11) < 4 * e.stdErr11 &&
            std::abs(e.pi10Hat - truth.pi10) < 4 * e.stdErr10;
  }
  if (good < 19) return fail(std::to_string(good) + "/20 within 4 sigma");

  const TreeShape shape(4, 3);
  for (const auto& counts : std::vector<std::vector<std::int64_t>>{{1, 0, 0, 0}, {0, 2, 3, 10}}) {
    const AttackAllocation alloc(shape, counts);
    const auto strat = FlipStrategy::make(0.9, 0.6);
    SimConfig tc;
    tc.samples = 20'000;
    tc.seed = 77;
    const auto tree = simulateTree(shape, placeDisjoint(shape, alloc), kProfile, strat, tc);
    if (tree.coverage != coverageFraction(shape, alloc)) return fail("structural coverage mismatch");
    cfg.seed = 78;
    const auto fc = simulateFcView(tree.coverage.toDouble(), kProfile, strat, cfg);
    if (std::abs(tree.dist.pi11Hat - fc.pi11Hat) > 4 * std::hypot(tree.dist.stdErr11, fc.stdErr11) ||
        std::abs(tree.dist.pi10Hat - fc.pi10Hat) > 4 * std::hypot(tree.dist.stdErr10, fc.stdErr10)) {
      return fail("tree propagation differs from the fusion-center view");
    }
  }

  const auto once = [] {
    ScenarioOptions opts;
    opts.seed = 31337;
    opts.samples = 1'000'000;
    return toString(runScenarioText(R"({"task": "simulate", "coverage": 0.37,
        "strategy": {"p10": 0.6, "p01": 0.9}})", opts));
  };
  if (once() != once()) return fail("fixed-seed reruns differ");
  return {true, std::to_string(good) + "/20 within 4 sigma; tree matches FC view; reruns identical"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "blinding threshold is exactly t >= 1/2", 5, blindingThreshold},
      {2, "full flip is the unique grid argmin at t = 0.4", 5, optimalStrategy},
      {3, "D* curve endpoints, monotone and convex", 0, dStar},
      {4, "analytic derivatives and their signs", 0, derivatives},
      {5, "knapsack DP matches exhaustive search", 0, llpSolver},
      {6, "covered fraction non-decreasing in depth", 0, depthMonotone},
      {7, "covered fraction decreasing in branching", 0, branchingMonotone},
      {8, "Algorithm 1 picks the robust design", 60, algorithm1Check},
      {9, "overlap implies blinding; branching inequalities", 0, appendixChecks},
      {10, "Monte Carlo agrees with the analytic model", 0, monteCarlo},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && c.budgetSeconds > 0 && secs > c.budgetSeconds) {
      o = fail("took " + std::to_string(secs) + " s, limit " + std::to_string(c.budgetSeconds) + " s");
    }
    failed += !o.pass;
    std::printf("%s  criterion %2d  %-50s %7.2f s  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
