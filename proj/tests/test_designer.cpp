#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "byztree/designer.hpp"
#include "random_design.hpp"

using byztree::CostSchedule;
using byztree::DesignScenario;
using byztree::Rational;
using byztree::TreeShape;

namespace {

const CostSchedule kSweepCosts{52, 48, 24, 16, 12, 8, 10, 6, 4};
const CostSchedule kDesignCosts{52, 50, 25, 24, 16, 10, 8, 6, 5, 4};

DesignScenario referenceScenario() {
  DesignScenario s;
  s.sched = kDesignCosts;
  s.networkBudget = 400000;
  s.attackerBudget = 50;
  s.nMin = 1400;
  s.kMin = 2;
  s.aMin = 3;
  s.aMax = 11;
  return s;
}

Rational bestResponse(int depth, int a) {
  return byztree::solveLLP({TreeShape(depth, a), kSweepCosts, 50}).objective;
}

}  // namespace

TEST(Algorithm1, ReferenceDesignScenario) {
  const auto r = byztree::algorithm1(referenceScenario());
  ASSERT_TRUE(r.outcome);
  EXPECT_EQ(*r.outcome, TreeShape(3, 11));
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Algorithm1, TrivialCases) {
  DesignScenario s;
  s.sched = CostSchedule{5, 4, 3};
  s.networkBudget = 1'000'000;
  s.aMin = 2;
  s.aMax = 2;
  s.nMin = 1;
  auto r = byztree::algorithm1(s);
  ASSERT_TRUE(r.outcome);
  EXPECT_EQ(*r.outcome, TreeShape(2, 2));

  s.networkBudget = 0;
  EXPECT_FALSE(byztree::algorithm1(s).outcome);
}

TEST(Algorithm1, WarnsOnNonDecreasingCosts) {
  DesignScenario s;
  s.sched = CostSchedule{5, 6, 3};
  s.networkBudget = 1'000'000;
  s.aMax = 3;
  s.nMin = 1;
  const auto r = byztree::algorithm1(s);
  EXPECT_TRUE(r.outcome);
  EXPECT_EQ(r.warnings.size(), 1U);
}

TEST(Algorithm1, ScheduleExhausted) {
  DesignScenario s;
  s.sched = CostSchedule{5, 4};
  s.networkBudget = 1'000'000;
  s.aMax = 2;
  s.nMin = 100;
  EXPECT_THROW(byztree::algorithm1(s), byztree::ConfigurationError);
}

TEST(DesignScenario, Validation) {
  DesignScenario s;
  s.sched = CostSchedule{5, 4};
  s.aMin = 4;
  s.aMax = 3;
  EXPECT_THROW(byztree::algorithm1(s), std::domain_error);
}

TEST(BruteForceBiLevel, ReferenceDesignScenario) {
  const auto r = byztree::bruteForceBiLevel(referenceScenario(), 10);
  ASSERT_TRUE(r.best);
  EXPECT_EQ(*r.best, TreeShape(3, 11));
  ASSERT_TRUE(r.bestCoverage);
  EXPECT_EQ(*r.bestCoverage, Rational(12, 1463));
  EXPECT_EQ(r.table.size(), 9U * 9U);
  // Row-major: K outer, a inner.
  EXPECT_EQ(r.table.front().depth, 2);
  EXPECT_EQ(r.table.front().branching, 3);
  EXPECT_EQ(r.table[1].branching, 4);
}

TEST(BruteForceBiLevel, TrivialCases) {
  DesignScenario s;
  s.sched = CostSchedule{5, 4, 3};
  s.networkBudget = 1'000'000;
  s.aMin = 2;
  s.aMax = 3;
  s.nMin = 1'000'000;
  EXPECT_FALSE(byztree::bruteForceBiLevel(s).best);

  // Only T(2, 2) is affordable.
  s.aMax = 2;
  s.nMin = 1;
  s.networkBudget = 26;
  const auto r = byztree::bruteForceBiLevel(s);
  ASSERT_TRUE(r.best);
  EXPECT_EQ(*r.best, TreeShape(2, 2));
}

TEST(ComputeAMin, Examples) {
  const auto a = byztree::computeAMin(6, kSweepCosts, 50, 11);
  ASSERT_TRUE(a);
  EXPECT_LE(*a, 3);
  EXPECT_EQ(*a, 2);
  EXPECT_EQ(byztree::computeAMin(4, kSweepCosts, 0, 11), 2);
  // Enough budget to take every level-1 node of any tree with a <= 5.
  EXPECT_FALSE(byztree::computeAMin(3, kSweepCosts, 52 * 5, 5));
  EXPECT_THROW(byztree::computeAMin(1, kSweepCosts, 50, 5), std::domain_error);
}

TEST(BranchingInequalities, Examples) {
  const auto a = byztree::branchingInequalities(2, 3, 1);
  EXPECT_TRUE(a.strictPart);
  EXPECT_TRUE(a.nonStrictPart);
  const auto b = byztree::branchingInequalities(3, 8, 8);
  EXPECT_TRUE(b.strictPart);
  EXPECT_TRUE(b.nonStrictPart);
  EXPECT_TRUE(byztree::branchingInequalities(2, 1, 1).strictPart);
  EXPECT_THROW(byztree::branchingInequalities(1, 3, 1), std::domain_error);
  EXPECT_THROW(byztree::branchingInequalities(2, 3, 4), std::domain_error);
}

TEST(BranchingInequalities, HoldEverywhere) {
  for (int a = 2; a <= 10; ++a) {
    for (int depth = 1; depth <= 10; ++depth) {
      for (int k = 1; k <= depth; ++k) {
        const auto r = byztree::branchingInequalities(a, depth, k);
        ASSERT_TRUE(r.strictPart) << a << ' ' << depth << ' ' << k;
        ASSERT_TRUE(r.nonStrictPart) << a << ' ' << depth << ' ' << k;
      }
    }
  }
}

// What the inequalities buy: one captured node covers a strictly smaller
// share of the network when every node gets one more child.
TEST(BranchingInequalities, SingleNodeShareShrinksWithBranching) {
  for (int a = 2; a <= 9; ++a) {
    for (int depth = 2; depth <= 7; ++depth) {
      const TreeShape lo(depth, a);
      const TreeShape hi(depth, a + 1);
      for (int k = 1; k <= depth; ++k) {
        EXPECT_GT(Rational(lo.profit(k), lo.totalNodes()), Rational(hi.profit(k), hi.totalNodes()));
      }
    }
  }
}

TEST(DesignProperties, CoverageNonDecreasingInDepth) {
  const std::vector<Rational> expected{{1, 6},    {3, 14},    {7, 30},     {15, 62},
                                       {31, 126}, {63, 254}, {127, 510}, {255, 1022}};
  std::vector<Rational> got;
  for (int depth = 2; depth <= 9; ++depth) got.push_back(bestResponse(depth, 2));
  EXPECT_EQ(got, expected);
  for (std::size_t i = 1; i < got.size(); ++i) EXPECT_GE(got[i], got[i - 1]);
}

TEST(DesignProperties, CoverageDecreasingInBranching) {
  std::vector<Rational> got;
  for (int a = 3; a <= 11; ++a) got.push_back(bestResponse(6, a));
  EXPECT_EQ(got.front(), Rational(121, 1092));
  EXPECT_EQ(got.back(), Rational(16105, 1948716));
  for (std::size_t i = 1; i < got.size(); ++i) {
    ASSERT_LT(got[i - 1], Rational(1, 2));
    EXPECT_LT(got[i], got[i - 1]) << "a=" << i + 3;
  }
}

TEST(DesignProperties, Algorithm1MatchesExhaustiveSearch) {
  std::mt19937_64 rng(1406);
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = byztree::testing::randomDesign(rng);
    const auto fast = byztree::algorithm1(d.scenario).outcome;
    const auto slow = byztree::bruteForceBiLevel(d.scenario, d.kMax).best;
    ASSERT_EQ(fast.has_value(), slow.has_value()) << "trial " << trial;
    if (fast) {
      ++solved;
      EXPECT_EQ(*fast, *slow) << "trial " << trial << ": " << fast->str() << " vs " << slow->str();
    }
  }
  EXPECT_GE(solved, 30);
}
