#pragma once

// Monte Carlo validation of the received-bit model.
//
// Sampling is split into fixed-size chunks; chunk i draws from an
// mt19937_64 engine seeded with splitmix64(seed, i). Results therefore depend
// only on (seed, samples), never on the number of worker threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "byztree/attack.hpp"
#include "byztree/knapsack.hpp"

namespace byztree {

inline constexpr const char* kRngAlgorithm = "mt19937_64/splitmix64-chunk-seeded";

enum class SimMode { FcView, TreePropagation };

struct SimConfig {
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  SimMode mode = SimMode::FcView;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const {
    if (samples < 1) {
      throw std::domain_error("samples must be >= 1");
    }
  }
};

struct EmpiricalPair {
  double pi11Hat = 0;
  double pi10Hat = 0;
  double stdErr11 = 0;
  double stdErr10 = 0;
  std::int64_t trials = 0;  // bits tallied per hypothesis
};

struct NodeId {
  Level level;
  std::int64_t index;  // 0-based position within the level

  friend bool operator==(const NodeId&, const NodeId&) = default;
};

/// A placement puts two Byzantines on one root-to-leaf path.
class OverlappingPlacement : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TreeSimResult {
  EmpiricalPair dist;
  Rational coverage;  // structural count of covered nodes over N
};

namespace detail {

inline constexpr std::int64_t kChunk = 1 << 16;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 chunkEngine(std::uint64_t seed, std::int64_t chunk) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(chunk))));
}

/// Uniform in [0, 1) from the top 53 bits; independent of the standard
/// library's distribution implementation.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(std::mt19937_64& rng, double p) { return uniform01(rng) < p; }

/// Byzantine transition: a seen 1 is forwarded as 1 w.p. 1 - p01, a seen 0 w.p. p10.
inline bool forward(std::mt19937_64& rng, bool bit, const FlipStrategy& strat) {
  return bit ? !bernoulli(rng, strat.p01) : bernoulli(rng, strat.p10);
}

struct Tally {
  std::int64_t ones1 = 0;  // z = 1 under H1
  std::int64_t ones0 = 0;  // z = 1 under H0
  std::int64_t trials = 0;
};

/// Runs body(chunkIndex, firstItem, itemCount) over all chunks and sums tallies.
inline Tally runChunks(std::int64_t items, unsigned threads,
                       const std::function<Tally(std::int64_t, std::int64_t, std::int64_t)>& body) {
  const std::int64_t chunks = (items + kChunk - 1) / kChunk;
  unsigned workers = threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, chunks));
  std::vector<Tally> partial(static_cast<std::size_t>(chunks));
  const auto work = [&](unsigned w) {
    for (std::int64_t c = w; c < chunks; c += workers) {
      const std::int64_t first = c * kChunk;
      partial[static_cast<std::size_t>(c)] = body(c, first, std::min(kChunk, items - first));
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back(work, w);
    }
    for (auto& th : pool) {
      th.join();
    }
  }
  Tally total;
  for (const auto& p : partial) {
    total.ones1 += p.ones1;
    total.ones0 += p.ones0;
    total.trials += p.trials;
  }
  return total;
}

inline EmpiricalPair summarize(const Tally& tally) {
  EmpiricalPair out;
  const auto n = static_cast<double>(tally.trials);
  out.trials = tally.trials;
  out.pi11Hat = static_cast<double>(tally.ones1) / n;
  out.pi10Hat = static_cast<double>(tally.ones0) / n;
  out.stdErr11 = std::sqrt(out.pi11Hat * (1.0 - out.pi11Hat) / n);
  out.stdErr10 = std::sqrt(out.pi10Hat * (1.0 - out.pi10Hat) / n);
  return out;
}

}  // namespace detail

/// The fusion center's probabilistic view: each received bit is covered with
/// probability t, in which case it stems from a Byzantine sensor and passes
/// through the flip strategy.
inline EmpiricalPair simulateFcView(double t, const SensorProfile& profile,
                                    const FlipStrategy& strat, const SimConfig& cfg) {
  cfg.validate();
  profile.validate();
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::domain_error("covered fraction t must lie in [0, 1]");
  }
  const auto body = [&](std::int64_t chunk, std::int64_t, std::int64_t count) {
    auto rng = detail::chunkEngine(cfg.seed, chunk);
    detail::Tally tally;
    for (std::int64_t i = 0; i < count; ++i) {
      for (const bool h1 : {true, false}) {
        const bool covered = detail::bernoulli(rng, t);
        const double p = h1 ? (covered ? profile.pdB : profile.pdH)
                            : (covered ? profile.pfaB : profile.pfaH);
        bool bit = detail::bernoulli(rng, p);
        if (covered) {
          bit = detail::forward(rng, bit, strat);
        }
        (h1 ? tally.ones1 : tally.ones0) += bit ? 1 : 0;
      }
    }
    tally.trials = count;
    return tally;
  };
  return detail::summarize(detail::runChunks(cfg.samples, cfg.threads, body));
}

/// Places the counts of alloc so that no root-to-leaf path holds two
/// Byzantines: level by level, each block starts right after the leaves
/// already claimed by shallower Byzantines.
inline std::vector<NodeId> placeDisjoint(const TreeShape& shape, const AttackAllocation& alloc) {
  if (coveredLeafCount(shape, alloc) > shape.levelPopulation(shape.depth())) {
    throw OverlappingPlacement("allocation cannot be placed path-disjointly (" +
                               std::string(toString(Arrangement::ImpliesBlind)) + ")");
  }
  std::vector<NodeId> nodes;
  std::int64_t claimed_leaves = 0;
  for (Level k = 1; k <= shape.depth(); ++k) {
    const std::int64_t leaves_each = checked::pow(shape.branching(), shape.depth() - k);
    const std::int64_t start = claimed_leaves / leaves_each;
    for (std::int64_t i = 0; i < alloc.count(k); ++i) {
      nodes.push_back({k, start + i});
    }
    claimed_leaves += alloc.count(k) * leaves_each;
  }
  return nodes;
}

inline constexpr std::int64_t kMaxSimulatedNodes = 10'000'000;

/// Materializes T(K, a) and propagates every node's bit to the fusion center
/// for cfg.samples rounds. A Byzantine applies its strategy to its own bit
/// and to every bit it forwards; honest sensors use the honest profile, the
/// Byzantine itself the Byzantine profile.
inline TreeSimResult simulateTree(const TreeShape& shape, const std::vector<NodeId>& placement,
                                  const SensorProfile& profile, const FlipStrategy& strat,
                                  const SimConfig& cfg) {
  cfg.validate();
  profile.validate();
  if (shape.totalNodes() > kMaxSimulatedNodes) {
    throw std::domain_error(shape.str() + " is too large to materialize");
  }
  enum : std::uint8_t { kHonest = 0, kCovered = 1, kByzantine = 2 };
  // Flattened level-major: level k occupies [offset[k], offset[k] + a^k).
  std::vector<std::int64_t> offset(static_cast<std::size_t>(shape.depth() + 2), 0);
  for (Level k = 1; k <= shape.depth(); ++k) {
    offset[k + 1] = offset[k] + shape.levelPopulation(k);
  }
  std::vector<std::uint8_t> role(static_cast<std::size_t>(shape.totalNodes()), kHonest);
  for (const auto& node : placement) {
    if (node.level < 1 || node.level > shape.depth() || node.index < 0 ||
        node.index >= shape.levelPopulation(node.level)) {
      throw std::domain_error("placement references a node outside " + shape.str());
    }
    std::int64_t lo = node.index;
    std::int64_t width = 1;
    for (Level j = node.level; j <= shape.depth(); ++j) {
      for (std::int64_t i = lo; i < lo + width; ++i) {
        auto& r = role[static_cast<std::size_t>(offset[j] + i)];
        if (r != kHonest) {
          throw OverlappingPlacement(
              "two Byzantines share a root-to-leaf path; the counts are " +
              std::string(toString(Arrangement::ImpliesBlind)) + " in the overlap analysis");
        }
        r = (j == node.level) ? kByzantine : kCovered;
      }
      lo *= shape.branching();
      width *= shape.branching();
    }
  }
  const auto covered_nodes = static_cast<std::int64_t>(
      std::count_if(role.begin(), role.end(), [](std::uint8_t r) { return r != kHonest; }));

  const auto body = [&](std::int64_t chunk, std::int64_t, std::int64_t rounds) {
    auto rng = detail::chunkEngine(cfg.seed, chunk);
    detail::Tally tally;
    for (std::int64_t round = 0; round < rounds; ++round) {
      for (const bool h1 : {true, false}) {
        std::int64_t ones = 0;
        for (const auto r : role) {
          const bool byz = r == kByzantine;
          const double p = h1 ? (byz ? profile.pdB : profile.pdH) : (byz ? profile.pfaB : profile.pfaH);
          bool bit = detail::bernoulli(rng, p);
          if (r != kHonest) {
            bit = detail::forward(rng, bit, strat);
          }
          ones += bit ? 1 : 0;
        }
        (h1 ? tally.ones1 : tally.ones0) += ones;
      }
    }
    tally.trials = rounds * static_cast<std::int64_t>(role.size());
    return tally;
  };
  TreeSimResult result;
  result.dist = detail::summarize(detail::runChunks(cfg.samples, cfg.threads, body));
  result.coverage = Rational(covered_nodes, shape.totalNodes());
  return result;
}

}  // namespace byztree
