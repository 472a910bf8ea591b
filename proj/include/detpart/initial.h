#pragma once

#include <cstdint>
#include <vector>

#include "detpart/config.h"
#include "detpart/hypergraph.h"
#include "detpart/partition.h"
#include "detpart/types.h"

namespace detpart {

class Executor;

struct BipartitionAttempt {
  int seed_index = 0;
  std::vector<BlockId> assignment;
  Gain metric = 0;
  bool balanced = false;
  // Heaviest block relative to its perfect weight, as a fraction.
  Weight heaviest_weight = 0;
  Weight heaviest_perfect = 1;
};

// Balanced attempts first, then (metric, imbalance, seed index).
bool better_attempt(const BipartitionAttempt& a, const BipartitionAttempt& b);

struct BipartitionTargets {
  Weight perfect[2];
  Weight max[2];
  Rational epsilon;
};

// Greedy hypergraph growing of block 0 from a seeded start vertex; every
// other vertex starts in block 1.
std::vector<BlockId> greedy_growing(const Hypergraph& hg, const BipartitionTargets& targets, std::uint64_t seed);

// Runs the whole portfolio (growing + one 2-way Jet pass at tau = 0) and
// returns all attempts in seed order.
std::vector<BipartitionAttempt> bipartition_portfolio(const Hypergraph& hg, const BipartitionTargets& targets,
                                                      std::uint64_t seed, const InitialConfig& config,
                                                      const JetConfig& jet, const Executor& exec);

// Tolerance for each bipartitioning step: (1 + eps)^(1 / ceil(log2 k)) - 1.
double recursive_epsilon(Rational epsilon, BlockId k);

struct InitialPartition {
  std::vector<BlockId> assignment;
  bool balanced = false;
};

// Recursive bipartitioning of the coarsest hypergraph into k blocks.
InitialPartition initial_partition(const Hypergraph& hg, BlockId k, Rational epsilon, std::uint64_t seed,
                                   const InitialConfig& config, const JetConfig& jet, const Executor& exec);

}  // namespace detpart
