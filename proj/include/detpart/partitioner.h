#pragma once

#include <cstdint>
#include <vector>

#include "detpart/config.h"
#include "detpart/hypergraph.h"
#include "detpart/io.h"
#include "detpart/types.h"

namespace detpart {

class Executor;

struct PartitionResult {
  std::vector<BlockId> assignment;
  Gain metric = 0;
  double imbalance = 0.0;
  bool balanced = false;
  int levels = 0;  // number of contractions
  PhaseTimes times;
  // "coarsening", "initial", "jet/L<level>/t<temperature>", "flows/L<level>/r<round>",
  // in execution order. Level 0 is the input hypergraph.
  std::vector<PhaseHash> phase_hashes;
};

// Full multilevel pipeline: coarsening, recursive-bipartitioning initial
// partition, then Jet (and flows if enabled) on every level while
// uncoarsening. The result depends only on the inputs, never on the number
// of threads of `exec`.
PartitionResult partition_hypergraph(const Hypergraph& hg, BlockId k, Rational epsilon, std::uint64_t seed,
                                     const Config& config, const Executor& exec);

}  // namespace detpart
