#include "detpart/partitioner.h"

#include <chrono>
#include <stdexcept>
#include <string>

#include "detpart/coarsening.h"
#include "detpart/flows.h"
#include "detpart/initial.h"
#include "detpart/jet.h"
#include "detpart/parallel.h"
#include "detpart/partition.h"

namespace detpart {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_audit(const Config& config, const PartitionState& state, const std::string& phase) {
  if (config.audit && !state.audit()) throw std::logic_error("audit failed after " + phase);
}

}  // namespace

PartitionResult partition_hypergraph(const Hypergraph& hg, BlockId k, Rational epsilon, std::uint64_t seed,
                                     const Config& config, const Executor& exec) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  config.validate();
  PartitionResult result;

  auto start = Clock::now();
  const std::vector<Level> levels = coarsen_to_limit(hg, k, config.coarsening, seed, exec);
  result.times.coarsening = seconds_since(start);
  result.levels = static_cast<int>(levels.size());
  Fnv1a coarse_hash;
  for (const Level& level : levels) coarse_hash.add_u64(level_hash(level));
  result.phase_hashes.push_back({"coarsening", coarse_hash.value()});

  start = Clock::now();
  const Hypergraph& coarsest = levels.empty() ? hg : levels.back().coarse;
  std::vector<BlockId> assignment =
      initial_partition(coarsest, k, epsilon, mix_seed(seed, 0x696e6974), config.initial, config.jet, exec)
          .assignment;
  result.times.initial = seconds_since(start);
  result.phase_hashes.push_back({"initial", partition_hash(assignment)});

  for (std::size_t depth = levels.size() + 1; depth-- > 0;) {
    const Hypergraph& current = depth == 0 ? hg : levels[depth - 1].coarse;
    PartitionState state(current, k, epsilon);
    state.assign(assignment, exec);
    const std::string level_tag = "L" + std::to_string(depth);

    start = Clock::now();
    const JetStats jet = jet_refine(state, config.jet, exec);
    const double jet_seconds = seconds_since(start);
    result.times.rebalance += jet.rebalance_seconds;
    result.times.jet += jet_seconds - jet.rebalance_seconds;
    for (std::size_t t = 0; t < jet.phase_hashes.size(); ++t) {
      result.phase_hashes.push_back({"jet/" + level_tag + "/t" + std::to_string(t), jet.phase_hashes[t]});
    }
    check_audit(config, state, "jet on " + level_tag);

    if (config.flows.enabled && k >= 2) {
      start = Clock::now();
      const FlowStats flows =
          schedule_kway(state, config.flows, mix_seed(seed, 0x666c6f77000000ULL + depth), exec);
      result.times.flows += seconds_since(start);
      for (std::size_t r = 0; r < flows.round_hashes.size(); ++r) {
        result.phase_hashes.push_back({"flows/" + level_tag + "/r" + std::to_string(r), flows.round_hashes[r]});
      }
      check_audit(config, state, "flows on " + level_tag);
    }

    if (depth == 0) {
      result.assignment.assign(state.assignment().begin(), state.assignment().end());
      result.metric = state.metric();
      result.imbalance = state.imbalance();
      result.balanced = state.balanced();
    } else {
      const std::vector<VertexId>& map = levels[depth - 1].fine_to_coarse;
      const Hypergraph& finer = depth == 1 ? hg : levels[depth - 2].coarse;
      std::vector<BlockId> projected(finer.num_vertices());
      exec.parallel_for(0, projected.size(), [&](std::size_t v) { projected[v] = state.block(map[v]); });
      assignment = std::move(projected);
    }
  }
  return result;
}

}  // namespace detpart
