#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detpart/config.h"
#include "detpart/hypergraph.h"
#include "detpart/partition.h"
#include "detpart/types.h"

namespace detpart {

class Executor;

// Two-way refinement problem between blocks[0] and blocks[1]. Nodes are
// either eligible vertices (which may switch sides) or contracted terminal
// nodes holding the rest of a side. `hg` restricts every hyperedge touching
// an eligible vertex to the two blocks.
struct FlowRegion {
  BlockId blocks[2] = {kInvalidBlock, kInvalidBlock};
  Hypergraph hg;
  std::vector<VertexId> node_to_vertex;  // kInvalidVertex for contracted terminals
  std::vector<std::uint8_t> side;        // current side of every node
  std::vector<VertexId> sources;         // nodes fixed to side 0
  std::vector<VertexId> sinks;           // nodes fixed to side 1
  Weight max_weight[2] = {0, 0};
  Weight perfect_weight[2] = {1, 1};
  Weight side_weight[2] = {0, 0};
  Weight budget[2] = {0, 0};  // bound on eligible weight per side
  Gain bound = 0;             // current cut weight inside the region

  std::size_t num_eligible() const { return hg.num_vertices() - sources.size() - sinks.size(); }
};

// Builds the region for blocks i and j from the given list of hyperedges that
// connect both blocks. Returns nullopt when the pair shares no cut edge.
std::optional<FlowRegion> build_region(const PartitionState& state, BlockId i, BlockId j,
                                       std::span<const EdgeId> cut_edges);
std::optional<FlowRegion> build_region(const PartitionState& state, BlockId i, BlockId j);

// Max-flow solver over the Lawler expansion of a hypergraph: per edge two
// nodes e_in -> e_out with capacity w(e), plus uncapacitated pin arcs
// v -> e_in and e_out -> v. Terminal sets may grow between calls; existing
// flow is kept.
class MaxFlowSolver {
 public:
  virtual ~MaxFlowSolver() = default;
  // Augments to maximality with respect to the given terminal sets and
  // returns the flow value added.
  virtual Gain augment(std::span<const std::uint8_t> is_source, std::span<const std::uint8_t> is_sink) = 0;
  // Vertices reachable from a source in the residual network.
  virtual std::vector<std::uint8_t> source_reachable(std::span<const std::uint8_t> is_source) const = 0;
  // Vertices that can reach a sink in the residual network.
  virtual std::vector<std::uint8_t> sink_reachable(std::span<const std::uint8_t> is_sink) const = 0;
  // Flow excess left at a vertex. Zero for solvers that keep conservation.
  virtual Gain excess(VertexId v) const = 0;
};

// Dinic's algorithm. The seed permutes every node's arc order, which changes
// the augmenting paths found but not the derived min-cut sides.
class DinicSolver final : public MaxFlowSolver {
 public:
  DinicSolver(const Hypergraph& hg, std::uint64_t seed);

  Gain augment(std::span<const std::uint8_t> is_source, std::span<const std::uint8_t> is_sink) override;
  std::vector<std::uint8_t> source_reachable(std::span<const std::uint8_t> is_source) const override;
  std::vector<std::uint8_t> sink_reachable(std::span<const std::uint8_t> is_sink) const override;
  Gain excess(VertexId) const override { return 0; }

 private:
  bool build_levels(std::span<const std::uint8_t> is_source, std::span<const std::uint8_t> is_sink);
  Gain blocking_flow(std::span<const std::uint8_t> is_source, std::span<const std::uint8_t> is_sink);

  std::size_t num_vertices_ = 0;
  std::size_t num_nodes_ = 0;
  std::vector<std::size_t> first_;   // per node arc range in `order_`
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> head_;  // arc -> target node; arc ^ 1 is the reverse
  std::vector<Gain> residual_;
  std::vector<std::int32_t> level_;
  std::vector<std::size_t> current_;
};

struct MinCut {
  Gain flow = 0;
  std::vector<std::uint8_t> source_side;  // S_r
  std::vector<std::uint8_t> sink_side;    // T_r
};

// One-shot max flow between vertex sets; used by tests and tools.
MinCut minimum_cut(const Hypergraph& hg, std::span<const VertexId> sources, std::span<const VertexId> sinks,
                   std::uint64_t seed);

// Piercing choice among candidate nodes: sorted by id; candidates that would
// overload the growing side are skipped; candidates that the opposite
// terminal's reachable set does not contain are preferred.
std::optional<VertexId> select_piercing_vertex(std::vector<VertexId> candidates,
                                               std::span<const std::uint8_t> opposite_reachable,
                                               const Hypergraph& hg, Weight side_weight, Weight side_max);

struct TwoWayResult {
  bool improved = false;
  std::vector<std::uint8_t> side;  // new side per node, valid when improved
  Gain cut = 0;
  Weight side_weight[2] = {0, 0};
  Gain flow = 0;  // flow value when the loop stopped
  int piercings = 0;
};

struct TwoWayOptions {
  double max_piercing_factor = 2.0;
  std::uint64_t seed = 0;
};

// Flow-based improvement of one block pair by incremental bipartitioning.
// Passing a solver overrides the default Dinic solver on region.hg.
TwoWayResult incremental_bipartition(const FlowRegion& region, const TwoWayOptions& options,
                                     MaxFlowSolver* solver = nullptr);

// Moves applying an improved two-way result to the partition.
std::vector<Move> region_moves(const FlowRegion& region, const TwoWayResult& result);

struct QuotientGraph {
  BlockId k = 0;
  std::vector<std::pair<BlockId, BlockId>> edges;  // i < j, ascending

  static QuotientGraph build(const PartitionState& state);
};

// Greedy maximal matching over the given pairs, taken in order of
// (larger endpoint degree descending, pair ascending).
std::vector<std::pair<BlockId, BlockId>> greedy_matching(std::span<const std::pair<BlockId, BlockId>> pairs,
                                                         BlockId k);

struct FlowStats {
  int rounds = 0;
  int refinements = 0;
  int improvements = 0;
  Gain metric_delta = 0;  // signed change, negative when improved
  std::vector<std::uint64_t> round_hashes;
};

using FlowRoundObserver = std::function<void(int round, const PartitionState&)>;

// Matching-based k-way scheduling of two-way flow refinements until a round
// brings no improvement.
FlowStats schedule_kway(PartitionState& state, const FlowConfig& config, std::uint64_t seed, const Executor& exec,
                        const FlowRoundObserver& observer = {});

}  // namespace detpart
