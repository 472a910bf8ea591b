#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "detpart/hypergraph.h"
#include "detpart/types.h"

namespace detpart {

class Executor;

struct Move {
  VertexId vertex;
  BlockId to;

  friend bool operator==(const Move&, const Move&) = default;
};

// L_max = floor((1 + eps) * ceil(c(V) / k)), exact.
Weight perfect_block_weight(Weight total, BlockId k);
Weight max_block_weight(Weight total, BlockId k, Rational epsilon);

// Per-edge pin counts phi_e[i]. Dense k-length rows when k <= kDenseLimit,
// otherwise a sorted (block, count) list per edge in a flat arena with
// capacity min(|e|, k). Both layouts behave identically; connected blocks
// are always reported in ascending block order. Mutation of one edge's row
// must come from a single writer.
class PinCountTable {
 public:
  static constexpr BlockId kDenseLimit = 32;

  PinCountTable() = default;
  PinCountTable(const Hypergraph& hg, BlockId k, bool force_sparse = false);

  bool dense() const { return dense_; }
  std::uint32_t count(EdgeId e, BlockId b) const;
  std::uint32_t connectivity(EdgeId e) const { return connectivity_[e]; }

  // Returns the new count.
  std::uint32_t increment(EdgeId e, BlockId b);
  std::uint32_t decrement(EdgeId e, BlockId b);
  void clear_edge(EdgeId e);

  template <typename F>
  void for_each_block(EdgeId e, F&& f) const {
    if (dense_) {
      const std::uint32_t* row = counts_.data() + static_cast<std::size_t>(e) * k_;
      std::uint32_t seen = 0;
      for (BlockId b = 0; b < k_ && seen < connectivity_[e]; ++b) {
        if (row[b] > 0) {
          ++seen;
          f(b, row[b]);
        }
      }
    } else {
      const std::size_t base = offsets_[e];
      for (std::uint32_t i = 0; i < connectivity_[e]; ++i) f(blocks_[base + i], counts_[base + i]);
    }
  }

  friend bool operator==(const PinCountTable& a, const PinCountTable& b);

 private:
  BlockId k_ = 0;
  bool dense_ = true;
  std::vector<std::uint32_t> counts_;
  std::vector<BlockId> blocks_;        // sparse only
  std::vector<std::size_t> offsets_;   // sparse only
  std::vector<std::uint32_t> connectivity_;
};

// Assignment of vertices to k blocks plus all derived bookkeeping: block
// weights, pin counts, edge connectivity and the cached connectivity metric.
class PartitionState {
 public:
  // Standard k-way state: every block has perfect weight ceil(c(V)/k) and
  // limit L_max.
  PartitionState(const Hypergraph& hg, BlockId k, Rational epsilon);
  // Per-block limits, used by recursive bipartitioning where blocks stand
  // for different numbers of final blocks.
  // epsilon only sizes the rebalancer deadzone here.
  PartitionState(const Hypergraph& hg, std::vector<Weight> perfect_weights,
                 std::vector<Weight> max_weights, Rational epsilon);

  // Replaces the whole assignment and recomputes everything.
  void assign(std::span<const BlockId> assignment, const Executor& exec);

  // Applies a batch of moves synchronously. Each vertex may appear at most
  // once and must move to a different block (std::invalid_argument
  // otherwise). The outcome does not depend on the order of moves.
  // Returns the change of the connectivity metric (negative = better).
  Gain apply_moves(std::span<const Move> moves, const Executor& exec);

  // Decrease of the metric if v alone moved to block j.
  Gain gain(VertexId v, BlockId j) const;

  const Hypergraph& hypergraph() const { return *hg_; }
  BlockId k() const { return static_cast<BlockId>(block_weights_.size()); }
  Rational epsilon() const { return epsilon_; }

  BlockId block(VertexId v) const { return assignment_[v]; }
  std::span<const BlockId> assignment() const { return assignment_; }

  Weight block_weight(BlockId b) const { return block_weights_[b]; }
  std::span<const Weight> block_weights() const { return block_weights_; }
  Weight max_block_weight(BlockId b) const { return max_weights_[b]; }
  Weight perfect_block_weight(BlockId b) const { return perfect_weights_[b]; }

  std::uint32_t pin_count(EdgeId e, BlockId b) const { return pin_counts_.count(e, b); }
  std::uint32_t connectivity(EdgeId e) const { return pin_counts_.connectivity(e); }
  template <typename F>
  void for_each_connected_block(EdgeId e, F&& f) const {
    pin_counts_.for_each_block(e, std::forward<F>(f));
  }
  const PinCountTable& pin_counts() const { return pin_counts_; }

  Gain metric() const { return metric_; }
  bool balanced() const;
  bool block_overloaded(BlockId b) const { return block_weights_[b] > max_weights_[b]; }
  // Largest c(V_i) / perfect_i - 1 as a double, for reporting only.
  double imbalance() const;

  // Recomputes all derived data from the assignment alone and compares it
  // with the incrementally maintained data.
  bool audit() const;

  // Switches the pin count layout (for testing both representations).
  void force_sparse_pin_counts(const Executor& exec);

 private:
  void recompute(const Executor& exec, bool force_sparse);

  const Hypergraph* hg_;
  Rational epsilon_;
  std::vector<BlockId> assignment_;
  std::vector<Weight> block_weights_;
  std::vector<Weight> perfect_weights_;
  std::vector<Weight> max_weights_;
  PinCountTable pin_counts_;
  Gain metric_ = 0;

  // Scratch for apply_moves.
  std::vector<BlockId> moved_from_;
  std::vector<std::uint8_t> edge_touched_;
};

// Sum over edges of w(e) * (lambda(e) - 1), recomputed from scratch.
Gain connectivity_metric(const PartitionState& state);
Gain connectivity_metric(const Hypergraph& hg, std::span<const BlockId> assignment);

}  // namespace detpart
