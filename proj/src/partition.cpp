#include "detpart/partition.h"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <string>

#include "detpart/parallel.h"

namespace detpart {

Weight perfect_block_weight(Weight total, BlockId k) {
  if (k <= 0) throw std::invalid_argument("k must be positive");
  return (total + k - 1) / k;
}

Weight max_block_weight(Weight total, BlockId k, Rational epsilon) {
  const __int128 perfect = perfect_block_weight(total, k);
  const __int128 scaled = perfect * (epsilon.den + epsilon.num);
  return static_cast<Weight>(scaled / epsilon.den);
}

// ---------------------------------------------------------------------------
// PinCountTable

PinCountTable::PinCountTable(const Hypergraph& hg, BlockId k, bool force_sparse)
    : k_(k), dense_(!force_sparse && k <= kDenseLimit) {
  const std::size_t m = hg.num_edges();
  connectivity_.assign(m, 0);
  if (dense_) {
    counts_.assign(m * static_cast<std::size_t>(k), 0);
  } else {
    offsets_.resize(m + 1);
    offsets_[0] = 0;
    for (EdgeId e = 0; e < m; ++e) {
      offsets_[e + 1] = offsets_[e] + std::min<std::size_t>(hg.edge_size(e), static_cast<std::size_t>(k));
    }
    counts_.assign(offsets_[m], 0);
    blocks_.assign(offsets_[m], kInvalidBlock);
  }
}

std::uint32_t PinCountTable::count(EdgeId e, BlockId b) const {
  if (dense_) return counts_[static_cast<std::size_t>(e) * k_ + b];
  const std::size_t base = offsets_[e];
  for (std::uint32_t i = 0; i < connectivity_[e]; ++i) {
    if (blocks_[base + i] == b) return counts_[base + i];
    if (blocks_[base + i] > b) break;
  }
  return 0;
}

std::uint32_t PinCountTable::increment(EdgeId e, BlockId b) {
  if (dense_) {
    std::uint32_t& c = counts_[static_cast<std::size_t>(e) * k_ + b];
    if (c++ == 0) ++connectivity_[e];
    return c;
  }
  const std::size_t base = offsets_[e];
  const std::uint32_t size = connectivity_[e];
  std::uint32_t pos = 0;
  while (pos < size && blocks_[base + pos] < b) ++pos;
  if (pos < size && blocks_[base + pos] == b) return ++counts_[base + pos];
  if (base + size >= offsets_[e + 1]) throw std::logic_error("pin count row overflow");
  for (std::uint32_t i = size; i > pos; --i) {
    blocks_[base + i] = blocks_[base + i - 1];
    counts_[base + i] = counts_[base + i - 1];
  }
  blocks_[base + pos] = b;
  counts_[base + pos] = 1;
  ++connectivity_[e];
  return 1;
}

std::uint32_t PinCountTable::decrement(EdgeId e, BlockId b) {
  if (dense_) {
    std::uint32_t& c = counts_[static_cast<std::size_t>(e) * k_ + b];
    if (c == 0) throw std::logic_error("pin count underflow");
    if (--c == 0) --connectivity_[e];
    return c;
  }
  const std::size_t base = offsets_[e];
  const std::uint32_t size = connectivity_[e];
  for (std::uint32_t pos = 0; pos < size; ++pos) {
    if (blocks_[base + pos] != b) continue;
    const std::uint32_t c = --counts_[base + pos];
    if (c == 0) {
      for (std::uint32_t i = pos; i + 1 < size; ++i) {
        blocks_[base + i] = blocks_[base + i + 1];
        counts_[base + i] = counts_[base + i + 1];
      }
      blocks_[base + size - 1] = kInvalidBlock;
      counts_[base + size - 1] = 0;
      --connectivity_[e];
    }
    return c;
  }
  throw std::logic_error("pin count underflow");
}

void PinCountTable::clear_edge(EdgeId e) {
  if (dense_) {
    std::fill_n(counts_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(e) * k_), k_, 0u);
  } else {
    for (std::size_t i = offsets_[e]; i < offsets_[e + 1]; ++i) {
      counts_[i] = 0;
      blocks_[i] = kInvalidBlock;
    }
  }
  connectivity_[e] = 0;
}

bool operator==(const PinCountTable& a, const PinCountTable& b) {
  if (a.connectivity_ != b.connectivity_) return false;
  for (EdgeId e = 0; e < a.connectivity_.size(); ++e) {
    std::vector<std::pair<BlockId, std::uint32_t>> ra, rb;
    a.for_each_block(e, [&](BlockId blk, std::uint32_t c) { ra.emplace_back(blk, c); });
    b.for_each_block(e, [&](BlockId blk, std::uint32_t c) { rb.emplace_back(blk, c); });
    if (ra != rb) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// PartitionState

PartitionState::PartitionState(const Hypergraph& hg, BlockId k, Rational epsilon)
    : hg_(&hg), epsilon_(epsilon) {
  if (k <= 0) throw std::invalid_argument("k must be positive");
  const Weight perfect = detpart::perfect_block_weight(hg.total_vertex_weight(), k);
  perfect_weights_.assign(k, perfect);
  max_weights_.assign(k, detpart::max_block_weight(hg.total_vertex_weight(), k, epsilon));
  block_weights_.assign(k, 0);
  assignment_.assign(hg.num_vertices(), 0);
  moved_from_.assign(hg.num_vertices(), kInvalidBlock);
  edge_touched_.assign(hg.num_edges(), 0);
  Executor seq(1);
  recompute(seq, false);
}

PartitionState::PartitionState(const Hypergraph& hg, std::vector<Weight> perfect_weights,
                               std::vector<Weight> max_weights, Rational epsilon)
    : hg_(&hg),
      epsilon_(epsilon),
      perfect_weights_(std::move(perfect_weights)),
      max_weights_(std::move(max_weights)) {
  if (perfect_weights_.empty() || perfect_weights_.size() != max_weights_.size()) {
    throw std::invalid_argument("block limit vectors must be nonempty and of equal length");
  }
  block_weights_.assign(perfect_weights_.size(), 0);
  assignment_.assign(hg.num_vertices(), 0);
  moved_from_.assign(hg.num_vertices(), kInvalidBlock);
  edge_touched_.assign(hg.num_edges(), 0);
  Executor seq(1);
  recompute(seq, false);
}

void PartitionState::assign(std::span<const BlockId> assignment, const Executor& exec) {
  if (assignment.size() != hg_->num_vertices()) {
    throw std::invalid_argument("assignment length does not match vertex count");
  }
  for (BlockId b : assignment) {
    if (b < 0 || b >= k()) throw std::invalid_argument("block id out of range");
  }
  std::copy(assignment.begin(), assignment.end(), assignment_.begin());
  recompute(exec, !pin_counts_.dense() && k() <= PinCountTable::kDenseLimit);
}

void PartitionState::force_sparse_pin_counts(const Executor& exec) { recompute(exec, true); }

void PartitionState::recompute(const Executor& exec, bool force_sparse) {
  const Hypergraph& hg = *hg_;
  std::fill(block_weights_.begin(), block_weights_.end(), 0);
  for (VertexId v = 0; v < hg.num_vertices(); ++v) block_weights_[assignment_[v]] += hg.vertex_weight(v);

  pin_counts_ = PinCountTable(hg, k(), force_sparse);
  std::atomic<Gain> metric{0};
  exec.parallel_for(0, hg.num_edges(), [&](std::size_t i) {
    const auto e = static_cast<EdgeId>(i);
    for (VertexId p : hg.pins(e)) pin_counts_.increment(e, assignment_[p]);
    if (pin_counts_.connectivity(e) > 1) {
      metric.fetch_add(hg.edge_weight(e) * (pin_counts_.connectivity(e) - 1), std::memory_order_relaxed);
    }
  });
  metric_ = metric.load();
}

Gain PartitionState::gain(VertexId v, BlockId j) const {
  const BlockId from = assignment_[v];
  if (j == from) throw std::invalid_argument("gain target equals current block");
  if (j < 0 || j >= k()) throw std::invalid_argument("gain target out of range");
  Gain g = 0;
  for (EdgeId e : hg_->incident_edges(v)) {
    const Weight w = hg_->edge_weight(e);
    if (pin_counts_.count(e, from) == 1) g += w;
    if (pin_counts_.count(e, j) == 0) g -= w;
  }
  return g;
}

Gain PartitionState::apply_moves(std::span<const Move> moves, const Executor& exec) {
  if (moves.empty()) return 0;
  const Hypergraph& hg = *hg_;
  for (const Move& m : moves) {
    if (m.vertex >= hg.num_vertices() || m.to < 0 || m.to >= k()) {
      throw std::invalid_argument("move out of range");
    }
    if (moved_from_[m.vertex] != kInvalidBlock) {
      for (const Move& x : moves) moved_from_[x.vertex] = kInvalidBlock;
      throw std::invalid_argument("vertex " + std::to_string(m.vertex) + " appears twice in move batch");
    }
    if (assignment_[m.vertex] == m.to) {
      for (const Move& x : moves) moved_from_[x.vertex] = kInvalidBlock;
      throw std::invalid_argument("move target equals current block");
    }
    moved_from_[m.vertex] = assignment_[m.vertex];
  }

  exec.parallel_for(0, moves.size(), [&](std::size_t i) {
    const Move& m = moves[i];
    const Weight w = hg.vertex_weight(m.vertex);
    std::atomic_ref<Weight>(block_weights_[moved_from_[m.vertex]]).fetch_sub(w, std::memory_order_relaxed);
    std::atomic_ref<Weight>(block_weights_[m.to]).fetch_add(w, std::memory_order_relaxed);
    assignment_[m.vertex] = m.to;
    for (EdgeId e : hg.incident_edges(m.vertex)) {
      std::atomic_ref<std::uint8_t>(edge_touched_[e]).store(1, std::memory_order_relaxed);
    }
  });

  // Collect touched edges in ascending order.
  std::vector<EdgeId> touched;
  {
    std::vector<EdgeId> candidates;
    for (const Move& m : moves) {
      for (EdgeId e : hg.incident_edges(m.vertex)) {
        if (edge_touched_[e] == 1) {
          edge_touched_[e] = 2;
          candidates.push_back(e);
        }
      }
    }
    touched = std::move(candidates);
  }

  std::atomic<Gain> delta{0};
  exec.parallel_for(0, touched.size(), [&](std::size_t i) {
    const EdgeId e = touched[i];
    const auto before = static_cast<Gain>(pin_counts_.connectivity(e));
    for (VertexId p : hg.pins(e)) {
      const BlockId from = moved_from_[p];
      if (from == kInvalidBlock) continue;
      pin_counts_.decrement(e, from);
      pin_counts_.increment(e, assignment_[p]);
    }
    const auto after = static_cast<Gain>(pin_counts_.connectivity(e));
    if (after != before) delta.fetch_add(hg.edge_weight(e) * (after - before), std::memory_order_relaxed);
    edge_touched_[e] = 0;
  });

  exec.parallel_for(0, moves.size(), [&](std::size_t i) { moved_from_[moves[i].vertex] = kInvalidBlock; });
  metric_ += delta.load();
  return delta.load();
}

bool PartitionState::balanced() const {
  for (BlockId b = 0; b < k(); ++b) {
    if (block_weights_[b] > max_weights_[b]) return false;
  }
  return true;
}

double PartitionState::imbalance() const {
  double worst = -1.0;
  for (BlockId b = 0; b < k(); ++b) {
    const double ratio = static_cast<double>(block_weights_[b]) / static_cast<double>(perfect_weights_[b]);
    worst = std::max(worst, ratio - 1.0);
  }
  return worst;
}

bool PartitionState::audit() const {
  const Hypergraph& hg = *hg_;
  std::vector<Weight> weights(k(), 0);
  for (VertexId v = 0; v < hg.num_vertices(); ++v) weights[assignment_[v]] += hg.vertex_weight(v);
  if (weights != block_weights_) return false;
  PinCountTable fresh(hg, k(), !pin_counts_.dense());
  for (EdgeId e = 0; e < hg.num_edges(); ++e) {
    for (VertexId p : hg.pins(e)) fresh.increment(e, assignment_[p]);
  }
  if (!(fresh == pin_counts_)) return false;
  return connectivity_metric(hg, assignment_) == metric_;
}

Gain connectivity_metric(const PartitionState& state) {
  const Hypergraph& hg = state.hypergraph();
  Gain total = 0;
  for (EdgeId e = 0; e < hg.num_edges(); ++e) {
    total += hg.edge_weight(e) * (static_cast<Gain>(state.connectivity(e)) - 1);
  }
  return total;
}

Gain connectivity_metric(const Hypergraph& hg, std::span<const BlockId> assignment) {
  Gain total = 0;
  std::vector<BlockId> seen;
  for (EdgeId e = 0; e < hg.num_edges(); ++e) {
    seen.clear();
    for (VertexId p : hg.pins(e)) seen.push_back(assignment[p]);
    std::sort(seen.begin(), seen.end());
    const auto lambda = std::unique(seen.begin(), seen.end()) - seen.begin();
    total += hg.edge_weight(e) * (lambda - 1);
  }
  return total;
}

}  // namespace detpart
