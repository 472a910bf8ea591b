#include "detpart/hypergraph.h"

#include <algorithm>
#include <string>

namespace detpart {

Hypergraph Hypergraph::from_edges(std::size_t num_vertices,
                                  const std::vector<std::vector<VertexId>>& edges,
                                  std::vector<Weight> edge_weights,
                                  std::vector<Weight> vertex_weights) {
  std::vector<std::size_t> offsets;
  offsets.reserve(edges.size() + 1);
  offsets.push_back(0);
  std::vector<VertexId> pins;
  for (const auto& e : edges) {
    pins.insert(pins.end(), e.begin(), e.end());
    offsets.push_back(pins.size());
  }
  return from_csr(num_vertices, std::move(offsets), std::move(pins), std::move(edge_weights),
                  std::move(vertex_weights));
}

Hypergraph Hypergraph::from_csr(std::size_t num_vertices, std::vector<std::size_t> edge_offsets,
                                std::vector<VertexId> pins, std::vector<Weight> edge_weights,
                                std::vector<Weight> vertex_weights) {
  if (num_vertices >= kInvalidVertex) throw InvalidHypergraph("too many vertices");
  if (edge_offsets.empty() || edge_offsets.front() != 0 || edge_offsets.back() != pins.size()) {
    throw InvalidHypergraph("malformed edge offsets");
  }
  const std::size_t num_edges = edge_offsets.size() - 1;
  if (edge_weights.empty()) edge_weights.assign(num_edges, 1);
  if (vertex_weights.empty()) vertex_weights.assign(num_vertices, 1);
  if (edge_weights.size() != num_edges) throw InvalidHypergraph("edge weight count mismatch");
  if (vertex_weights.size() != num_vertices) throw InvalidHypergraph("vertex weight count mismatch");

  Hypergraph hg;
  hg.vertex_weights_ = std::move(vertex_weights);
  hg.edge_weights_ = std::move(edge_weights);
  hg.edge_offsets_ = std::move(edge_offsets);
  hg.pins_ = std::move(pins);
  hg.validate();
  hg.build_incidence();
  return hg;
}

void Hypergraph::validate() const {
  const std::size_t n = num_vertices();
  std::vector<EdgeId> last_seen(n, static_cast<EdgeId>(-1));
  __int128 total = 0;
  __int128 worst_metric = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (vertex_weights_[v] <= 0) {
      throw InvalidHypergraph("vertex " + std::to_string(v) + " has non-positive weight");
    }
    total += vertex_weights_[v];
  }
  for (EdgeId e = 0; e < num_edges(); ++e) {
    if (edge_weights_[e] <= 0) {
      throw InvalidHypergraph("edge " + std::to_string(e) + " has non-positive weight");
    }
    if (edge_size(e) == 0) throw InvalidHypergraph("edge " + std::to_string(e) + " is empty");
    for (VertexId p : pins(e)) {
      if (p >= n) throw InvalidHypergraph("edge " + std::to_string(e) + " has pin out of range");
      if (last_seen[p] == e) {
        throw InvalidHypergraph("edge " + std::to_string(e) + " has duplicate pin " +
                                std::to_string(p));
      }
      last_seen[p] = e;
    }
    worst_metric += static_cast<__int128>(edge_weights_[e]) * static_cast<__int128>(edge_size(e) - 1);
  }
  constexpr __int128 kLimit = std::numeric_limits<Gain>::max() / 4;
  if (total > kLimit) throw InvalidHypergraph("total vertex weight overflows 64 bits");
  if (worst_metric > kLimit) throw InvalidHypergraph("worst-case metric overflows 64 bits");
}

void Hypergraph::build_incidence() {
  const std::size_t n = num_vertices();
  vertex_offsets_.assign(n + 1, 0);
  for (VertexId p : pins_) ++vertex_offsets_[p + 1];
  for (std::size_t v = 0; v < n; ++v) vertex_offsets_[v + 1] += vertex_offsets_[v];
  incidence_.resize(pins_.size());
  std::vector<std::size_t> fill(vertex_offsets_.begin(), vertex_offsets_.end() - 1);
  for (EdgeId e = 0; e < num_edges(); ++e) {
    for (VertexId p : pins(e)) incidence_[fill[p]++] = e;
  }
  total_vertex_weight_ = 0;
  max_vertex_weight_ = 0;
  for (Weight w : vertex_weights_) {
    total_vertex_weight_ += w;
    max_vertex_weight_ = std::max(max_vertex_weight_, w);
  }
}

}  // namespace detpart
