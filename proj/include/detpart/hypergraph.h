#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "detpart/types.h"

namespace detpart {

class Executor;

struct InvalidHypergraph : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Immutable weighted hypergraph with both pin lists (edge -> vertices) and
// incidence lists (vertex -> edges) stored CSR style.
class Hypergraph {
 public:
  Hypergraph() = default;

  // Validates and builds both directions. Edges are given as pin lists over
  // 0-based vertex ids. Empty weight vectors mean unit weights.
  // Throws InvalidHypergraph on empty edges, duplicate pins, out-of-range
  // pins, non-positive weights, or if the worst-case metric overflows.
  static Hypergraph from_edges(std::size_t num_vertices,
                               const std::vector<std::vector<VertexId>>& edges,
                               std::vector<Weight> edge_weights = {},
                               std::vector<Weight> vertex_weights = {});

  // Same as from_edges but takes an already flattened pin array.
  static Hypergraph from_csr(std::size_t num_vertices, std::vector<std::size_t> edge_offsets,
                             std::vector<VertexId> pins, std::vector<Weight> edge_weights,
                             std::vector<Weight> vertex_weights);

  std::size_t num_vertices() const { return vertex_weights_.size(); }
  std::size_t num_edges() const { return edge_weights_.size(); }
  std::size_t num_pins() const { return pins_.size(); }

  Weight vertex_weight(VertexId v) const { return vertex_weights_[v]; }
  Weight edge_weight(EdgeId e) const { return edge_weights_[e]; }
  Weight total_vertex_weight() const { return total_vertex_weight_; }
  Weight max_vertex_weight() const { return max_vertex_weight_; }

  std::size_t edge_size(EdgeId e) const { return edge_offsets_[e + 1] - edge_offsets_[e]; }
  std::size_t degree(VertexId v) const { return vertex_offsets_[v + 1] - vertex_offsets_[v]; }

  std::span<const VertexId> pins(EdgeId e) const {
    return {pins_.data() + edge_offsets_[e], edge_size(e)};
  }
  std::span<const EdgeId> incident_edges(VertexId v) const {
    return {incidence_.data() + vertex_offsets_[v], degree(v)};
  }

  std::span<const Weight> vertex_weights() const { return vertex_weights_; }
  std::span<const Weight> edge_weights() const { return edge_weights_; }
  std::span<const std::size_t> edge_offsets() const { return edge_offsets_; }
  std::span<const VertexId> pin_array() const { return pins_; }

 private:
  void build_incidence();
  void validate() const;

  std::vector<Weight> vertex_weights_;
  std::vector<Weight> edge_weights_;
  std::vector<std::size_t> edge_offsets_{0};
  std::vector<VertexId> pins_;
  std::vector<std::size_t> vertex_offsets_{0};
  std::vector<EdgeId> incidence_;
  Weight total_vertex_weight_ = 0;
  Weight max_vertex_weight_ = 0;
};

}  // namespace detpart
