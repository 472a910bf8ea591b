#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "detpart/config.h"
#include "detpart/hypergraph.h"
#include "detpart/types.h"

namespace detpart {

class Executor;

// Cluster labels are representative vertex ids. A label keeps identifying
// its cluster even if the representative itself later joins another one.
struct Clustering {
  std::vector<VertexId> cluster;       // label per vertex
  std::vector<Weight> cluster_weight;  // indexed by label
  std::vector<std::uint32_t> cluster_size;

  static Clustering singletons(const Hypergraph& hg);
  bool singleton(VertexId u) const { return cluster[u] == u && cluster_size[u] == 1; }
};

// Exact heavy-edge rating: value() == numerator / denominator.
struct Rating {
  __int128 numerator = 0;
  std::int64_t denominator = 1;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};

struct RatedCluster {
  VertexId cluster;
  Rating rating;
};

// Reusable per-thread buffers for rating.
class RatingScratch {
 public:
  explicit RatingScratch(std::size_t num_vertices = 0);

 private:
  friend std::optional<RatedCluster> heavy_edge_rating(const Hypergraph&, VertexId, const Clustering&,
                                                       Weight, bool, RatingScratch&);
  std::vector<__int128> score_;
  std::vector<EdgeId> last_edge_;
  std::vector<VertexId> touched_;
};

// Best neighboring cluster of u by sum_e w(e) * [|e cap C| > 0] / (|e| - 1),
// over clusters whose weight plus c(u) stays within max_cluster_weight.
// With rating_bugfix off every pin in C adds the edge term again. Ties go to
// the smaller label. Edges of size one are ignored.
std::optional<RatedCluster> heavy_edge_rating(const Hypergraph& hg, VertexId u, const Clustering& clustering,
                                              Weight max_cluster_weight, bool rating_bugfix,
                                              RatingScratch& scratch);

// A permutation of the vertices cut into consecutive subrounds.
struct SubroundSchedule {
  std::vector<VertexId> order;
  std::vector<std::size_t> offsets;  // subround i is order[offsets[i], offsets[i+1])

  std::size_t num_subrounds() const { return offsets.size() - 1; }
  std::span<const VertexId> subround(std::size_t i) const {
    return {order.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
  std::vector<std::size_t> sizes() const;
};

// 100 singleton subrounds, then sizes doubling from 2 up to ceil(n / 100).
SubroundSchedule prefix_doubling_schedule(std::size_t n, std::uint64_t seed);
// `subrounds` subrounds of near-equal size.
SubroundSchedule uniform_schedule(std::size_t n, int subrounds, std::uint64_t seed);

// One synchronous clustering pass over the schedule.
void cluster_round(const Hypergraph& hg, Clustering& clustering, const SubroundSchedule& schedule,
                   Weight max_cluster_weight, const CoarseningConfig& config, const Executor& exec);

struct Level {
  Hypergraph coarse;
  std::vector<VertexId> fine_to_coarse;
};

// Contracts every cluster into one vertex. Coarse vertices are numbered by
// ascending cluster label; single-pin edges are dropped and parallel edges
// merged with summed weight, ordered by their first fine edge.
Level contract(const Hypergraph& hg, const Clustering& clustering, const Executor& exec);

Weight max_cluster_weight(const Hypergraph& hg, BlockId k, const CoarseningConfig& config);

// Coarsens until the vertex count is at most the contraction limit or a
// pass shrinks it by less than 1%. levels[0] is the coarsening of hg.
std::vector<Level> coarsen_to_limit(const Hypergraph& hg, BlockId k, const CoarseningConfig& config,
                                    std::uint64_t seed, const Executor& exec);

// Fingerprint of a level's mapping and coarse structure.
std::uint64_t level_hash(const Level& level);

}  // namespace detpart
