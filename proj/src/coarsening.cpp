#include "detpart/coarsening.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <tbb/enumerable_thread_specific.h>

#include "detpart/parallel.h"
#include "detpart/random.h"

namespace detpart {

namespace {

constexpr std::int64_t kMaxRatingDenominator = std::int64_t{1} << 40;

}  // namespace

Clustering Clustering::singletons(const Hypergraph& hg) {
  Clustering c;
  const std::size_t n = hg.num_vertices();
  c.cluster.resize(n);
  std::iota(c.cluster.begin(), c.cluster.end(), VertexId{0});
  c.cluster_weight.assign(hg.vertex_weights().begin(), hg.vertex_weights().end());
  c.cluster_size.assign(n, 1);
  return c;
}

RatingScratch::RatingScratch(std::size_t num_vertices)
    : score_(num_vertices, 0), last_edge_(num_vertices, std::numeric_limits<EdgeId>::max()) {}

std::optional<RatedCluster> heavy_edge_rating(const Hypergraph& hg, VertexId u, const Clustering& clustering,
                                              Weight max_cluster_weight, bool rating_bugfix,
                                              RatingScratch& scratch) {
  if (scratch.score_.size() < hg.num_vertices()) scratch = RatingScratch(hg.num_vertices());

  // Common denominator of all 1/(|e|-1) terms; falls back to a fixed-point
  // scale if the lcm grows too large.
  std::int64_t denominator = 1;
  for (EdgeId e : hg.incident_edges(u)) {
    const auto s = static_cast<std::int64_t>(hg.edge_size(e));
    if (s < 2) continue;
    const std::int64_t l = std::lcm(denominator, s - 1);
    if (l > kMaxRatingDenominator) {
      denominator = kMaxRatingDenominator;
      break;
    }
    denominator = l;
  }

  auto& touched = scratch.touched_;
  touched.clear();
  for (EdgeId e : hg.incident_edges(u)) {
    const auto s = static_cast<std::int64_t>(hg.edge_size(e));
    if (s < 2) continue;
    const __int128 contribution = static_cast<__int128>(hg.edge_weight(e)) * (denominator / (s - 1));
    for (VertexId p : hg.pins(e)) {
      if (p == u) continue;
      const VertexId c = clustering.cluster[p];
      if (c == clustering.cluster[u]) continue;
      if (rating_bugfix) {
        if (scratch.last_edge_[c] == e) continue;
        scratch.last_edge_[c] = e;
      }
      if (scratch.score_[c] == 0) touched.push_back(c);
      scratch.score_[c] += contribution;
    }
  }

  std::optional<RatedCluster> best;
  const Weight own = hg.vertex_weight(u);
  for (VertexId c : touched) {
    const __int128 score = scratch.score_[c];
    if (clustering.cluster_weight[c] + own <= max_cluster_weight) {
      if (!best || score > best->rating.numerator || (score == best->rating.numerator && c < best->cluster)) {
        best = RatedCluster{c, Rating{score, denominator}};
      }
    }
  }
  for (VertexId c : touched) {
    scratch.score_[c] = 0;
    scratch.last_edge_[c] = std::numeric_limits<EdgeId>::max();
  }
  return best;
}

std::vector<std::size_t> SubroundSchedule::sizes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < offsets.size(); ++i) out.push_back(offsets[i + 1] - offsets[i]);
  return out;
}

namespace {

std::vector<VertexId> shuffled_vertices(std::size_t n, std::uint64_t seed) {
  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), VertexId{0});
  Rng rng(seed);
  rng.shuffle(std::span<VertexId>(order));
  return order;
}

}  // namespace

SubroundSchedule prefix_doubling_schedule(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("schedule needs at least one vertex");
  SubroundSchedule s;
  s.order = shuffled_vertices(n, seed);
  s.offsets.push_back(0);
  const std::size_t cap = std::max<std::size_t>(1, (n + 99) / 100);
  std::size_t pos = 0;
  for (int i = 0; i < 100 && pos < n; ++i) s.offsets.push_back(++pos);
  std::size_t size = std::min<std::size_t>(2, cap);
  while (pos < n) {
    pos = std::min(n, pos + size);
    s.offsets.push_back(pos);
    size = std::min(2 * size, cap);
  }
  return s;
}

SubroundSchedule uniform_schedule(std::size_t n, int subrounds, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("schedule needs at least one vertex");
  if (subrounds < 1) throw std::invalid_argument("need at least one subround");
  SubroundSchedule s;
  s.order = shuffled_vertices(n, seed);
  s.offsets.push_back(0);
  const auto r = static_cast<std::size_t>(subrounds);
  for (std::size_t i = 1; i <= r; ++i) {
    const std::size_t end = n * i / r;
    if (end > s.offsets.back()) s.offsets.push_back(end);
  }
  return s;
}

void cluster_round(const Hypergraph& hg, Clustering& clustering, const SubroundSchedule& schedule,
                   Weight max_cluster_weight, const CoarseningConfig& config, const Executor& exec) {
  const std::size_t n = hg.num_vertices();
  std::vector<VertexId> target(n, kInvalidVertex);
  std::vector<std::uint32_t> stamp(n, 0);
  std::vector<Weight> proposal_weight(n, 0);
  std::vector<std::uint8_t> pair_decision(n, 0);
  tbb::enumerable_thread_specific<RatingScratch> scratch([n] { return RatingScratch(n); });

  struct Proposal {
    VertexId target;
    Weight weight;
    VertexId vertex;
  };
  std::vector<Proposal> proposals;
  std::vector<std::size_t> group_offsets;
  std::vector<std::uint8_t> accepted;

  for (std::size_t round = 0; round < schedule.num_subrounds(); ++round) {
    const auto batch = schedule.subround(round);
    const auto round_stamp = static_cast<std::uint32_t>(round + 1);

    exec.parallel_for(0, batch.size(), [&](std::size_t i) {
      const VertexId u = batch[i];
      stamp[u] = round_stamp;
      target[u] = kInvalidVertex;
      if (!clustering.singleton(u)) return;
      const auto best = heavy_edge_rating(hg, u, clustering, max_cluster_weight, config.rating_bugfix,
                                          scratch.local());
      if (best) target[u] = best->cluster;
    });

    if (config.swap_prevention) {
      exec.parallel_for(0, batch.size(), [&](std::size_t i) {
        const VertexId u = batch[i];
        if (target[u] != kInvalidVertex) {
          std::atomic_ref<Weight>(proposal_weight[target[u]]).fetch_add(hg.vertex_weight(u), std::memory_order_relaxed);
        }
      });
      // Mutual proposals are singletons, so label == vertex id. The pair is
      // resolved by its smaller vertex: 1 keeps u in place, 2 keeps v.
      exec.parallel_for(0, batch.size(), [&](std::size_t i) {
        const VertexId u = batch[i];
        const VertexId v = target[u];
        pair_decision[u] = 0;
        if (v == kInvalidVertex || v <= u || stamp[v] != round_stamp || target[v] != u) return;
        const Weight weight_u = clustering.cluster_weight[u] + proposal_weight[u];
        const Weight weight_v = clustering.cluster_weight[v] + proposal_weight[v];
        pair_decision[u] = weight_u >= weight_v ? 1 : 2;
      });
      exec.parallel_for(0, batch.size(), [&](std::size_t i) {
        const VertexId u = batch[i];
        if (pair_decision[u] == 1) {
          target[u] = kInvalidVertex;
        } else if (pair_decision[u] == 2) {
          target[target[u]] = kInvalidVertex;
        }
      });
      // A pair member that lost its target was itself the other's target,
      // so clearing batch vertices and remaining targets resets everything.
      for (VertexId u : batch) {
        proposal_weight[u] = 0;
        if (target[u] != kInvalidVertex) proposal_weight[target[u]] = 0;
      }
    }

    proposals.clear();
    for (VertexId u : batch) {
      if (target[u] != kInvalidVertex) proposals.push_back({target[u], hg.vertex_weight(u), u});
    }
    if (proposals.empty()) continue;
    exec.sort(proposals.begin(), proposals.end(), [](const Proposal& a, const Proposal& b) {
      if (a.target != b.target) return a.target < b.target;
      if (a.weight != b.weight) return a.weight < b.weight;
      return a.vertex < b.vertex;
    });
    group_offsets.clear();
    for (std::size_t i = 0; i < proposals.size(); ++i) {
      if (i == 0 || proposals[i].target != proposals[i - 1].target) group_offsets.push_back(i);
    }
    group_offsets.push_back(proposals.size());
    accepted.assign(proposals.size(), 0);

    // Approval: the longest weight-sorted prefix that fits into the target.
    exec.parallel_for(0, group_offsets.size() - 1, [&](std::size_t g) {
      const std::size_t begin = group_offsets[g];
      const std::size_t end = group_offsets[g + 1];
      const VertexId t = proposals[begin].target;
      const Weight capacity = max_cluster_weight - clustering.cluster_weight[t];
      std::vector<Weight> prefix(end - begin);
      Weight running = 0;
      for (std::size_t i = begin; i < end; ++i) {
        running += proposals[i].weight;
        prefix[i - begin] = running;
      }
      const auto pos = static_cast<std::size_t>(
          std::upper_bound(prefix.begin(), prefix.end(), capacity) - prefix.begin());
      for (std::size_t i = begin; i < begin + pos; ++i) accepted[i] = 1;
    });

    exec.parallel_for(0, proposals.size(), [&](std::size_t i) {
      if (!accepted[i]) return;
      const VertexId u = proposals[i].vertex;
      const VertexId t = proposals[i].target;
      const Weight w = proposals[i].weight;
      const VertexId old = clustering.cluster[u];
      std::atomic_ref<Weight>(clustering.cluster_weight[old]).fetch_sub(w, std::memory_order_relaxed);
      std::atomic_ref<std::uint32_t>(clustering.cluster_size[old]).fetch_sub(1, std::memory_order_relaxed);
      std::atomic_ref<Weight>(clustering.cluster_weight[t]).fetch_add(w, std::memory_order_relaxed);
      std::atomic_ref<std::uint32_t>(clustering.cluster_size[t]).fetch_add(1, std::memory_order_relaxed);
      clustering.cluster[u] = t;
    });

    for (std::size_t g = 0; g + 1 < group_offsets.size(); ++g) {
      const VertexId t = proposals[group_offsets[g]].target;
      if (clustering.cluster_weight[t] > max_cluster_weight) {
        throw std::logic_error("cluster weight limit violated");
      }
    }
  }
}

Weight max_cluster_weight(const Hypergraph& hg, BlockId k, const CoarseningConfig& config) {
  const auto limit = static_cast<double>(config.effective_contraction_limit(k));
  const double bound = config.max_cluster_weight_factor * static_cast<double>(hg.total_vertex_weight()) / limit;
  return std::max<Weight>(1, static_cast<Weight>(std::ceil(bound)));
}

Level contract(const Hypergraph& hg, const Clustering& clustering, const Executor& exec) {
  const std::size_t n = hg.num_vertices();
  const std::size_t m = hg.num_edges();

  std::vector<VertexId> rank(n + 1, 0);
  for (std::size_t l = 0; l < n; ++l) rank[l + 1] = rank[l] + (clustering.cluster_size[l] > 0 ? 1 : 0);
  const std::size_t coarse_n = rank[n];

  Level level;
  level.fine_to_coarse.resize(n);
  exec.parallel_for(0, n, [&](std::size_t v) { level.fine_to_coarse[v] = rank[clustering.cluster[v]]; });

  std::vector<Weight> coarse_weights(coarse_n, 0);
  for (std::size_t l = 0; l < n; ++l) {
    if (clustering.cluster_size[l] > 0) coarse_weights[rank[l]] = clustering.cluster_weight[l];
  }

  // Map, sort and deduplicate every edge's pins.
  std::vector<std::size_t> mapped_size(m + 1, 0);
  tbb::enumerable_thread_specific<std::vector<VertexId>> buffers;
  auto map_edge = [&](EdgeId e, std::vector<VertexId>& buf) {
    buf.clear();
    for (VertexId p : hg.pins(e)) buf.push_back(level.fine_to_coarse[p]);
    std::sort(buf.begin(), buf.end());
    buf.erase(std::unique(buf.begin(), buf.end()), buf.end());
  };
  exec.parallel_for(0, m, [&](std::size_t e) {
    auto& buf = buffers.local();
    map_edge(static_cast<EdgeId>(e), buf);
    mapped_size[e + 1] = buf.size() >= 2 ? buf.size() : 0;
  });
  for (std::size_t e = 0; e < m; ++e) mapped_size[e + 1] += mapped_size[e];
  std::vector<VertexId> mapped_pins(mapped_size[m]);
  std::vector<std::uint64_t> edge_hash(m, 0);
  exec.parallel_for(0, m, [&](std::size_t e) {
    if (mapped_size[e + 1] == mapped_size[e]) return;
    auto& buf = buffers.local();
    map_edge(static_cast<EdgeId>(e), buf);
    Fnv1a h;
    for (std::size_t i = 0; i < buf.size(); ++i) {
      mapped_pins[mapped_size[e] + i] = buf[i];
      h.add_u32(buf[i]);
    }
    edge_hash[e] = h.value();
  });

  std::vector<EdgeId> kept;
  kept.reserve(m);
  for (EdgeId e = 0; e < m; ++e) {
    if (mapped_size[e + 1] > mapped_size[e]) kept.push_back(e);
  }
  auto pins_of = [&](EdgeId e) {
    return std::span<const VertexId>(mapped_pins.data() + mapped_size[e], mapped_size[e + 1] - mapped_size[e]);
  };
  auto same_pins = [&](EdgeId a, EdgeId b) {
    const auto pa = pins_of(a);
    const auto pb = pins_of(b);
    return pa.size() == pb.size() && std::equal(pa.begin(), pa.end(), pb.begin());
  };
  exec.sort(kept.begin(), kept.end(), [&](EdgeId a, EdgeId b) {
    if (edge_hash[a] != edge_hash[b]) return edge_hash[a] < edge_hash[b];
    const auto pa = pins_of(a);
    const auto pb = pins_of(b);
    if (pa.size() != pb.size()) return pa.size() < pb.size();
    const auto cmp = std::lexicographical_compare_three_way(pa.begin(), pa.end(), pb.begin(), pb.end());
    if (cmp != 0) return cmp < 0;
    return a < b;
  });

  // Each run of identical edges collapses onto its smallest fine edge id.
  std::vector<std::pair<EdgeId, Weight>> representatives;
  for (std::size_t i = 0; i < kept.size();) {
    std::size_t j = i;
    Weight w = 0;
    while (j < kept.size() && edge_hash[kept[j]] == edge_hash[kept[i]] && same_pins(kept[i], kept[j])) {
      w += hg.edge_weight(kept[j]);
      ++j;
    }
    representatives.emplace_back(kept[i], w);
    i = j;
  }
  std::sort(representatives.begin(), representatives.end());

  std::vector<std::size_t> offsets{0};
  offsets.reserve(representatives.size() + 1);
  std::vector<VertexId> pins;
  std::vector<Weight> weights;
  weights.reserve(representatives.size());
  for (const auto& [e, w] : representatives) {
    const auto p = pins_of(e);
    pins.insert(pins.end(), p.begin(), p.end());
    offsets.push_back(pins.size());
    weights.push_back(w);
  }
  level.coarse = Hypergraph::from_csr(coarse_n, std::move(offsets), std::move(pins), std::move(weights),
                                      std::move(coarse_weights));
  return level;
}

std::vector<Level> coarsen_to_limit(const Hypergraph& hg, BlockId k, const CoarseningConfig& config,
                                    std::uint64_t seed, const Executor& exec) {
  std::vector<Level> levels;
  const std::size_t limit = config.effective_contraction_limit(k);
  const Weight max_weight = max_cluster_weight(hg, k, config);
  const Hypergraph* current = &hg;
  for (std::uint64_t pass = 0; current->num_vertices() > limit; ++pass) {
    const std::size_t n = current->num_vertices();
    Clustering clustering = Clustering::singletons(*current);
    const std::uint64_t pass_seed = mix_seed(seed, 0x636f61727365ULL + pass);
    const SubroundSchedule schedule = config.prefix_doubling ? prefix_doubling_schedule(n, pass_seed)
                                                             : uniform_schedule(n, config.subrounds, pass_seed);
    cluster_round(*current, clustering, schedule, max_weight, config, exec);
    Level level = contract(*current, clustering, exec);
    const std::size_t coarse_n = level.coarse.num_vertices();
    if (coarse_n >= n) break;
    levels.push_back(std::move(level));
    current = &levels.back().coarse;
    if (static_cast<double>(n - coarse_n) < 0.01 * static_cast<double>(n)) break;
  }
  return levels;
}

std::uint64_t level_hash(const Level& level) {
  Fnv1a h;
  for (VertexId c : level.fine_to_coarse) h.add_u32(c);
  h.add_u64(level.coarse.num_vertices());
  h.add_u64(level.coarse.num_edges());
  for (VertexId p : level.coarse.pin_array()) h.add_u32(p);
  for (Weight w : level.coarse.edge_weights()) h.add_u64(static_cast<std::uint64_t>(w));
  return h.value();
}

}  // namespace detpart
