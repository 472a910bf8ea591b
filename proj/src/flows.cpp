#include "detpart/flows.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "detpart/io.h"
#include "detpart/parallel.h"
#include "detpart/random.h"

namespace detpart {

// ---------------------------------------------------------------------------
// Region

namespace {

// Layered BFS inside `block` starting at the boundary vertices; vertices are
// taken layer by layer in id order until the next one would exceed budget.
std::vector<VertexId> grow_eligible(const PartitionState& state, BlockId block, std::vector<VertexId> layer,
                                    Weight budget, std::vector<std::uint8_t>& visited) {
  const Hypergraph& hg = state.hypergraph();
  std::vector<VertexId> eligible;
  std::vector<VertexId> touched = layer;
  for (VertexId v : layer) visited[v] = 1;
  Weight weight = 0;
  bool full = false;
  while (!layer.empty() && !full) {
    std::vector<VertexId> taken;
    for (VertexId v : layer) {
      if (weight + hg.vertex_weight(v) > budget) {
        full = true;
        break;
      }
      weight += hg.vertex_weight(v);
      eligible.push_back(v);
      taken.push_back(v);
    }
    if (full) break;
    std::vector<VertexId> next;
    for (VertexId v : taken) {
      for (EdgeId e : hg.incident_edges(v)) {
        for (VertexId u : hg.pins(e)) {
          if (visited[u] || state.block(u) != block) continue;
          visited[u] = 1;
          next.push_back(u);
        }
      }
    }
    touched.insert(touched.end(), next.begin(), next.end());
    std::sort(next.begin(), next.end());
    layer = std::move(next);
  }
  for (VertexId v : touched) visited[v] = 0;
  // A side must keep at least one terminal vertex.
  if (weight == state.block_weight(block) && !eligible.empty()) eligible.pop_back();
  return eligible;
}

}  // namespace

std::optional<FlowRegion> build_region(const PartitionState& state, BlockId i, BlockId j,
                                       std::span<const EdgeId> cut_edges) {
  if (cut_edges.empty()) return std::nullopt;
  const Hypergraph& hg = state.hypergraph();
  FlowRegion region;
  region.blocks[0] = i;
  region.blocks[1] = j;
  for (int s = 0; s < 2; ++s) {
    const BlockId own = region.blocks[s];
    const BlockId other = region.blocks[1 - s];
    region.max_weight[s] = state.max_block_weight(own);
    region.perfect_weight[s] = std::max<Weight>(1, state.perfect_block_weight(own));
    region.side_weight[s] = state.block_weight(own);
    region.budget[s] = std::max<Weight>(0, state.max_block_weight(other) - state.block_weight(other));
  }

  std::vector<VertexId> boundary[2];
  for (EdgeId e : cut_edges) {
    for (VertexId v : hg.pins(e)) {
      if (state.block(v) == i) boundary[0].push_back(v);
      else if (state.block(v) == j) boundary[1].push_back(v);
    }
  }
  std::vector<std::uint8_t> visited(hg.num_vertices(), 0);
  std::vector<VertexId> eligible;
  Weight eligible_weight[2] = {0, 0};
  for (int s = 0; s < 2; ++s) {
    std::sort(boundary[s].begin(), boundary[s].end());
    boundary[s].erase(std::unique(boundary[s].begin(), boundary[s].end()), boundary[s].end());
    const auto side = grow_eligible(state, region.blocks[s], std::move(boundary[s]), region.budget[s], visited);
    for (VertexId v : side) eligible_weight[s] += hg.vertex_weight(v);
    eligible.insert(eligible.end(), side.begin(), side.end());
  }
  std::sort(eligible.begin(), eligible.end());

  // Node 0 and 1 are the contracted terminals, eligible vertices follow in id
  // order.
  const std::size_t num_nodes = 2 + eligible.size();
  std::vector<Weight> node_weights(num_nodes);
  node_weights[0] = region.side_weight[0] - eligible_weight[0];
  node_weights[1] = region.side_weight[1] - eligible_weight[1];
  region.node_to_vertex.assign(num_nodes, kInvalidVertex);
  region.side.assign(num_nodes, 0);
  region.side[1] = 1;
  for (std::size_t x = 0; x < eligible.size(); ++x) {
    const VertexId v = eligible[x];
    region.node_to_vertex[2 + x] = v;
    region.side[2 + x] = state.block(v) == i ? 0 : 1;
    node_weights[2 + x] = hg.vertex_weight(v);
  }
  region.sources = {0};
  region.sinks = {1};
  auto node_of = [&](VertexId v) -> VertexId {
    const auto it = std::lower_bound(eligible.begin(), eligible.end(), v);
    if (it != eligible.end() && *it == v) return static_cast<VertexId>(2 + (it - eligible.begin()));
    const BlockId b = state.block(v);
    if (b == i) return 0;
    if (b == j) return 1;
    return kInvalidVertex;
  };

  std::vector<EdgeId> edges;
  for (VertexId v : eligible) {
    for (EdgeId e : hg.incident_edges(v)) edges.push_back(e);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<std::size_t> offsets{0};
  std::vector<VertexId> pins;
  std::vector<Weight> edge_weights;
  for (EdgeId e : edges) {
    const std::size_t before = pins.size();
    bool terminal_seen[2] = {false, false};
    bool side_seen[2] = {false, false};
    for (VertexId v : hg.pins(e)) {
      const VertexId x = node_of(v);
      if (x == kInvalidVertex) continue;
      if (x < 2) {
        if (terminal_seen[x]) continue;
        terminal_seen[x] = true;
      }
      side_seen[region.side[x]] = true;
      pins.push_back(x);
    }
    if (pins.size() - before < 2) {
      pins.resize(before);
      continue;
    }
    offsets.push_back(pins.size());
    edge_weights.push_back(hg.edge_weight(e));
    if (side_seen[0] && side_seen[1]) region.bound += hg.edge_weight(e);
  }
  region.hg = Hypergraph::from_csr(num_nodes, std::move(offsets), std::move(pins), std::move(edge_weights),
                                   std::move(node_weights));
  return region;
}

std::optional<FlowRegion> build_region(const PartitionState& state, BlockId i, BlockId j) {
  const Hypergraph& hg = state.hypergraph();
  std::vector<EdgeId> cut_edges;
  for (EdgeId e = 0; e < hg.num_edges(); ++e) {
    if (state.pin_count(e, i) > 0 && state.pin_count(e, j) > 0) cut_edges.push_back(e);
  }
  return build_region(state, i, j, cut_edges);
}

// ---------------------------------------------------------------------------
// Dinic

namespace {
constexpr Gain kInfiniteCapacity = std::numeric_limits<Gain>::max() / 2;
}

DinicSolver::DinicSolver(const Hypergraph& hg, std::uint64_t seed)
    : num_vertices_(hg.num_vertices()), num_nodes_(hg.num_vertices() + 2 * hg.num_edges()) {
  const std::size_t num_arcs = 2 * (hg.num_edges() + 2 * hg.num_pins());
  head_.reserve(num_arcs);
  residual_.reserve(num_arcs);
  std::vector<std::uint32_t> tail;
  tail.reserve(num_arcs);
  auto add_arc = [&](std::size_t from, std::size_t to, Gain capacity) {
    tail.push_back(static_cast<std::uint32_t>(from));
    head_.push_back(static_cast<std::uint32_t>(to));
    residual_.push_back(capacity);
    tail.push_back(static_cast<std::uint32_t>(to));
    head_.push_back(static_cast<std::uint32_t>(from));
    residual_.push_back(0);
  };
  for (EdgeId e = 0; e < hg.num_edges(); ++e) {
    const std::size_t in = num_vertices_ + 2 * e;
    add_arc(in, in + 1, hg.edge_weight(e));
    for (VertexId v : hg.pins(e)) {
      add_arc(v, in, kInfiniteCapacity);
      add_arc(in + 1, v, kInfiniteCapacity);
    }
  }
  first_.assign(num_nodes_ + 1, 0);
  for (std::uint32_t t : tail) ++first_[t + 1];
  for (std::size_t x = 0; x < num_nodes_; ++x) first_[x + 1] += first_[x];
  order_.resize(tail.size());
  std::vector<std::size_t> fill(first_.begin(), first_.end() - 1);
  for (std::size_t a = 0; a < tail.size(); ++a) order_[fill[tail[a]]++] = static_cast<std::uint32_t>(a);
  Rng rng(seed);
  for (std::size_t x = 0; x < num_nodes_; ++x) {
    rng.shuffle(std::span<std::uint32_t>(order_.data() + first_[x], first_[x + 1] - first_[x]));
  }
  level_.assign(num_nodes_, -1);
  current_.assign(num_nodes_, 0);
}

bool DinicSolver::build_levels(std::span<const std::uint8_t> is_source, std::span<const std::uint8_t> is_sink) {
  std::fill(level_.begin(), level_.end(), -1);
  std::vector<std::uint32_t> queue;
  for (std::size_t v = 0; v < num_vertices_; ++v) {
    if (is_source[v]) {
      level_[v] = 0;
      queue.push_back(static_cast<std::uint32_t>(v));
    }
  }
  bool reached = false;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t u = queue[head];
    if (u < num_vertices_ && is_sink[u]) {
      reached = true;
      continue;
    }
    for (std::size_t p = first_[u]; p < first_[u + 1]; ++p) {
      const std::uint32_t a = order_[p];
      const std::uint32_t w = head_[a];
      if (residual_[a] > 0 && level_[w] < 0) {
        level_[w] = level_[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return reached;
}

Gain DinicSolver::blocking_flow(std::span<const std::uint8_t> is_source, std::span<const std::uint8_t> is_sink) {
  for (std::size_t x = 0; x < num_nodes_; ++x) current_[x] = first_[x];
  Gain total = 0;
  std::vector<std::uint32_t> path;  // arcs
  for (std::size_t s = 0; s < num_vertices_; ++s) {
    if (!is_source[s]) continue;
    std::uint32_t u = static_cast<std::uint32_t>(s);
    path.clear();
    while (true) {
      if (u < num_vertices_ && is_sink[u]) {
        Gain bottleneck = kInfiniteCapacity;
        for (std::uint32_t a : path) bottleneck = std::min(bottleneck, residual_[a]);
        std::size_t cut_at = path.size();
        for (std::size_t x = 0; x < path.size(); ++x) {
          residual_[path[x]] -= bottleneck;
          residual_[path[x] ^ 1] += bottleneck;
          if (residual_[path[x]] == 0 && cut_at == path.size()) cut_at = x;
        }
        total += bottleneck;
        path.resize(cut_at);
        u = path.empty() ? static_cast<std::uint32_t>(s) : head_[path.back()];
        continue;
      }
      bool advanced = false;
      for (; current_[u] < first_[u + 1]; ++current_[u]) {
        const std::uint32_t a = order_[current_[u]];
        const std::uint32_t w = head_[a];
        if (residual_[a] > 0 && level_[w] == level_[u] + 1) {
          path.push_back(a);
          u = w;
          advanced = true;
          break;
        }
      }
      if (advanced) continue;
      level_[u] = -1;
      if (path.empty()) break;
      const std::uint32_t back = path.back();
      path.pop_back();
      u = head_[back ^ 1];
      ++current_[u];
    }
  }
  return total;
}

Gain DinicSolver::augment(std::span<const std::uint8_t> is_source, std::span<const std::uint8_t> is_sink) {
  Gain total = 0;
  while (build_levels(is_source, is_sink)) total += blocking_flow(is_source, is_sink);
  return total;
}

std::vector<std::uint8_t> DinicSolver::source_reachable(std::span<const std::uint8_t> is_source) const {
  std::vector<std::uint8_t> seen(num_nodes_, 0);
  std::vector<std::uint32_t> queue;
  for (std::size_t v = 0; v < num_vertices_; ++v) {
    if (is_source[v]) {
      seen[v] = 1;
      queue.push_back(static_cast<std::uint32_t>(v));
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t u = queue[head];
    for (std::size_t p = first_[u]; p < first_[u + 1]; ++p) {
      const std::uint32_t a = order_[p];
      if (residual_[a] > 0 && !seen[head_[a]]) {
        seen[head_[a]] = 1;
        queue.push_back(head_[a]);
      }
    }
  }
  seen.resize(num_vertices_);
  return seen;
}

std::vector<std::uint8_t> DinicSolver::sink_reachable(std::span<const std::uint8_t> is_sink) const {
  std::vector<std::uint8_t> seen(num_nodes_, 0);
  std::vector<std::uint32_t> queue;
  for (std::size_t v = 0; v < num_vertices_; ++v) {
    if (is_sink[v]) {
      seen[v] = 1;
      queue.push_back(static_cast<std::uint32_t>(v));
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t w = queue[head];
    for (std::size_t p = first_[w]; p < first_[w + 1]; ++p) {
      const std::uint32_t a = order_[p];
      const std::uint32_t u = head_[a];
      if (residual_[a ^ 1] > 0 && !seen[u]) {
        seen[u] = 1;
        queue.push_back(u);
      }
    }
  }
  seen.resize(num_vertices_);
  return seen;
}

MinCut minimum_cut(const Hypergraph& hg, std::span<const VertexId> sources, std::span<const VertexId> sinks,
                   std::uint64_t seed) {
  std::vector<std::uint8_t> is_source(hg.num_vertices(), 0), is_sink(hg.num_vertices(), 0);
  for (VertexId v : sources) is_source[v] = 1;
  for (VertexId v : sinks) {
    if (is_source[v]) throw std::invalid_argument("source and sink sets overlap");
    is_sink[v] = 1;
  }
  DinicSolver solver(hg, seed);
  MinCut cut;
  cut.flow = solver.augment(is_source, is_sink);
  cut.source_side = solver.source_reachable(is_source);
  cut.sink_side = solver.sink_reachable(is_sink);
  return cut;
}

// ---------------------------------------------------------------------------
// Incremental bipartitioning

std::optional<VertexId> select_piercing_vertex(std::vector<VertexId> candidates,
                                               std::span<const std::uint8_t> opposite_reachable,
                                               const Hypergraph& hg, Weight side_weight, Weight side_max) {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::optional<VertexId> fallback;
  for (VertexId u : candidates) {
    if (side_weight + hg.vertex_weight(u) > side_max) continue;
    if (!opposite_reachable[u]) return u;
    if (!fallback) fallback = u;
  }
  return fallback;
}

namespace {

// max_s w[s] / perfect[s] compared exactly.
bool less_imbalanced(const Weight a[2], const Weight b[2], const Weight perfect[2]) {
  auto heavier = [&](const Weight w[2]) {
    return static_cast<__int128>(w[0]) * perfect[1] >= static_cast<__int128>(w[1]) * perfect[0] ? 0 : 1;
  };
  const int ha = heavier(a), hb = heavier(b);
  return static_cast<__int128>(a[ha]) * perfect[hb] < static_cast<__int128>(b[hb]) * perfect[ha];
}

}  // namespace

TwoWayResult incremental_bipartition(const FlowRegion& region, const TwoWayOptions& options,
                                     MaxFlowSolver* solver) {
  const Hypergraph& hg = region.hg;
  const std::size_t n = hg.num_vertices();
  std::optional<DinicSolver> own;
  if (solver == nullptr) {
    own.emplace(hg, options.seed);
    solver = &*own;
  }
  std::vector<std::uint8_t> in_source(n, 0), in_sink(n, 0);
  for (VertexId v : region.sources) in_source[v] = 1;
  for (VertexId v : region.sinks) in_sink[v] = 1;
  const Weight total = hg.total_vertex_weight();
  const long long max_piercings =
      std::max<long long>(1, static_cast<long long>(std::floor(options.max_piercing_factor * region.num_eligible())));

  TwoWayResult result;
  Gain flow = 0;
  while (true) {
    flow += solver->augment(in_source, in_sink);
    result.flow = flow;
    const auto source_side = solver->source_reachable(in_source);
    const auto sink_side = solver->sink_reachable(in_sink);
    Weight source_weight = 0, sink_weight = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (source_side[v]) source_weight += hg.vertex_weight(v);
      if (sink_side[v]) sink_weight += hg.vertex_weight(v);
    }

    // Both extreme min cuts; the source-side one wins ties.
    const Weight cand[2][2] = {{source_weight, total - source_weight}, {total - sink_weight, sink_weight}};
    int chosen = -1;
    for (int c = 0; c < 2; ++c) {
      if (cand[c][0] > region.max_weight[0] || cand[c][1] > region.max_weight[1]) continue;
      if (chosen < 0 || less_imbalanced(cand[c], cand[chosen], region.perfect_weight)) chosen = c;
    }
    if (chosen >= 0 && (flow < region.bound ||
                        (flow == region.bound && less_imbalanced(cand[chosen], region.side_weight,
                                                                 region.perfect_weight)))) {
      result.improved = true;
      result.cut = flow;
      result.side.resize(n);
      for (std::size_t v = 0; v < n; ++v) {
        result.side[v] = chosen == 0 ? (source_side[v] ? 0 : 1) : (sink_side[v] ? 1 : 0);
      }
      result.side_weight[0] = cand[chosen][0];
      result.side_weight[1] = cand[chosen][1];
      return result;
    }
    // Termination check before piercing: a larger terminal set cannot lower
    // the flow again.
    if (flow >= region.bound) return result;

    const int grow = source_weight <= sink_weight ? 0 : 1;
    std::vector<std::uint8_t>& grown = grow == 0 ? in_source : in_sink;
    const std::vector<std::uint8_t>& other = grow == 0 ? in_sink : in_source;
    grown = grow == 0 ? source_side : sink_side;
    std::vector<VertexId> candidates;
    for (EdgeId e = 0; e < hg.num_edges(); ++e) {
      bool inside = false, outside = false;
      for (VertexId v : hg.pins(e)) (grown[v] ? inside : outside) = true;
      if (!inside || !outside) continue;
      for (VertexId v : hg.pins(e)) {
        if (!grown[v] && !other[v]) candidates.push_back(v);
      }
    }
    const auto pierced = select_piercing_vertex(std::move(candidates), grow == 0 ? sink_side : source_side, hg,
                                                grow == 0 ? source_weight : sink_weight, region.max_weight[grow]);
    if (!pierced) return result;
    if (++result.piercings > max_piercings) return result;
    grown[*pierced] = 1;
    // Excess parked at a new sink was routed from S already.
    if (grow == 1) flow += solver->excess(*pierced);
  }
}

std::vector<Move> region_moves(const FlowRegion& region, const TwoWayResult& result) {
  std::vector<Move> moves;
  if (!result.improved) return moves;
  for (std::size_t x = 0; x < region.node_to_vertex.size(); ++x) {
    const VertexId v = region.node_to_vertex[x];
    if (v == kInvalidVertex || result.side[x] == region.side[x]) continue;
    moves.push_back({v, region.blocks[result.side[x]]});
  }
  return moves;
}

// ---------------------------------------------------------------------------
// Scheduling

QuotientGraph QuotientGraph::build(const PartitionState& state) {
  QuotientGraph q;
  q.k = state.k();
  const std::size_t k = static_cast<std::size_t>(q.k);
  std::vector<std::uint8_t> adjacent(k * k, 0);
  std::vector<BlockId> blocks;
  const Hypergraph& hg = state.hypergraph();
  for (EdgeId e = 0; e < hg.num_edges(); ++e) {
    if (state.connectivity(e) < 2) continue;
    blocks.clear();
    state.for_each_connected_block(e, [&](BlockId b, std::uint32_t) { blocks.push_back(b); });
    for (std::size_t x = 0; x < blocks.size(); ++x) {
      for (std::size_t y = x + 1; y < blocks.size(); ++y) {
        const BlockId i = std::min(blocks[x], blocks[y]), j = std::max(blocks[x], blocks[y]);
        adjacent[i * k + j] = 1;
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      if (adjacent[i * k + j]) q.edges.emplace_back(static_cast<BlockId>(i), static_cast<BlockId>(j));
    }
  }
  return q;
}

std::vector<std::pair<BlockId, BlockId>> greedy_matching(std::span<const std::pair<BlockId, BlockId>> pairs,
                                                         BlockId k) {
  std::vector<int> degree(k, 0);
  for (const auto& [i, j] : pairs) {
    ++degree[i];
    ++degree[j];
  }
  std::vector<std::pair<BlockId, BlockId>> order(pairs.begin(), pairs.end());
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    const int da = std::max(degree[a.first], degree[a.second]);
    const int db = std::max(degree[b.first], degree[b.second]);
    if (da != db) return da > db;
    return a < b;
  });
  std::vector<std::uint8_t> used(k, 0);
  std::vector<std::pair<BlockId, BlockId>> matching;
  for (const auto& [i, j] : order) {
    if (used[i] || used[j]) continue;
    used[i] = used[j] = 1;
    matching.emplace_back(i, j);
  }
  return matching;
}

FlowStats schedule_kway(PartitionState& state, const FlowConfig& config, std::uint64_t seed, const Executor& exec,
                        const FlowRoundObserver& observer) {
  FlowStats stats;
  const BlockId k = state.k();
  if (k < 2) return stats;
  const Hypergraph& hg = state.hypergraph();
  const auto start = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    if (config.time_budget_s <= 0) return false;
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return elapsed.count() > config.time_budget_s;
  };

  std::vector<std::uint8_t> active(k, 1);
  bool stop = false;
  for (int round = 0; !stop; ++round) {
    const QuotientGraph quotient = QuotientGraph::build(state);
    std::vector<std::pair<BlockId, BlockId>> remaining;
    for (const auto& [i, j] : quotient.edges) {
      if (active[i] || active[j]) remaining.emplace_back(i, j);
    }
    std::vector<std::uint8_t> next_active(k, 0);
    bool improved = false;

    while (!remaining.empty() && !stop) {
      auto matching = greedy_matching(remaining, k);
      std::vector<int> pair_of(k, -1);
      for (std::size_t t = 0; t < matching.size(); ++t) {
        const auto [i, j] = matching[t];
        if (pair_of[i] >= 0 || pair_of[j] >= 0) throw std::logic_error("block scheduled in two refinements");
        pair_of[i] = pair_of[j] = static_cast<int>(t);
      }
      std::vector<std::pair<BlockId, BlockId>> rest;
      for (const auto& p : remaining) {
        if (pair_of[p.first] < 0 || matching[pair_of[p.first]] != p) rest.push_back(p);
      }
      remaining = std::move(rest);

      std::vector<std::vector<EdgeId>> cut_edges(matching.size());
      for (EdgeId e = 0; e < hg.num_edges(); ++e) {
        if (state.connectivity(e) < 2) continue;
        state.for_each_connected_block(e, [&](BlockId b, std::uint32_t) {
          const int t = pair_of[b];
          if (t >= 0 && matching[t].first == b && state.pin_count(e, matching[t].second) > 0) {
            cut_edges[t].push_back(e);
          }
        });
      }

      std::vector<std::vector<Move>> moves(matching.size());
      std::vector<Gain> expected(matching.size(), 0);
      exec.parallel_tasks(matching.size(), [&](std::size_t t) {
        const auto [i, j] = matching[t];
        const auto region = build_region(state, i, j, cut_edges[t]);
        if (!region) return;
        TwoWayOptions options;
        options.max_piercing_factor = config.max_piercing_factor;
        options.seed = mix_seed(seed, (static_cast<std::uint64_t>(round) << 40) |
                                          (static_cast<std::uint64_t>(i) << 20) | static_cast<std::uint64_t>(j));
        const TwoWayResult result = incremental_bipartition(*region, options);
        if (!result.improved) return;
        moves[t] = region_moves(*region, result);
        expected[t] = result.cut - region->bound;
      });

      std::vector<Move> batch;
      Gain expected_delta = 0;
      for (std::size_t t = 0; t < matching.size(); ++t) {
        ++stats.refinements;
        if (moves[t].empty()) continue;
        ++stats.improvements;
        improved = true;
        next_active[matching[t].first] = next_active[matching[t].second] = 1;
        expected_delta += expected[t];
        batch.insert(batch.end(), moves[t].begin(), moves[t].end());
      }
      if (!batch.empty()) {
        const Gain delta = state.apply_moves(batch, exec);
        if (delta != expected_delta) throw std::logic_error("flow refinement changed the metric unexpectedly");
        stats.metric_delta += delta;
      }
      stop = out_of_time();
    }

    ++stats.rounds;
    stats.round_hashes.push_back(partition_hash(state.assignment()));
    if (observer) observer(round, state);
    if (!improved) break;
    active = std::move(next_active);
  }
  return stats;
}

}  // namespace detpart
