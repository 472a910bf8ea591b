#include "detpart/initial.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "detpart/jet.h"
#include "detpart/parallel.h"
#include "detpart/random.h"

namespace detpart {

bool better_attempt(const BipartitionAttempt& a, const BipartitionAttempt& b) {
  if (a.balanced != b.balanced) return a.balanced;
  if (a.metric != b.metric) return a.metric < b.metric;
  const __int128 lhs = static_cast<__int128>(a.heaviest_weight) * b.heaviest_perfect;
  const __int128 rhs = static_cast<__int128>(b.heaviest_weight) * a.heaviest_perfect;
  if (lhs != rhs) return lhs < rhs;
  return a.seed_index < b.seed_index;
}

std::vector<BlockId> greedy_growing(const Hypergraph& hg, const BipartitionTargets& targets, std::uint64_t seed) {
  const std::size_t n = hg.num_vertices();
  std::vector<BlockId> side(n, 1);
  if (n == 0) return side;
  std::vector<std::uint32_t> in_grown(hg.num_edges(), 0);
  std::vector<std::uint32_t> in_rest(hg.num_edges(), 0);
  std::vector<Gain> gain(n, 0);
  for (EdgeId e = 0; e < hg.num_edges(); ++e) {
    in_rest[e] = static_cast<std::uint32_t>(hg.edge_size(e));
    if (hg.edge_size(e) >= 2) {
      for (VertexId p : hg.pins(e)) gain[p] -= hg.edge_weight(e);
    }
  }
  std::vector<std::uint8_t> rejected(n, 0);

  struct Entry {
    Gain gain;
    VertexId vertex;
    bool operator<(const Entry& o) const { return gain != o.gain ? gain < o.gain : vertex > o.vertex; }
  };
  std::priority_queue<Entry> heap;
  Rng rng(seed);
  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), VertexId{0});
  rng.shuffle(std::span<VertexId>(order));
  std::size_t next_start = 0;

  Weight grown = 0;
  while (grown < targets.perfect[0]) {
    if (heap.empty()) {
      while (next_start < n && (side[order[next_start]] == 0 || rejected[order[next_start]])) ++next_start;
      if (next_start == n) break;
      const VertexId s = order[next_start];
      heap.push({gain[s], s});
    }
    const Entry top = heap.top();
    heap.pop();
    const VertexId v = top.vertex;
    if (side[v] == 0 || rejected[v] || top.gain != gain[v]) continue;
    if (grown + hg.vertex_weight(v) > targets.max[0]) {
      rejected[v] = 1;
      continue;
    }
    side[v] = 0;
    grown += hg.vertex_weight(v);
    for (EdgeId e : hg.incident_edges(v)) {
      const Weight w = hg.edge_weight(e);
      if (in_grown[e] == 0) {
        for (VertexId u : hg.pins(e)) {
          if (u == v || side[u] == 0) continue;
          gain[u] += w;
          heap.push({gain[u], u});
        }
      }
      ++in_grown[e];
      --in_rest[e];
      if (in_rest[e] == 1) {
        for (VertexId u : hg.pins(e)) {
          if (side[u] != 1) continue;
          gain[u] += w;
          heap.push({gain[u], u});
        }
      }
    }
  }
  return side;
}

namespace {

BipartitionAttempt evaluate(const PartitionState& state, int index) {
  BipartitionAttempt a;
  a.seed_index = index;
  a.assignment.assign(state.assignment().begin(), state.assignment().end());
  a.metric = state.metric();
  a.balanced = state.balanced();
  for (BlockId b = 0; b < 2; ++b) {
    const Weight w = state.block_weight(b);
    const Weight p = std::max<Weight>(1, state.perfect_block_weight(b));
    if (b == 0 || static_cast<__int128>(w) * a.heaviest_perfect > static_cast<__int128>(a.heaviest_weight) * p) {
      a.heaviest_weight = w;
      a.heaviest_perfect = p;
    }
  }
  return a;
}

}  // namespace

std::vector<BipartitionAttempt> bipartition_portfolio(const Hypergraph& hg, const BipartitionTargets& targets,
                                                      std::uint64_t seed, const InitialConfig& config,
                                                      const JetConfig& jet, const Executor& exec) {
  JetConfig pass = jet;
  pass.temperatures = {Rational{0, 1}};
  std::vector<BipartitionAttempt> attempts(static_cast<std::size_t>(config.portfolio_size));
  exec.parallel_tasks(attempts.size(), [&](std::size_t i) {
    const Executor sequential(1);
    const std::vector<BlockId> grown = greedy_growing(hg, targets, mix_seed(seed, i));
    PartitionState state(hg, {targets.perfect[0], targets.perfect[1]}, {targets.max[0], targets.max[1]},
                         targets.epsilon);
    state.assign(grown, sequential);
    jet_refine(state, pass, sequential);
    attempts[i] = evaluate(state, static_cast<int>(i));
  });
  return attempts;
}

double recursive_epsilon(Rational epsilon, BlockId k) {
  if (k <= 2) return epsilon.to_double();
  const int depth = static_cast<int>(std::ceil(std::log2(static_cast<double>(k))));
  return std::pow(1.0 + epsilon.to_double(), 1.0 / depth) - 1.0;
}

namespace {

struct SubHypergraph {
  Hypergraph hg;
  std::vector<VertexId> to_parent;
};

// Induced sub-hypergraph of one side; edges keep only their pins on that
// side and vanish below two pins.
SubHypergraph extract_side(const Hypergraph& hg, const std::vector<BlockId>& side, BlockId which) {
  SubHypergraph sub;
  std::vector<VertexId> local(hg.num_vertices(), kInvalidVertex);
  std::vector<Weight> weights;
  for (VertexId v = 0; v < hg.num_vertices(); ++v) {
    if (side[v] != which) continue;
    local[v] = static_cast<VertexId>(sub.to_parent.size());
    sub.to_parent.push_back(v);
    weights.push_back(hg.vertex_weight(v));
  }
  std::vector<std::size_t> offsets{0};
  std::vector<VertexId> pins;
  std::vector<Weight> edge_weights;
  for (EdgeId e = 0; e < hg.num_edges(); ++e) {
    const std::size_t before = pins.size();
    for (VertexId p : hg.pins(e)) {
      if (local[p] != kInvalidVertex) pins.push_back(local[p]);
    }
    if (pins.size() - before < 2) {
      pins.resize(before);
      continue;
    }
    offsets.push_back(pins.size());
    edge_weights.push_back(hg.edge_weight(e));
  }
  sub.hg = Hypergraph::from_csr(sub.to_parent.size(), std::move(offsets), std::move(pins),
                                std::move(edge_weights), std::move(weights));
  return sub;
}

void bisect(const Hypergraph& hg, std::span<const VertexId> to_input, BlockId first, BlockId count,
            double step_epsilon, std::uint64_t seed, const InitialConfig& config, const JetConfig& jet,
            const Executor& exec, std::vector<BlockId>& out) {
  if (count == 1 || hg.num_vertices() == 0) {
    for (VertexId v : to_input) out[v] = first;
    return;
  }
  const BlockId k0 = (count + 1) / 2;
  const BlockId k1 = count - k0;
  const Weight total = hg.total_vertex_weight();
  BipartitionTargets targets;
  targets.perfect[0] = static_cast<Weight>((static_cast<__int128>(total) * k0 + count - 1) / count);
  targets.perfect[1] = static_cast<Weight>((static_cast<__int128>(total) * k1 + count - 1) / count);
  for (int s = 0; s < 2; ++s) {
    targets.max[s] = static_cast<Weight>(std::floor((1.0 + step_epsilon) * static_cast<double>(targets.perfect[s])));
  }
  targets.epsilon = Rational::from_double(step_epsilon);

  const std::uint64_t step_seed = mix_seed(seed, (static_cast<std::uint64_t>(first) << 32) | static_cast<std::uint32_t>(count));
  const auto attempts = bipartition_portfolio(hg, targets, step_seed, config, jet, exec);
  const auto best = std::min_element(attempts.begin(), attempts.end(), better_attempt);
  const std::vector<BlockId>& side = best->assignment;

  auto recurse = [&](BlockId which, BlockId sub_first, BlockId sub_count) {
    if (sub_count == 1) {
      for (VertexId v = 0; v < hg.num_vertices(); ++v) {
        if (side[v] == which) out[to_input[v]] = sub_first;
      }
      return;
    }
    SubHypergraph sub = extract_side(hg, side, which);
    std::vector<VertexId> sub_to_input(sub.to_parent.size());
    for (std::size_t i = 0; i < sub.to_parent.size(); ++i) sub_to_input[i] = to_input[sub.to_parent[i]];
    bisect(sub.hg, sub_to_input, sub_first, sub_count, step_epsilon, seed, config, jet, exec, out);
  };
  exec.invoke([&] { recurse(0, first, k0); }, [&] { recurse(1, first + k0, k1); });
}

}  // namespace

InitialPartition initial_partition(const Hypergraph& hg, BlockId k, Rational epsilon, std::uint64_t seed,
                                   const InitialConfig& config, const JetConfig& jet, const Executor& exec) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  InitialPartition result;
  result.assignment.assign(hg.num_vertices(), 0);
  std::vector<VertexId> identity(hg.num_vertices());
  std::iota(identity.begin(), identity.end(), VertexId{0});
  bisect(hg, identity, 0, k, recursive_epsilon(epsilon, k), seed, config, jet, exec, result.assignment);
  const Weight limit = max_block_weight(hg.total_vertex_weight(), k, epsilon);
  std::vector<Weight> weights(k, 0);
  for (VertexId v = 0; v < hg.num_vertices(); ++v) weights[result.assignment[v]] += hg.vertex_weight(v);
  result.balanced = std::all_of(weights.begin(), weights.end(), [&](Weight w) { return w <= limit; });
  return result;
}

}  // namespace detpart
