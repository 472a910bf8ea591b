#include "detpart/jet.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <chrono>

#include <tbb/enumerable_thread_specific.h>

#include "detpart/io.h"
#include "detpart/parallel.h"

namespace detpart {

namespace {

struct AffinityScratch {
  explicit AffinityScratch(BlockId k) : affinity(static_cast<std::size_t>(k), 0) {}
  std::vector<Weight> affinity;
  std::vector<BlockId> touched;
};

bool passes_temperature(Gain gain, Weight internal_weight, Rational tau) {
  return static_cast<__int128>(gain) * tau.den >= -static_cast<__int128>(tau.num) * internal_weight;
}

}  // namespace

MoveCandidateSet compute_move_candidates(const PartitionState& state, Rational tau,
                                         std::span<const std::uint8_t> locks, const Executor& exec) {
  const Hypergraph& hg = state.hypergraph();
  const std::size_t n = hg.num_vertices();
  MoveCandidateSet out;
  out.target.assign(n, kInvalidBlock);
  out.gain.assign(n, 0);
  out.member.assign(n, 0);
  tbb::enumerable_thread_specific<AffinityScratch> scratch([&] { return AffinityScratch(state.k()); });

  exec.parallel_for(0, n, [&](std::size_t i) {
    const auto v = static_cast<VertexId>(i);
    if (!locks.empty() && locks[v]) return;
    if (hg.degree(v) == 0) return;
    auto& s = scratch.local();
    const BlockId from = state.block(v);
    Weight total = 0;
    Weight benefit = 0;
    for (EdgeId e : hg.incident_edges(v)) {
      const Weight w = hg.edge_weight(e);
      total += w;
      if (state.pin_count(e, from) == 1) benefit += w;
      state.for_each_connected_block(e, [&](BlockId b, std::uint32_t) {
        if (b == from) return;
        if (s.affinity[b] == 0) s.touched.push_back(b);
        s.affinity[b] += w;
      });
    }
    BlockId best = kInvalidBlock;
    Gain best_gain = 0;
    for (BlockId b : s.touched) {
      const Gain g = benefit - (total - s.affinity[b]);
      if (best == kInvalidBlock || g > best_gain || (g == best_gain && b < best)) {
        best = b;
        best_gain = g;
      }
      s.affinity[b] = 0;
    }
    s.touched.clear();
    if (best == kInvalidBlock) return;
    if (!passes_temperature(best_gain, total - benefit, tau)) return;
    out.member[v] = 1;
    out.target[v] = best;
    out.gain[v] = best_gain;
  });

  for (VertexId v = 0; v < n; ++v) {
    if (out.member[v]) out.vertices.push_back(v);
  }
  return out;
}

namespace {

// Sort key of the implicit move order.
struct OrderedPin {
  Gain gain;
  VertexId vertex;
};

inline bool comes_first(const OrderedPin& a, const OrderedPin& b) {
  return a.gain != b.gain ? a.gain > b.gain : a.vertex < b.vertex;
}

// Simulates the ordered moves on one edge with a local copy of the touched
// pin counts, reporting the edge's contribution to every mover.
template <typename Pins, typename Counts, typename Report>
void simulate_edge(const PartitionState& state, const MoveCandidateSet& candidates, EdgeId e, Weight w,
                   const Pins& ordered, std::size_t count, Counts& local, Report&& report) {
  std::size_t used = 0;
  auto slot = [&](BlockId b) -> std::uint32_t& {
    for (std::size_t i = 0; i < used; ++i) {
      if (local[i].first == b) return local[i].second;
    }
    if constexpr (requires { local.push_back(local[0]); }) {
      if (used == local.size()) local.emplace_back();
    }
    local[used] = {b, state.pin_count(e, b)};
    return local[used++].second;
  };
  for (std::size_t i = 0; i < count; ++i) {
    const VertexId v = ordered[i].vertex;
    Gain contribution = 0;
    std::uint32_t& from = slot(state.block(v));
    if (--from == 0) contribution += w;
    std::uint32_t& to = slot(candidates.target[v]);
    if (++to == 1) contribution -= w;
    if (contribution != 0) report(v, contribution);
  }
}

void sort_small(std::array<OrderedPin, 3>& pins, std::size_t count) {
  for (std::size_t i = 1; i < count; ++i) {
    for (std::size_t j = i; j > 0 && comes_first(pins[j], pins[j - 1]); --j) std::swap(pins[j], pins[j - 1]);
  }
}

}  // namespace

std::vector<Gain> afterburner_gains(const PartitionState& state, const MoveCandidateSet& candidates,
                                    const Executor& exec, AfterburnerOptions options) {
  const Hypergraph& hg = state.hypergraph();
  std::vector<Gain> recomputed(hg.num_vertices(), 0);
  std::vector<std::uint8_t> edge_flag(hg.num_edges(), 0);
  exec.parallel_for(0, candidates.vertices.size(), [&](std::size_t i) {
    for (EdgeId e : hg.incident_edges(candidates.vertices[i])) {
      std::atomic_ref<std::uint8_t>(edge_flag[e]).store(1, std::memory_order_relaxed);
    }
  });

  struct Buffers {
    std::vector<OrderedPin> pins;
    std::vector<std::pair<BlockId, std::uint32_t>> counts;
  };
  tbb::enumerable_thread_specific<Buffers> buffers;
  auto report = [&](VertexId v, Gain contribution) {
    std::atomic_ref<Gain>(recomputed[v]).fetch_add(contribution, std::memory_order_relaxed);
  };

  exec.parallel_for(0, hg.num_edges(), [&](std::size_t i) {
    if (!edge_flag[i]) return;
    const auto e = static_cast<EdgeId>(i);
    const Weight w = hg.edge_weight(e);
    std::array<OrderedPin, 3> small{};
    std::size_t count = 0;
    bool overflow = false;
    for (VertexId p : hg.pins(e)) {
      if (!candidates.member[p]) continue;
      if (count < 3) small[count] = {candidates.gain[p], p};
      if (++count > 3) {
        overflow = true;
        break;
      }
    }
    if (options.fast_paths && !overflow) {
      if (count == 1) {
        const VertexId v = small[0].vertex;
        Gain contribution = 0;
        if (state.pin_count(e, state.block(v)) == 1) contribution += w;
        if (state.pin_count(e, candidates.target[v]) == 0) contribution -= w;
        if (contribution != 0) report(v, contribution);
        return;
      }
      sort_small(small, count);
      std::array<std::pair<BlockId, std::uint32_t>, 6> local{};
      simulate_edge(state, candidates, e, w, small, count, local, report);
      return;
    }
    auto& buf = buffers.local();
    buf.pins.clear();
    for (VertexId p : hg.pins(e)) {
      if (candidates.member[p]) buf.pins.push_back({candidates.gain[p], p});
    }
    std::sort(buf.pins.begin(), buf.pins.end(), comes_first);
    buf.counts.clear();
    simulate_edge(state, candidates, e, w, buf.pins, buf.pins.size(), buf.counts, report);
  });
  return recomputed;
}

std::vector<Move> afterburner(const PartitionState& state, const MoveCandidateSet& candidates,
                              const Executor& exec, AfterburnerOptions options) {
  const std::vector<Gain> recomputed = afterburner_gains(state, candidates, exec, options);
  std::vector<Move> moves;
  for (VertexId v : candidates.vertices) {
    if (recomputed[v] > 0) moves.push_back({v, candidates.target[v]});
  }
  return moves;
}

RebalancePriority RebalancePriority::of(Gain gain, Weight weight) {
  if (gain < 0) return {gain, weight};
  return {gain * weight, 1};
}

std::vector<Move> rebalancing_moves(const PartitionState& state, Rational deadzone_factor, const Executor& exec) {
  const Hypergraph& hg = state.hypergraph();
  const BlockId k = state.k();
  std::vector<std::uint8_t> overloaded(k, 0);
  bool any = false;
  for (BlockId b = 0; b < k; ++b) {
    overloaded[b] = state.block_overloaded(b) ? 1 : 0;
    any = any || overloaded[b];
  }
  if (!any) return {};

  // Blocks within the deadzone below L_max accept no vertices:
  // c(V_j) >= L_max - d * eps * perfect.
  const Rational eps = state.epsilon();
  std::vector<std::uint8_t> open(k, 0);
  for (BlockId b = 0; b < k; ++b) {
    const __int128 scale = static_cast<__int128>(deadzone_factor.den) * eps.den;
    const __int128 lhs = static_cast<__int128>(state.block_weight(b)) * scale;
    const __int128 rhs = static_cast<__int128>(state.max_block_weight(b)) * scale -
                         static_cast<__int128>(deadzone_factor.num) * eps.num * state.perfect_block_weight(b);
    open[b] = lhs < rhs ? 1 : 0;
  }

  struct Choice {
    BlockId target = kInvalidBlock;
    Gain gain = 0;
  };
  const std::size_t n = hg.num_vertices();
  std::vector<Choice> choice(n);
  tbb::enumerable_thread_specific<AffinityScratch> scratch([&] { return AffinityScratch(k); });

  exec.parallel_for(0, n, [&](std::size_t i) {
    const auto v = static_cast<VertexId>(i);
    const BlockId from = state.block(v);
    if (!overloaded[from]) return;
    const Weight c = hg.vertex_weight(v);
    // Heavy vertices would drop the source far below the average.
    if (2 * c > 3 * (state.block_weight(from) - state.perfect_block_weight(from))) return;
    auto& s = scratch.local();
    Weight total = 0;
    Weight benefit = 0;
    for (EdgeId e : hg.incident_edges(v)) {
      const Weight w = hg.edge_weight(e);
      total += w;
      if (state.pin_count(e, from) == 1) benefit += w;
      state.for_each_connected_block(e, [&](BlockId b, std::uint32_t) {
        if (b == from) return;
        if (s.affinity[b] == 0) s.touched.push_back(b);
        s.affinity[b] += w;
      });
    }
    Choice best;
    for (BlockId b = 0; b < k; ++b) {
      if (b == from || !open[b] || state.block_weight(b) + c > state.max_block_weight(b)) continue;
      const Gain g = benefit - total + s.affinity[b];
      if (best.target == kInvalidBlock || g > best.gain) best = {b, g};
    }
    for (BlockId b : s.touched) s.affinity[b] = 0;
    s.touched.clear();
    choice[v] = best;
  });

  struct Entry {
    BlockId from;
    RebalancePriority priority;
    VertexId vertex;
  };
  std::vector<Entry> entries;
  for (VertexId v = 0; v < n; ++v) {
    if (choice[v].target != kInvalidBlock) {
      entries.push_back({state.block(v), RebalancePriority::of(choice[v].gain, hg.vertex_weight(v)), v});
    }
  }
  exec.sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.from != b.from) return a.from < b.from;
    if (!(a.priority == b.priority)) return a.priority > b.priority;
    return a.vertex < b.vertex;
  });

  std::vector<std::size_t> groups;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i == 0 || entries[i].from != entries[i - 1].from) groups.push_back(i);
  }
  groups.push_back(entries.size());
  std::vector<std::size_t> take(groups.size() - 1, 0);
  exec.parallel_for(0, groups.size() - 1, [&](std::size_t g) {
    const std::size_t begin = groups[g];
    const std::size_t end = groups[g + 1];
    const BlockId b = entries[begin].from;
    const Weight overload = state.block_weight(b) - state.max_block_weight(b);
    std::vector<Weight> prefix(end - begin);
    Weight running = 0;
    for (std::size_t i = begin; i < end; ++i) {
      running += hg.vertex_weight(entries[i].vertex);
      prefix[i - begin] = running;
    }
    // Minimal prefix whose weight covers the overload.
    const auto it = std::lower_bound(prefix.begin(), prefix.end(), overload);
    take[g] = it == prefix.end() ? prefix.size() : static_cast<std::size_t>(it - prefix.begin()) + 1;
  });

  std::vector<Move> moves;
  for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
    for (std::size_t i = groups[g]; i < groups[g] + take[g]; ++i) {
      moves.push_back({entries[i].vertex, choice[entries[i].vertex].target});
    }
  }
  return moves;
}

RebalanceResult rebalance(PartitionState& state, const JetConfig& config, const Executor& exec) {
  RebalanceResult result;
  while (!state.balanced() && result.rounds < config.max_rebalance_rounds) {
    std::vector<Move> moves = rebalancing_moves(state, config.deadzone_factor, exec);
    if (moves.empty()) moves = rebalancing_moves(state, Rational{0, 1}, exec);
    if (moves.empty()) break;
    state.apply_moves(moves, exec);
    result.moves.insert(result.moves.end(), moves.begin(), moves.end());
    ++result.rounds;
  }
  result.balanced = state.balanced();
  result.could_not_rebalance = !result.balanced;
  return result;
}

namespace {

// Test-only fault: an unordered float reduction whose chunking follows the
// thread count decides which move to drop.
void inject_float_reduction(std::vector<Move>& moves, const MoveCandidateSet& candidates, const Executor& exec) {
  if (moves.empty() || candidates.vertices.empty()) return;
  const std::size_t chunks = static_cast<std::size_t>(exec.num_threads());
  const std::size_t size = candidates.vertices.size();
  float total = 0.0f;
  for (std::size_t c = 0; c < chunks; ++c) {
    float partial = 0.0f;
    for (std::size_t i = c * size / chunks; i < (c + 1) * size / chunks; ++i) {
      const VertexId v = candidates.vertices[i];
      partial += 1.0f / static_cast<float>(3 + v % 97 + static_cast<std::uint64_t>(std::abs(candidates.gain[v])));
    }
    total += partial;
  }
  const auto bits = std::bit_cast<std::uint32_t>(total);
  moves.erase(moves.begin() + static_cast<std::ptrdiff_t>(splitmix64(bits) % moves.size()));
}

std::vector<Move> diff_moves(std::span<const BlockId> current, std::span<const BlockId> target) {
  std::vector<Move> moves;
  for (VertexId v = 0; v < current.size(); ++v) {
    if (current[v] != target[v]) moves.push_back({v, target[v]});
  }
  return moves;
}

}  // namespace

JetStats jet_refine(PartitionState& state, const JetConfig& config, const Executor& exec,
                    const JetObserver& observer) {
  using Clock = std::chrono::steady_clock;
  JetStats stats;
  const std::size_t n = state.hypergraph().num_vertices();
  std::vector<std::uint8_t> locks(n, 0);
  std::vector<VertexId> locked;

  auto timed_rebalance = [&] {
    const auto start = Clock::now();
    RebalanceResult r = rebalance(state, config, exec);
    stats.rebalance_seconds += std::chrono::duration<double>(Clock::now() - start).count();
    return r;
  };

  if (!state.balanced()) {
    const RebalanceResult r = timed_rebalance();
    stats.could_not_rebalance = r.could_not_rebalance;
  }
  bool have_best = state.balanced();
  std::vector<BlockId> best(state.assignment().begin(), state.assignment().end());
  Gain best_metric = state.metric();

  for (std::size_t t = 0; t < config.temperatures.size(); ++t) {
    const Rational tau = config.temperatures[t];
    for (VertexId v : locked) locks[v] = 0;
    locked.clear();
    int nonimproving = 0;
    while (nonimproving < config.max_nonimproving) {
      const bool had_locks = !locked.empty();
      const MoveCandidateSet candidates =
          compute_move_candidates(state, tau, config.lock_moves ? std::span<const std::uint8_t>(locks)
                                                                : std::span<const std::uint8_t>{},
                                  exec);
      std::vector<Move> moves = afterburner(state, candidates, exec);
      if (config.inject_float_reduction) inject_float_reduction(moves, candidates, exec);
      state.apply_moves(moves, exec);
      RebalanceResult rebalanced;
      if (!state.balanced()) rebalanced = timed_rebalance();

      for (VertexId v : locked) locks[v] = 0;
      locked.clear();
      if (config.lock_moves) {
        for (const Move& m : moves) locked.push_back(m.vertex);
        for (const Move& m : rebalanced.moves) locked.push_back(m.vertex);
        for (VertexId v : locked) locks[v] = 1;
      }

      ++stats.iterations;
      ++nonimproving;
      if (observer) {
        observer(JetIteration{t, moves, rebalanced.moves, state.metric(), state.balanced()});
      }
      if (state.balanced() && (!have_best || state.metric() < best_metric)) {
        std::copy(state.assignment().begin(), state.assignment().end(), best.begin());
        best_metric = state.metric();
        have_best = true;
        nonimproving = 0;
      }
      if (moves.empty() && rebalanced.moves.empty() && !had_locks) break;
    }
    if (have_best) {
      const std::vector<Move> back = diff_moves(state.assignment(), best);
      if (!back.empty()) {
        state.apply_moves(back, exec);
        ++stats.rollbacks;
      }
    }
    stats.phase_hashes.push_back(partition_hash(state.assignment()));
  }
  stats.could_not_rebalance = !state.balanced();
  return stats;
}

}  // namespace detpart
