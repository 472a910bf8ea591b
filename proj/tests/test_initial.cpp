#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "detpart/initial.h"
#include "detpart/io.h"
#include "detpart/parallel.h"
#include "detpart/partition.h"
#include "detpart/random.h"
#include "support/instances.h"

using namespace detpart;

namespace {

Gain metric_of(const Hypergraph& hg, BlockId k, const std::vector<BlockId>& a, Rational eps = {3, 100}) {
  PartitionState s(hg, k, eps);
  s.assign(a, Executor(1));
  return s.metric();
}

BipartitionTargets halves(const Hypergraph& hg, Rational eps) {
  const Weight total = hg.total_vertex_weight();
  const Weight perfect = (total + 1) / 2;
  const Weight max = perfect * (eps.den + eps.num) / eps.den;
  return {{perfect, perfect}, {max, max}, eps};
}

}  // namespace

TEST_CASE("recursive epsilon") {
  CHECK(recursive_epsilon({3, 100}, 2) == doctest::Approx(0.03));
  CHECK(recursive_epsilon({3, 100}, 4) == doctest::Approx(std::sqrt(1.03) - 1));
  CHECK(recursive_epsilon({3, 100}, 5) == doctest::Approx(std::cbrt(1.03) - 1));
  CHECK(recursive_epsilon({1, 10}, 64) == doctest::Approx(std::pow(1.1, 1.0 / 6) - 1));
}

TEST_CASE("k = 1 puts everything into block 0") {
  const Hypergraph hg = testing::random_hypergraph(50, 80, 4, 3);
  const auto r = initial_partition(hg, 1, {3, 100}, 1, {}, {}, Executor(1));
  CHECK(r.balanced);
  CHECK(std::all_of(r.assignment.begin(), r.assignment.end(), [](BlockId b) { return b == 0; }));
}

TEST_CASE("running example bipartition is optimal") {
  const Hypergraph hg = testing::running_example();
  const auto r = initial_partition(hg, 2, {0, 1}, 1, {}, {}, Executor(1));
  CHECK(r.balanced);
  CHECK(metric_of(hg, 2, r.assignment, {0, 1}) == 1);
}

TEST_CASE("greedy growing respects the block 0 limit") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Hypergraph hg = testing::random_hypergraph(120, 200, 5, seed, true);
    const BipartitionTargets t = halves(hg, {3, 100});
    const auto a = greedy_growing(hg, t, seed);
    Weight w0 = 0;
    for (VertexId v = 0; v < hg.num_vertices(); ++v) {
      if (a[v] == 0) w0 += hg.vertex_weight(v);
    }
    CHECK(w0 <= t.max[0]);
    CHECK(w0 > 0);
  }
}

TEST_CASE("portfolio attempts are ordered and the winner is the best") {
  const Hypergraph hg = testing::planted(400, 4, 700, 0.85, 9);
  const BipartitionTargets t = halves(hg, {3, 100});
  const auto attempts = bipartition_portfolio(hg, t, 5, {}, {}, Executor(2));
  REQUIRE(attempts.size() == 16);
  for (std::size_t i = 0; i < attempts.size(); ++i) {
    CHECK(attempts[i].seed_index == static_cast<int>(i));
    CHECK(attempts[i].metric == metric_of(hg, 2, attempts[i].assignment));
  }
  const auto best = *std::min_element(attempts.begin(), attempts.end(), better_attempt);
  CHECK(best.balanced);
}

TEST_CASE("k = 2 returns the best portfolio attempt") {
  const Hypergraph hg = testing::planted(400, 4, 700, 0.85, 9);
  const Weight total = hg.total_vertex_weight();
  const Weight perfect = (total + 1) / 2;
  const Weight max = static_cast<Weight>(std::floor(1.03 * static_cast<double>(perfect)));
  const BipartitionTargets t{{perfect, perfect}, {max, max}, {3, 100}};
  const auto attempts = bipartition_portfolio(hg, t, mix_seed(5, 2), {}, {}, Executor(1));
  const auto best = *std::min_element(attempts.begin(), attempts.end(), better_attempt);
  const auto r = initial_partition(hg, 2, {3, 100}, 5, {}, {}, Executor(3));
  CHECK(r.assignment == best.assignment);
  CHECK(metric_of(hg, 2, r.assignment) == best.metric);
}

TEST_CASE("better_attempt ordering") {
  BipartitionAttempt a, b;
  a.balanced = true;
  a.metric = 10;
  b.balanced = false;
  b.metric = 1;
  CHECK(better_attempt(a, b));
  b.balanced = true;
  CHECK(better_attempt(b, a));
  b.metric = 10;
  a.heaviest_weight = 11;
  a.heaviest_perfect = 10;
  b.heaviest_weight = 12;
  b.heaviest_perfect = 10;
  CHECK(better_attempt(a, b));
  b.heaviest_weight = 11;
  a.seed_index = 0;
  b.seed_index = 1;
  CHECK(better_attempt(a, b));
  CHECK_FALSE(better_attempt(b, a));
}

TEST_CASE("non-power-of-two k yields balanced partitions using all blocks") {
  for (BlockId k : {3, 5, 6, 7, 12}) {
    const Hypergraph hg = testing::grid_stencil(30, 30);
    const auto r = initial_partition(hg, k, {3, 100}, 4, {}, {}, Executor(1));
    CHECK(r.balanced);
    std::vector<Weight> w(k, 0);
    for (VertexId v = 0; v < hg.num_vertices(); ++v) {
      REQUIRE(r.assignment[v] < k);
      w[r.assignment[v]] += hg.vertex_weight(v);
    }
    const Weight lmax = max_block_weight(hg.total_vertex_weight(), k, {3, 100});
    for (BlockId b = 0; b < k; ++b) {
      CHECK(w[b] > 0);
      CHECK(w[b] <= lmax);
    }
  }
}

TEST_CASE("initial partition is identical across thread counts") {
  const Hypergraph hg = testing::powerlaw(1500, 2500, 8);
  for (BlockId k : {2, 8, 13}) {
    std::uint64_t reference = 0;
    for (int threads : {1, 2, 4, 8}) {
      const auto r = initial_partition(hg, k, {3, 100}, 17, {}, {}, Executor(threads));
      const std::uint64_t h = partition_hash(r.assignment);
      if (threads == 1) reference = h;
      CHECK(h == reference);
    }
  }
}
