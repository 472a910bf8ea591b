#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "detpart/config.h"
#include "detpart/io.h"
#include "detpart/parallel.h"
#include "detpart/partition.h"
#include "detpart/partitioner.h"
#include "support/instances.h"

using namespace detpart;

namespace {

Gain recomputed_metric(const Hypergraph& hg, BlockId k, const std::vector<BlockId>& a) {
  PartitionState s(hg, k, {3, 100});
  s.assign(a, Executor(1));
  return s.metric();
}

}  // namespace

TEST_CASE("presets and overrides") {
  const Config jet = Config::from_preset("detjet");
  CHECK_FALSE(jet.flows.enabled);
  const Config flows = Config::from_preset("detflows");
  CHECK(flows.flows.enabled);
  CHECK(flows.preset == "detflows");
  CHECK_THROWS_AS(Config::from_preset("fast"), std::invalid_argument);

  Config c;
  c.set("jet.temperatures=0.75,0.5,0");
  REQUIRE(c.jet.temperatures.size() == 3);
  CHECK(c.jet.temperatures[0] == Rational{3, 4});
  CHECK(c.jet.temperatures[2] == Rational{0, 1});
  c.set("coarsening.swap_prevention", "off");
  CHECK_FALSE(c.coarsening.swap_prevention);
  c.set("coarsening.contraction_limit=500");
  CHECK(c.coarsening.effective_contraction_limit(4) == 500);
  c.set("flows.max_piercing_factor=1.5");
  CHECK(c.flows.max_piercing_factor == 1.5);
  c.set("audit=true");
  CHECK(c.audit);

  CHECK_THROWS_AS(c.set("jet.nope=1"), std::invalid_argument);
  CHECK_THROWS_AS(c.set("jet.lock_moves=maybe"), std::invalid_argument);
  CHECK_THROWS_AS(c.set("no_equals_sign"), std::invalid_argument);

  Config bad;
  CHECK_THROWS_AS(bad.set("jet.temperatures=0,0.5"), std::invalid_argument);
  CHECK_THROWS_AS(bad.set("jet.temperatures=1.5"), std::invalid_argument);
  CHECK_THROWS_AS(bad.set("initial.portfolio_size=0"), std::invalid_argument);
  bad.initial.portfolio_size = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_NOTHROW(Config{}.validate());
}

TEST_CASE("pipeline on the running example") {
  const Hypergraph hg = testing::running_example();
  const auto r = partition_hypergraph(hg, 2, {3, 100}, 1, Config{}, Executor(1));
  CHECK(r.balanced);
  CHECK(r.metric == 1);
  CHECK(r.levels == 0);
  REQUIRE_FALSE(r.phase_hashes.empty());
  CHECK(r.phase_hashes.front().phase == "coarsening");
  CHECK(r.phase_hashes[1].phase == "initial");
}

TEST_CASE("pipeline results are consistent, balanced and thread independent") {
  const auto suite = testing::desk_suite();
  for (const char* preset : {"detjet", "detflows"}) {
    Config config = Config::from_preset(preset);
    config.audit = true;
    for (std::size_t i = 0; i < suite.size(); i += 3) {
      const auto& instance = suite[i];
      for (BlockId k : {2, 16}) {
        PartitionResult reference;
        for (int threads : {1, 3}) {
          const auto r = partition_hypergraph(instance.hg, k, {3, 100}, 7, config, Executor(threads));
          CAPTURE(instance.name);
          CAPTURE(k);
          CHECK(r.balanced);
          CHECK(r.metric == recomputed_metric(instance.hg, k, r.assignment));
          CHECK(r.assignment.size() == instance.hg.num_vertices());
          CHECK(std::all_of(r.assignment.begin(), r.assignment.end(), [&](BlockId b) { return b < k; }));
          if (threads == 1) {
            reference = r;
            continue;
          }
          CHECK(r.assignment == reference.assignment);
          CHECK(r.phase_hashes == reference.phase_hashes);
        }
        const bool has_flows = std::any_of(reference.phase_hashes.begin(), reference.phase_hashes.end(),
                                           [](const PhaseHash& p) { return p.phase.rfind("flows/", 0) == 0; });
        CHECK(has_flows == config.flows.enabled);
      }
    }
  }
}

TEST_CASE("phase names follow the level structure") {
  const Hypergraph hg = testing::grid_stencil(60, 60);
  const auto r = partition_hypergraph(hg, 4, {3, 100}, 2, Config::from_preset("detflows"), Executor(1));
  REQUIRE(r.levels > 0);
  std::vector<std::string> names;
  for (const auto& p : r.phase_hashes) names.push_back(p.phase);
  CHECK(names[0] == "coarsening");
  CHECK(names[1] == "initial");
  const std::string top = "jet/L" + std::to_string(r.levels) + "/t0";
  CHECK(names[2] == top);
  CHECK(std::find(names.begin(), names.end(), "jet/L0/t2") != names.end());
  CHECK(std::find(names.begin(), names.end(), "flows/L0/r0") != names.end());
  CHECK(r.phase_hashes.back().phase.rfind("flows/L0/", 0) == 0);
}

TEST_CASE("different seeds give valid, usually different partitions") {
  const Hypergraph hg = testing::random_hypergraph(1500, 2500, 6, 4);
  std::vector<std::uint64_t> hashes;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto r = partition_hypergraph(hg, 8, {3, 100}, seed, Config{}, Executor(2));
    CHECK(r.balanced);
    hashes.push_back(partition_hash(r.assignment));
  }
  std::sort(hashes.begin(), hashes.end());
  CHECK(std::unique(hashes.begin(), hashes.end()) - hashes.begin() > 1);
}

TEST_CASE("k = 1 and k = n") {
  const Hypergraph hg = testing::random_hypergraph(40, 60, 4, 9);
  const auto one = partition_hypergraph(hg, 1, {3, 100}, 1, Config{}, Executor(1));
  CHECK(one.metric == 0);
  CHECK(one.balanced);
  const auto all = partition_hypergraph(hg, 40, {0, 1}, 1, Config{}, Executor(1));
  CHECK(all.balanced);
  std::vector<BlockId> sorted = all.assignment;
  std::sort(sorted.begin(), sorted.end());
  for (BlockId b = 0; b < 40; ++b) CHECK(sorted[b] == b);
}
