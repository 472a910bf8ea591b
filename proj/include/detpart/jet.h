#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "detpart/config.h"
#include "detpart/partition.h"
#include "detpart/types.h"

namespace detpart {

class Executor;

// Vertices selected for an unconstrained move together with their target
// block and the gain measured against the current partition.
struct MoveCandidateSet {
  std::vector<VertexId> vertices;      // ascending
  std::vector<BlockId> target;         // per vertex, kInvalidBlock if not a member
  std::vector<Gain> gain;              // per vertex, valid for members
  std::vector<std::uint8_t> member;    // per vertex

  bool contains(VertexId v) const { return member[v] != 0; }
};

// For every unlocked vertex, the adjacent block with the highest gain (ties
// to the smaller id). v is kept if gain >= -tau * (weight of incident edges
// with another pin in v's block). Balance is ignored. `locks` may be empty.
MoveCandidateSet compute_move_candidates(const PartitionState& state, Rational tau,
                                         std::span<const std::uint8_t> locks, const Executor& exec);

struct AfterburnerOptions {
  // Specialised paths for 1..3 candidate pins per edge.
  bool fast_paths = true;
};

// Recomputed gain of every candidate under the implicit order "highest
// precomputed gain first, then smaller vertex id", simulated per edge.
std::vector<Gain> afterburner_gains(const PartitionState& state, const MoveCandidateSet& candidates,
                                    const Executor& exec, AfterburnerOptions options = {});

// Candidates whose recomputed gain is positive, in ascending vertex order.
std::vector<Move> afterburner(const PartitionState& state, const MoveCandidateSet& candidates,
                              const Executor& exec, AfterburnerOptions options = {});

// Rebalancing priority: gain / c(v) for negative gains, gain * c(v)
// otherwise. Kept as an exact fraction.
struct RebalancePriority {
  Gain numerator;
  Weight denominator;

  static RebalancePriority of(Gain gain, Weight weight);
  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  friend bool operator>(const RebalancePriority& a, const RebalancePriority& b) {
    return static_cast<__int128>(a.numerator) * b.denominator > static_cast<__int128>(b.numerator) * a.denominator;
  }
  friend bool operator==(const RebalancePriority& a, const RebalancePriority& b) {
    return static_cast<__int128>(a.numerator) * b.denominator == static_cast<__int128>(b.numerator) * a.denominator;
  }
};

struct RebalanceResult {
  bool balanced = false;
  bool could_not_rebalance = false;
  int rounds = 0;
  std::vector<Move> moves;  // all moves in application order (a vertex may repeat across rounds)
};

// Moves minimal high-priority prefixes out of overloaded blocks, round by
// round, until the partition is balanced or no round makes progress.
RebalanceResult rebalance(PartitionState& state, const JetConfig& config, const Executor& exec);

// One rebalancing round's selection without applying it (exposed for tests).
std::vector<Move> rebalancing_moves(const PartitionState& state, Rational deadzone_factor, const Executor& exec);

struct JetIteration {
  std::size_t temperature_index;
  std::vector<Move> unconstrained_moves;
  std::vector<Move> rebalancing_moves;
  Gain metric;
  bool balanced;
};

struct JetStats {
  int iterations = 0;
  int rollbacks = 0;
  double rebalance_seconds = 0.0;
  std::vector<std::uint64_t> phase_hashes;  // assignment hash after each temperature
  bool could_not_rebalance = false;
};

using JetObserver = std::function<void(const JetIteration&)>;

// Jet refinement over the configured temperature schedule with vertex
// locking and rollback to the best balanced partition seen.
JetStats jet_refine(PartitionState& state, const JetConfig& config, const Executor& exec,
                    const JetObserver& observer = {});

}  // namespace detpart
