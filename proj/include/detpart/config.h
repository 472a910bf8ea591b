#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "detpart/types.h"

namespace detpart {

struct CoarseningConfig {
  // Coarsening stops once the vertex count is at most this value.
  // 0 means 160 * k.
  std::size_t contraction_limit = 0;
  // max_cluster_weight = ceil(factor * c(V) / contraction_limit).
  double max_cluster_weight_factor = 1.0;
  bool prefix_doubling = true;
  bool swap_prevention = true;
  bool rating_bugfix = true;
  // Number of equal random subrounds when prefix doubling is off.
  int subrounds = 3;

  std::size_t effective_contraction_limit(BlockId k) const {
    return contraction_limit != 0 ? contraction_limit : 160 * static_cast<std::size_t>(k);
  }
};

struct InitialConfig {
  int portfolio_size = 16;
};

struct JetConfig {
  std::vector<Rational> temperatures{{3, 4}, {3, 8}, {0, 1}};
  int max_nonimproving = 8;
  Rational deadzone_factor{1, 10};
  bool lock_moves = true;
  int max_rebalance_rounds = 64;
  // Test-only fault: perturbs candidate selection with a float sum whose
  // chunking follows the thread count.
  bool inject_float_reduction = false;
};

struct FlowConfig {
  bool enabled = false;
  // Wall-clock budget per flow phase in seconds; 0 disables the limit.
  // A finite budget makes results depend on machine speed.
  double time_budget_s = 0.0;
  double max_piercing_factor = 2.0;
};

struct Config {
  std::string preset = "detjet";
  CoarseningConfig coarsening;
  InitialConfig initial;
  JetConfig jet;
  FlowConfig flows;
  // Recompute partition bookkeeping from scratch after every refinement
  // phase and throw on mismatch.
  bool audit = false;

  // "detjet" or "detflows"; throws std::invalid_argument otherwise.
  static Config from_preset(std::string_view name);

  // Applies one "key=value" override, e.g. "jet.temperatures=0.75,0".
  void set(std::string_view key, std::string_view value);
  void set(std::string_view assignment);

  void validate() const;
};

}  // namespace detpart
