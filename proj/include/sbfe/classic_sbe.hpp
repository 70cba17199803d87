#pragma once

#include <cstddef>
#include <vector>

#include "sbfe/classifier.hpp"
#include "sbfe/dataset.hpp"

namespace sbfe {

struct ClassicSbeResult {
  std::vector<FeatureId> removal_order;
  std::vector<FeatureId> selected_ids;
  /// UAR of the surviving set after each removal.
  std::vector<double> step_uar;
};

/// Exhaustive one-at-a-time backward elimination on a fixed split: at every
/// step each remaining feature is dropped in turn, and the feature whose
/// removal leaves the highest split UAR goes (ties: smaller ID). Quadratic in
/// the feature count, so intended for small cross-check problems.
ClassicSbeResult classic_sbe(const Dataset& dataset, std::size_t target, const Split& split,
                             const TrainConfig& config);

}  // namespace sbfe
