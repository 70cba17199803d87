#include "sbfe/classic_sbe.hpp"

#include <string>

#include "sbfe/error.hpp"

namespace sbfe {

ClassicSbeResult classic_sbe(const Dataset& dataset, std::size_t target, const Split& split,
                             const TrainConfig& config) {
  if (target < 1 || target >= dataset.n_features()) {
    throw Error("target must be in [1, " + std::to_string(dataset.n_features() - 1) + "]");
  }
  ClassicSbeResult result;
  std::vector<FeatureId> remaining = dataset.feature_ids();
  while (remaining.size() > target) {
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      std::vector<FeatureId> candidate = remaining;
      candidate.erase(candidate.begin() + static_cast<std::ptrdiff_t>(i));
      const double score = uar(split_confusion(project(dataset, candidate), split, config));
      // remaining is ascending, so strict > keeps the smaller ID on ties
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    result.removal_order.push_back(remaining[best]);
    result.step_uar.push_back(best_score);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  result.selected_ids = remaining;
  return result;
}

}  // namespace sbfe
