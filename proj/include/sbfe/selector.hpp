#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "sbfe/classifier.hpp"
#include "sbfe/dataset.hpp"
#include "sbfe/random.hpp"

namespace sbfe {

/// How a candidate subset is scored.
enum class Validation {
  kfold,        ///< stratified k-fold subsampling, folds redrawn every iteration
  fixed_split,  ///< one stratified train/test split reused for every evaluation
};

struct SelectionConfig {
  std::size_t target_count = 1;  ///< global stopping criterion: features to keep
  std::size_t k_folds = 3;
  double local_threshold = 0.6;  ///< step ends once the iteration-UAR stdev drops below this
  std::size_t min_iterations_per_step = 5;
  std::size_t max_iterations_per_step = 50;
  double removal_fraction = 0.05;
  std::size_t n_bins = 10;
  bool counter_score_enabled = true;
  std::optional<std::size_t> subset_size_override;
  std::uint64_t seed = 0;
  TrainConfig train;
  Validation validation = Validation::kfold;
  double split_test_fraction = 0.3;  ///< only used with Validation::fixed_split
  std::size_t jobs = 1;              ///< worker threads for subset evaluation

  void validate(std::size_t n_features) const;
  bool operator==(const SelectionConfig&) const = default;
};

/// Mutable search state. Relevance is keyed exactly by `remaining_ids`.
struct SelectionState {
  SelectionState(std::vector<FeatureId> ids, std::size_t n_classes, std::uint64_t partition_seed);

  std::vector<FeatureId> remaining_ids;
  std::map<FeatureId, double> relevance;
  std::vector<double> step_scores;  ///< P_i for each iteration of the current step
  ConfusionCounts step_counts;      ///< cumulated over the current step, gives E
  std::size_t step_index = 0;
  std::size_t iteration_index = 0;  ///< within the current step
  std::uint64_t total_iterations = 0;
  std::uint64_t subset_evaluations = 0;
  std::mt19937_64 rng;

  /// Re-initialises everything scoped to one step: relevance back to 0,
  /// empty step scores and step counts.
  void begin_step();
};

struct RemovedFeature {
  FeatureId id;
  double relevance;
  bool operator==(const RemovedFeature&) const = default;
};

struct StepRecord {
  std::size_t step = 0;
  std::size_t iterations = 0;
  std::vector<double> iteration_scores;
  double local_criterion = 0.0;
  bool hit_iteration_cap = false;
  double baseline_uar = 0.0;  ///< E at the end of the step
  double alpha = 0.0;
  std::vector<RemovedFeature> removed;
  std::size_t remaining_after = 0;
  double wall_seconds = 0.0;  ///< excluded from equality
  bool operator==(const StepRecord& o) const;
};

struct SelectionResult {
  std::vector<FeatureId> selected_ids;
  std::vector<StepRecord> trace;
  std::uint64_t subset_evaluations = 0;
  bool operator==(const SelectionResult&) const = default;

  /// Every removed ID in removal order.
  std::vector<FeatureId> removal_order() const;
};

/// Scores candidate subsets with the configured validation scheme. Subsets may
/// be evaluated on several threads; results always come back in input order.
class SubsetEvaluator {
 public:
  SubsetEvaluator(const Dataset& dataset, const SelectionConfig& config);

  /// `round` selects the fold assignment; equal rounds give equal folds.
  std::vector<ConfusionCounts> evaluate(std::span<const std::vector<FeatureId>> subsets,
                                        std::uint64_t round) const;

  const Dataset& dataset() const { return *dataset_; }
  const std::optional<Split>& fixed_split() const { return split_; }

 private:
  ConfusionCounts evaluate_one(const std::vector<FeatureId>& subset, std::uint64_t round) const;

  const Dataset* dataset_;
  SelectionConfig config_;
  StreamSplitter streams_;
  std::optional<Split> split_;
};

/// The split used by Validation::fixed_split for this dataset and seed.
Split fixed_split_for(const Dataset& dataset, const SelectionConfig& config);

/// round(sqrt(n)), at least 1.
std::size_t subset_size(std::size_t n_remaining);

/// Shuffles the remaining IDs with the state's generator and chunks them.
std::vector<std::vector<FeatureId>> partition_subsets(SelectionState& state, std::size_t size);

/// One pass over every remaining feature: evaluate each random subset, fold
/// its counts into the step total, and credit each member with P{S_n} - E.
/// Returns the iteration score P_i (UAR of this iteration's merged counts).
double run_iteration(SelectionState& state, const SubsetEvaluator& evaluator,
                     const SelectionConfig& config);

/// Population standard deviation of the step's iteration scores.
double local_criterion(std::span<const double> step_scores);

/// Adds alpha * I_f to every remaining feature and returns alpha, where
/// alpha = max(0, max R_f) * remaining / full_count. No-op (alpha 0) when disabled.
double apply_counter_score(SelectionState& state, const std::map<FeatureId, double>& scores,
                           std::size_t full_count, bool enabled = true);

/// max(1, ceil(fraction * n_remaining)), never cutting below `target`.
std::size_t removal_count(std::size_t n_remaining, std::size_t target, double fraction);

/// Removes the m lowest-relevance features (ties: smaller ID first) and
/// returns them in removal order.
std::vector<RemovedFeature> select_lsf(SelectionState& state, std::size_t m);

using StepObserver = std::function<void(const StepRecord&)>;

/// Full backward elimination down to config.target_count features.
SelectionResult run_selection(const Dataset& dataset, const SelectionConfig& config,
                              const StepObserver& observer = {});

}  // namespace sbfe
