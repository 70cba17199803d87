#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sbfe/dataset.hpp"

namespace sbfe {

/// Linear SVM training parameters.
///
/// Training minimises lambda/2 * (|w|^2 + b^2) + mean hinge loss with
/// lambda = 1 / (C * n). The step size at update t (1-based, counted across
/// epochs) is 1 / (lambda * (t + rate_offset)).
struct TrainConfig {
  double C = 1.0;
  std::size_t epochs = 20;
  double rate_offset = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<FeatureId> active_ids;
  Standardizer standardizer;

  /// w . standardize(x) + b for a raw row ordered like active_ids.
  double decision_value(std::span<const double> raw_row) const;
};

/// Per-class tallies of correct (C_iP) and wrong (C_iF) predictions, keyed by
/// the true class.
class ConfusionCounts {
 public:
  ConfusionCounts() = default;
  explicit ConfusionCounts(std::size_t n_classes) : correct_(n_classes, 0), wrong_(n_classes, 0) {}
  ConfusionCounts(std::vector<std::uint64_t> correct, std::vector<std::uint64_t> wrong);

  std::size_t n_classes() const { return correct_.size(); }
  std::uint64_t correct(std::size_t cls) const { return correct_[cls]; }
  std::uint64_t wrong(std::size_t cls) const { return wrong_[cls]; }
  std::uint64_t total() const;

  void record(ClassLabel truth, ClassLabel predicted);
  ConfusionCounts& operator+=(const ConfusionCounts& other);
  friend ConfusionCounts operator+(ConfusionCounts a, const ConfusionCounts& b) { return a += b; }

  bool operator==(const ConfusionCounts&) const = default;

 private:
  std::vector<std::uint64_t> correct_;
  std::vector<std::uint64_t> wrong_;
};

/// Unweighted average recall: mean over classes of C_iP / (C_iP + C_iF).
/// Throws when a class has no evaluated samples.
double uar(const ConfusionCounts& counts);

/// Trains on `row_indices` of the view. Binary problems only; both classes
/// must be present in the training rows. Identical inputs and seed give
/// bitwise-identical models.
LinearModel train(const FeatureSubsetView& view, std::span<const std::size_t> row_indices,
                  const TrainConfig& config);

/// Class 1 when the decision value is strictly positive, class 0 otherwise.
ClassLabel predict(const LinearModel& model, const FeatureSubsetView& view, std::size_t row);

/// Objective value of `model` on the given rows (same form as training minimises).
double regularized_hinge_loss(const LinearModel& model, const FeatureSubsetView& view,
                              std::span<const std::size_t> row_indices, double C);

/// Seeded stratified assignment of rows to k folds. Every row appears in
/// exactly one fold; each class is dealt round-robin after shuffling.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const ClassLabel> labels,
                                                       std::size_t n_classes, std::size_t k,
                                                       std::uint64_t seed);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded stratified train/test split; each class contributes
/// round(test_fraction * class size) test rows, at least one and leaving at
/// least one for training.
Split stratified_split(std::span<const ClassLabel> labels, std::size_t n_classes,
                       double test_fraction, std::uint64_t seed);

/// k-fold subsampled evaluation: every row is predicted exactly once by a
/// model trained (with a freshly fitted standardizer) on the other folds.
ConfusionCounts kfold_confusion(const FeatureSubsetView& view, std::size_t k,
                                const TrainConfig& config, std::uint64_t seed);

/// Single fixed split evaluation: train on split.train, predict split.test.
ConfusionCounts split_confusion(const FeatureSubsetView& view, const Split& split,
                                const TrainConfig& config);

/// UAR on `test` of a model trained on all of `train` using `ids`.
double holdout_uar(const Dataset& train, const Dataset& test, std::span<const FeatureId> ids,
                   const TrainConfig& config);

}  // namespace sbfe
