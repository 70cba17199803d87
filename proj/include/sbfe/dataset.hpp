#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sbfe {

/// Permanent feature identifier: the column index in the originating dataset.
using FeatureId = std::uint32_t;
/// Dense class index in 0..K-1.
using ClassLabel = std::uint32_t;

/// Dense row-major matrix of reals.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }

  const std::vector<double>& values() const { return values_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Sample-major feature matrix with dense class labels.
///
/// Feature IDs are permanent: feature `i` is column `i` of the matrix it was
/// loaded with, and every projection or selection refers back to that ID.
/// Construction validates that labels match the rows, that at least two
/// classes are present with every class in 0..K-1 populated, and that all
/// values are finite.
class Dataset {
 public:
  Dataset(Matrix samples, std::vector<ClassLabel> labels,
          std::vector<std::string> class_names = {});

  std::size_t n_samples() const { return samples_.rows(); }
  std::size_t n_features() const { return samples_.cols(); }
  std::size_t n_classes() const { return class_names_.size(); }

  const Matrix& samples() const { return samples_; }
  const std::vector<ClassLabel>& labels() const { return labels_; }
  ClassLabel label(std::size_t row) const { return labels_[row]; }
  double value(std::size_t row, FeatureId id) const { return samples_(row, id); }

  /// 0..n_features-1.
  std::vector<FeatureId> feature_ids() const;
  /// Original label spelling per class index ("0", "1", ... when not loaded from text).
  const std::vector<std::string>& class_names() const { return class_names_; }
  std::vector<std::size_t> class_counts() const;

  std::vector<double> column(FeatureId id) const;

  /// Dataset restricted to the given rows, in the given order. The result must
  /// itself satisfy the dataset invariants.
  Dataset subset_rows(std::span<const std::size_t> rows) const;

 private:
  Matrix samples_;
  std::vector<ClassLabel> labels_;
  std::vector<std::string> class_names_;
};

/// Ordered selection of columns from a dataset. The position of a column in the
/// view is its temporary ID; `id_at` maps it back to the permanent ID.
class FeatureSubsetView {
 public:
  FeatureSubsetView(const Dataset& source, std::vector<FeatureId> active_ids);

  const Dataset& source() const { return *source_; }
  const std::vector<FeatureId>& active_ids() const { return ids_; }
  std::size_t width() const { return ids_.size(); }
  std::size_t n_rows() const { return source_->n_samples(); }

  double at(std::size_t row, std::size_t column) const {
    return source_->value(row, ids_[column]);
  }
  FeatureId id_at(std::size_t column) const { return ids_[column]; }
  std::optional<std::size_t> position_of(FeatureId id) const;

  /// Copies the projected cells of `row` into `out` (size width()).
  void gather(std::size_t row, std::span<double> out) const;

 private:
  const Dataset* source_;
  std::vector<FeatureId> ids_;
};

/// Throws on unknown or duplicate IDs, or an empty list.
FeatureSubsetView project(const Dataset& dataset, std::span<const FeatureId> ids);

/// Per-column affine map to zero mean and unit (population) deviation.
/// Constant columns have stdev 0 and map to 0.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(std::vector<double> means, std::vector<double> stdevs);

  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& stdevs() const { return stdevs_; }
  std::size_t width() const { return means_.size(); }

  double apply(std::size_t column, double value) const {
    return stdevs_[column] > 0.0 ? (value - means_[column]) / stdevs_[column] : 0.0;
  }
  void transform(std::span<double> row) const;

  bool operator==(const Standardizer&) const = default;

 private:
  std::vector<double> means_;
  std::vector<double> stdevs_;
};

Standardizer fit_standardizer(const FeatureSubsetView& view,
                              std::span<const std::size_t> row_indices);

}  // namespace sbfe
