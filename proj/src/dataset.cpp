#include "sbfe/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sbfe/error.hpp"

namespace sbfe {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw Error("matrix storage has " + std::to_string(values_.size()) + " values, expected " +
                std::to_string(rows * cols));
  }
}

Dataset::Dataset(Matrix samples, std::vector<ClassLabel> labels,
                 std::vector<std::string> class_names)
    : samples_(std::move(samples)), labels_(std::move(labels)),
      class_names_(std::move(class_names)) {
  if (labels_.size() != samples_.rows()) {
    throw Error("dataset has " + std::to_string(samples_.rows()) + " rows but " +
                std::to_string(labels_.size()) + " labels");
  }
  if (samples_.cols() == 0) throw Error("dataset has no features");
  for (std::size_t i = 0; i < samples_.values().size(); ++i) {
    if (!std::isfinite(samples_.values()[i])) {
      throw Error("non-finite value at row " + std::to_string(i / samples_.cols()) +
                  ", feature " + std::to_string(i % samples_.cols()));
    }
  }
  ClassLabel max_label = 0;
  for (ClassLabel l : labels_) max_label = std::max(max_label, l);
  const std::size_t k = labels_.empty() ? 0 : std::size_t{max_label} + 1;
  if (class_names_.empty()) {
    for (std::size_t c = 0; c < k; ++c) class_names_.push_back(std::to_string(c));
  } else if (class_names_.size() < k) {
    throw Error("label " + std::to_string(max_label) + " has no class name");
  }
  if (class_names_.size() < 2) throw Error("dataset needs at least 2 classes");
  const auto counts = class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) throw Error("class " + class_names_[c] + " has no samples");
  }
}

std::vector<FeatureId> Dataset::feature_ids() const {
  std::vector<FeatureId> ids(n_features());
  std::iota(ids.begin(), ids.end(), FeatureId{0});
  return ids;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(n_classes(), 0);
  for (ClassLabel l : labels_) ++counts[l];
  return counts;
}

std::vector<double> Dataset::column(FeatureId id) const {
  if (id >= n_features()) throw Error("unknown feature id " + std::to_string(id));
  std::vector<double> out(n_samples());
  for (std::size_t r = 0; r < n_samples(); ++r) out[r] = samples_(r, id);
  return out;
}

Dataset Dataset::subset_rows(std::span<const std::size_t> rows) const {
  Matrix m(rows.size(), n_features());
  std::vector<ClassLabel> labels(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= n_samples()) throw Error("row index " + std::to_string(rows[i]) + " out of range");
    std::ranges::copy(samples_.row(rows[i]), m.row(i).begin());
    labels[i] = labels_[rows[i]];
  }
  return Dataset(std::move(m), std::move(labels), class_names_);
}

FeatureSubsetView::FeatureSubsetView(const Dataset& source, std::vector<FeatureId> active_ids)
    : source_(&source), ids_(std::move(active_ids)) {}

std::optional<std::size_t> FeatureSubsetView::position_of(FeatureId id) const {
  const auto it = std::ranges::find(ids_, id);
  if (it == ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

void FeatureSubsetView::gather(std::size_t row, std::span<double> out) const {
  const auto src = source_->samples().row(row);
  for (std::size_t c = 0; c < ids_.size(); ++c) out[c] = src[ids_[c]];
}

FeatureSubsetView project(const Dataset& dataset, std::span<const FeatureId> ids) {
  if (ids.empty()) throw Error("projection needs at least one feature id");
  std::vector<bool> seen(dataset.n_features(), false);
  for (FeatureId id : ids) {
    if (id >= dataset.n_features()) throw Error("unknown feature id " + std::to_string(id));
    if (seen[id]) throw Error("duplicate feature id " + std::to_string(id));
    seen[id] = true;
  }
  return FeatureSubsetView(dataset, std::vector<FeatureId>(ids.begin(), ids.end()));
}

Standardizer::Standardizer(std::vector<double> means, std::vector<double> stdevs)
    : means_(std::move(means)), stdevs_(std::move(stdevs)) {
  if (means_.size() != stdevs_.size()) throw Error("standardizer means/stdevs size mismatch");
}

void Standardizer::transform(std::span<double> row) const {
  for (std::size_t c = 0; c < row.size(); ++c) row[c] = apply(c, row[c]);
}

Standardizer fit_standardizer(const FeatureSubsetView& view,
                              std::span<const std::size_t> row_indices) {
  if (row_indices.empty()) throw Error("cannot fit a standardizer on zero rows");
  const std::size_t width = view.width();
  const double n = static_cast<double>(row_indices.size());
  std::vector<double> means(width, 0.0);
  std::vector<double> stdevs(width, 0.0);
  for (std::size_t c = 0; c < width; ++c) {
    double lo = view.at(row_indices[0], c);
    double hi = lo;
    double sum = 0.0;
    for (std::size_t r : row_indices) {
      const double v = view.at(r, c);
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo == hi) {
      // exact constant: keep the value itself as mean so rounding cannot leak a tiny stdev
      means[c] = lo;
      continue;
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t r : row_indices) {
      const double d = view.at(r, c) - mean;
      ss += d * d;
    }
    means[c] = mean;
    stdevs[c] = std::sqrt(ss / n);
  }
  return Standardizer(std::move(means), std::move(stdevs));
}

}  // namespace sbfe
