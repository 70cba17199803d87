#include "sbfe/appearance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sbfe/error.hpp"

namespace sbfe {

void AppearanceModel::validate() const {
  if (positive_filter.size() != selected_ids.size() || negative_filter.size() != selected_ids.size()) {
    throw Error("filter lengths must match the number of selected ids");
  }
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::ranges::all_of(positive_filter, finite) || !std::ranges::all_of(negative_filter, finite)) {
    throw Error("appearance model filters must be finite");
  }
}

std::vector<double> train_filter(const Matrix& examples, std::span<const FeatureId> selected_ids) {
  if (examples.rows() == 0) throw Error("cannot train a filter from zero examples");
  for (FeatureId id : selected_ids) {
    if (id >= examples.cols()) {
      throw Error("selected id " + std::to_string(id) + " outside example width " +
                  std::to_string(examples.cols()));
    }
  }
  std::vector<double> filter(selected_ids.size(), 0.0);
  for (std::size_t r = 0; r < examples.rows(); ++r) {
    const auto row = examples.row(r);
    for (std::size_t i = 0; i < selected_ids.size(); ++i) filter[i] += row[selected_ids[i]];
  }
  const double n = static_cast<double>(examples.rows());
  for (double& v : filter) v /= n;
  return filter;
}

AppearanceModel build_model(const Matrix& positives, const Matrix& negatives,
                            std::span<const FeatureId> selected_ids) {
  if (positives.rows() == 0) throw Error("positive example set is empty");
  if (negatives.rows() == 0) throw Error("negative example set is empty");
  AppearanceModel model{std::vector<FeatureId>(selected_ids.begin(), selected_ids.end()),
                        train_filter(positives, selected_ids), train_filter(negatives, selected_ids)};
  model.validate();
  return model;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    ss += d * d;
  }
  return std::sqrt(ss);
}

double region_score(const AppearanceModel& model, std::span<const double> feature_vector) {
  const std::size_t m = model.selected_ids.size();
  if (m > 0) {
    const FeatureId largest = *std::ranges::max_element(model.selected_ids);
    if (largest >= feature_vector.size()) {
      throw Error("feature vector of length " + std::to_string(feature_vector.size()) +
                  " lacks selected id " + std::to_string(largest));
    }
  }
  double neg = 0.0;
  double pos = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = feature_vector[model.selected_ids[i]];
    const double dn = model.negative_filter[i] - x;
    const double dp = model.positive_filter[i] - x;
    neg += dn * dn;
    pos += dp * dp;
  }
  return std::sqrt(neg) - std::sqrt(pos);
}

double region_score_subvector(const AppearanceModel& model, std::span<const double> sub_vector) {
  if (sub_vector.size() != model.selected_ids.size()) {
    throw Error("sub-vector length " + std::to_string(sub_vector.size()) + " does not match " +
                std::to_string(model.selected_ids.size()) + " selected ids");
  }
  return euclidean_distance(model.negative_filter, sub_vector) -
         euclidean_distance(model.positive_filter, sub_vector);
}

}  // namespace sbfe
