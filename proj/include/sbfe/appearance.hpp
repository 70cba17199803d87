#pragma once

#include <span>
#include <vector>

#include "sbfe/dataset.hpp"

namespace sbfe {

/// Mean templates of positive and negative examples over a selected set of
/// feature positions. Both filters are stored over the selected positions only.
struct AppearanceModel {
  std::vector<FeatureId> selected_ids;
  std::vector<double> positive_filter;
  std::vector<double> negative_filter;

  void validate() const;
  bool operator==(const AppearanceModel&) const = default;
};

/// Element-wise mean of the example rows restricted to `selected_ids`.
std::vector<double> train_filter(const Matrix& examples, std::span<const FeatureId> selected_ids);

AppearanceModel build_model(const Matrix& positives, const Matrix& negatives,
                            std::span<const FeatureId> selected_ids);

/// d(negative, x) - d(positive, x) over the selected positions of a full-length
/// feature vector. Positive means closer to the positive template.
double region_score(const AppearanceModel& model, std::span<const double> feature_vector);

/// Same score for a vector already restricted to the selected positions.
double region_score_subvector(const AppearanceModel& model, std::span<const double> sub_vector);

double euclidean_distance(std::span<const double> a, std::span<const double> b);

}  // namespace sbfe
