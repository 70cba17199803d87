#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "sbfe/dataset.hpp"

namespace sbfe {

/// Equal-width histogram. `edges` has counts.size() + 1 strictly increasing
/// entries; the last bin is closed on the right.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
};

Histogram histogram(std::span<const double> values, std::size_t n_bins);

/// Equal-width bin index per value over [min, max]. Constant input maps to 0.
std::vector<std::size_t> discretize(std::span<const double> values, std::size_t n_bins);

/// Base-2 entropy of the empirical distribution given by `counts`.
double entropy(std::span<const std::uint64_t> counts);

/// H(X) - H(X|Y) in bits for already-discrete symbols.
double mutual_information_discrete(std::span<const std::size_t> x, std::span<const std::size_t> y);

/// Mutual information in bits between an equal-width discretised feature and
/// the class label. Never negative.
double mutual_information(std::span<const double> feature, std::span<const ClassLabel> labels,
                          std::size_t n_bins);

/// IG_f / max IG over the keys of `information`. All zeros when the maximum is 0.
std::map<FeatureId, double> normalize_counter_scores(const std::map<FeatureId, double>& information);

/// Max-normalised mutual information of each remaining feature with the class.
std::map<FeatureId, double> counter_scores(const Dataset& dataset,
                                           std::span<const FeatureId> remaining_ids,
                                           std::size_t n_bins);

/// (feature, bits) for every feature, descending by bits, ties by ascending ID.
std::vector<std::pair<FeatureId, double>> rank_by_mutual_information(const Dataset& dataset,
                                                                     std::size_t n_bins);

}  // namespace sbfe
