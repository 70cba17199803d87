#include "sbfe/mutual_info.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sbfe/error.hpp"

namespace sbfe {

namespace {

struct Range {
  double lo;
  double width;
};

Range bin_range(std::span<const double> values, std::size_t n_bins) {
  if (n_bins < 2) throw Error("n_bins must be at least 2");
  if (values.empty()) throw Error("cannot discretize an empty vector");
  const auto [lo_it, hi_it] = std::ranges::minmax_element(values);
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error("cannot discretize non-finite values");
  // Constant input: unit-width bins so edges stay strictly increasing and all values land in bin 0.
  const double width = hi > lo ? (hi - lo) / static_cast<double>(n_bins) : 1.0;
  return {lo, width};
}

std::size_t bin_of(double v, const Range& range, std::size_t n_bins) {
  const double pos = (v - range.lo) / range.width;
  if (!(pos > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(pos), n_bins - 1);
}

}  // namespace

Histogram histogram(std::span<const double> values, std::size_t n_bins) {
  const Range range = bin_range(values, n_bins);
  Histogram h;
  h.edges.resize(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) {
    h.edges[i] = range.lo + range.width * static_cast<double>(i);
  }
  h.counts.assign(n_bins, 0);
  for (double v : values) ++h.counts[bin_of(v, range, n_bins)];
  return h;
}

std::vector<std::size_t> discretize(std::span<const double> values, std::size_t n_bins) {
  const Range range = bin_range(values, n_bins);
  std::vector<std::size_t> bins(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) bins[i] = bin_of(values[i], range, n_bins);
  return bins;
}

double entropy(std::span<const std::uint64_t> counts) {
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) throw Error("entropy of an all-zero count vector");
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (std::uint64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double mutual_information_discrete(std::span<const std::size_t> x, std::span<const std::size_t> y) {
  if (x.size() != y.size()) {
    throw Error("length mismatch: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (x.size() < 2) throw Error("mutual information needs at least 2 samples");
  const std::size_t nx = *std::ranges::max_element(x) + 1;
  const std::size_t ny = *std::ranges::max_element(y) + 1;

  // joint[y][x]
  std::vector<std::vector<std::uint64_t>> joint(ny, std::vector<std::uint64_t>(nx, 0));
  std::vector<std::uint64_t> marginal_x(nx, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++joint[y[i]][x[i]];
    ++marginal_x[x[i]];
  }

  const double n = static_cast<double>(x.size());
  double conditional = 0.0;
  for (const auto& row : joint) {
    const std::uint64_t ny_count = std::accumulate(row.begin(), row.end(), std::uint64_t{0});
    if (ny_count == 0) continue;
    conditional += static_cast<double>(ny_count) / n * entropy(row);
  }
  const double mi = entropy(marginal_x) - conditional;
  return mi < 0.0 ? 0.0 : mi;
}

double mutual_information(std::span<const double> feature, std::span<const ClassLabel> labels,
                          std::size_t n_bins) {
  if (feature.size() != labels.size()) {
    throw Error("length mismatch: " + std::to_string(feature.size()) + " values vs " +
                std::to_string(labels.size()) + " labels");
  }
  const auto bins = discretize(feature, n_bins);
  const std::vector<std::size_t> y(labels.begin(), labels.end());
  return mutual_information_discrete(bins, y);
}

std::map<FeatureId, double> normalize_counter_scores(const std::map<FeatureId, double>& information) {
  double max_ig = 0.0;
  for (const auto& [id, ig] : information) max_ig = std::max(max_ig, ig);
  std::map<FeatureId, double> scores;
  for (const auto& [id, ig] : information) scores[id] = max_ig > 0.0 ? ig / max_ig : 0.0;
  return scores;
}

std::map<FeatureId, double> counter_scores(const Dataset& dataset,
                                           std::span<const FeatureId> remaining_ids,
                                           std::size_t n_bins) {
  if (remaining_ids.empty()) throw Error("counter scores need at least one feature");
  std::map<FeatureId, double> information;
  for (FeatureId id : remaining_ids) {
    information[id] = mutual_information(dataset.column(id), dataset.labels(), n_bins);
  }
  return normalize_counter_scores(information);
}

std::vector<std::pair<FeatureId, double>> rank_by_mutual_information(const Dataset& dataset,
                                                                     std::size_t n_bins) {
  std::vector<std::pair<FeatureId, double>> ranking;
  for (FeatureId id : dataset.feature_ids()) {
    ranking.emplace_back(id, mutual_information(dataset.column(id), dataset.labels(), n_bins));
  }
  std::ranges::stable_sort(ranking, [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranking;
}

}  // namespace sbfe
