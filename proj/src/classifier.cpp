#include "sbfe/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "sbfe/error.hpp"

namespace sbfe {

namespace {

double sign_of(ClassLabel label) { return label == 1 ? 1.0 : -1.0; }

// Standardized copy of the training rows, row-major n x d.
struct DenseBlock {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> x;
  std::vector<double> y;
};

DenseBlock gather(const FeatureSubsetView& view, std::span<const std::size_t> rows,
                  const Standardizer& standardizer) {
  DenseBlock block{rows.size(), view.width(), std::vector<double>(rows.size() * view.width()),
                   std::vector<double>(rows.size())};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::span<double> out(block.x.data() + i * block.d, block.d);
    view.gather(rows[i], out);
    standardizer.transform(out);
    block.y[i] = sign_of(view.source().label(rows[i]));
  }
  return block;
}

void require_binary(const Dataset& dataset) {
  if (dataset.n_classes() != 2) throw Error("binary classifier only");
}

double objective(const DenseBlock& data, double lambda, std::span<const double> w, double b) {
  double reg = b * b;
  for (double v : w) reg += v * v;
  double hinge = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    const double* x = data.x.data() + i * data.d;
    double f = b;
    for (std::size_t j = 0; j < data.d; ++j) f += w[j] * x[j];
    hinge += std::max(0.0, 1.0 - data.y[i] * f);
  }
  return 0.5 * lambda * reg + hinge / static_cast<double>(data.n);
}

// Projected subgradient descent on the primal objective. Subgradient steps do
// not decrease the objective monotonically, so the per-epoch average of the
// iterates is scored after every epoch and the best one (or the zero model, if
// nothing beat it) is returned.
void fit_subgradient(const DenseBlock& data, const TrainConfig& config, std::vector<double>& w,
                     double& b) {
  const std::size_t n = data.n;
  const std::size_t d = data.d;
  const double lambda = 1.0 / (config.C * static_cast<double>(n));
  const double radius = 1.0 / std::sqrt(lambda);

  std::vector<double> cur(d, 0.0);
  double cur_b = 0.0;
  w.assign(d, 0.0);
  b = 0.0;
  double best = objective(data, lambda, w, b);

  std::vector<double> w_avg(d);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);
  const double inv = 1.0 / static_cast<double>(n);

  std::uint64_t t = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    std::ranges::fill(w_avg, 0.0);
    double b_avg = 0.0;
    for (std::size_t idx : order) {
      ++t;
      const double eta = 1.0 / (lambda * (static_cast<double>(t) + config.rate_offset));
      const double* x = data.x.data() + idx * d;
      const double y = data.y[idx];

      double f = cur_b;
      for (std::size_t j = 0; j < d; ++j) f += cur[j] * x[j];

      const double shrink = 1.0 - eta * lambda;
      for (std::size_t j = 0; j < d; ++j) cur[j] *= shrink;
      cur_b *= shrink;
      if (y * f < 1.0) {
        for (std::size_t j = 0; j < d; ++j) cur[j] += eta * y * x[j];
        cur_b += eta * y;
      }

      double norm2 = cur_b * cur_b;
      for (std::size_t j = 0; j < d; ++j) norm2 += cur[j] * cur[j];
      if (norm2 > radius * radius) {
        const double scale = radius / std::sqrt(norm2);
        for (std::size_t j = 0; j < d; ++j) cur[j] *= scale;
        cur_b *= scale;
      }

      for (std::size_t j = 0; j < d; ++j) w_avg[j] += cur[j] * inv;
      b_avg += cur_b * inv;
    }
    const double value = objective(data, lambda, w_avg, b_avg);
    if (value < best) {
      best = value;
      w = w_avg;
      b = b_avg;
    }
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw Error("C must be positive");
  if (epochs < 1) throw Error("epochs must be at least 1");
  if (!(rate_offset >= 0.0) || !std::isfinite(rate_offset)) {
    throw Error("rate_offset must be non-negative");
  }
}

double LinearModel::decision_value(std::span<const double> raw_row) const {
  double f = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    f += weights[j] * standardizer.apply(j, raw_row[j]);
  }
  return f;
}

ConfusionCounts::ConfusionCounts(std::vector<std::uint64_t> correct,
                                 std::vector<std::uint64_t> wrong)
    : correct_(std::move(correct)), wrong_(std::move(wrong)) {
  if (correct_.size() != wrong_.size()) throw Error("confusion counts size mismatch");
}

std::uint64_t ConfusionCounts::total() const {
  return std::accumulate(correct_.begin(), correct_.end(), std::uint64_t{0}) +
         std::accumulate(wrong_.begin(), wrong_.end(), std::uint64_t{0});
}

void ConfusionCounts::record(ClassLabel truth, ClassLabel predicted) {
  if (truth >= correct_.size()) throw Error("class " + std::to_string(truth) + " out of range");
  if (truth == predicted) {
    ++correct_[truth];
  } else {
    ++wrong_[truth];
  }
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  if (correct_.empty()) {
    *this = other;
    return *this;
  }
  if (other.n_classes() != n_classes()) throw Error("cannot merge confusion counts of different sizes");
  for (std::size_t c = 0; c < correct_.size(); ++c) {
    correct_[c] += other.correct_[c];
    wrong_[c] += other.wrong_[c];
  }
  return *this;
}

double uar(const ConfusionCounts& counts) {
  if (counts.n_classes() == 0) throw Error("UAR of empty confusion counts");
  double sum = 0.0;
  for (std::size_t c = 0; c < counts.n_classes(); ++c) {
    const std::uint64_t seen = counts.correct(c) + counts.wrong(c);
    if (seen == 0) {
      throw Error("recall undefined: class " + std::to_string(c) + " has no evaluated samples");
    }
    sum += static_cast<double>(counts.correct(c)) / static_cast<double>(seen);
  }
  return sum / static_cast<double>(counts.n_classes());
}

LinearModel train(const FeatureSubsetView& view, std::span<const std::size_t> row_indices,
                  const TrainConfig& config) {
  config.validate();
  require_binary(view.source());
  bool has[2] = {false, false};
  for (std::size_t r : row_indices) has[view.source().label(r)] = true;
  if (!has[0] || !has[1]) throw Error("training rows contain a single class");

  LinearModel model;
  model.active_ids = view.active_ids();
  model.standardizer = fit_standardizer(view, row_indices);
  const DenseBlock data = gather(view, row_indices, model.standardizer);
  fit_subgradient(data, config, model.weights, model.bias);
  return model;
}

ClassLabel predict(const LinearModel& model, const FeatureSubsetView& view, std::size_t row) {
  if (view.active_ids() != model.active_ids) {
    throw Error("view features do not match the model's features");
  }
  std::vector<double> x(view.width());
  view.gather(row, x);
  return model.decision_value(x) > 0.0 ? 1 : 0;
}

double regularized_hinge_loss(const LinearModel& model, const FeatureSubsetView& view,
                              std::span<const std::size_t> row_indices, double C) {
  if (row_indices.empty()) throw Error("loss over zero rows");
  const double lambda = 1.0 / (C * static_cast<double>(row_indices.size()));
  double reg = model.bias * model.bias;
  for (double w : model.weights) reg += w * w;
  std::vector<double> x(view.width());
  double hinge = 0.0;
  for (std::size_t r : row_indices) {
    view.gather(r, x);
    const double margin = sign_of(view.source().label(r)) * model.decision_value(x);
    hinge += std::max(0.0, 1.0 - margin);
  }
  return 0.5 * lambda * reg + hinge / static_cast<double>(row_indices.size());
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const ClassLabel> labels,
                                                       std::size_t n_classes, std::size_t k,
                                                       std::uint64_t seed) {
  if (k < 2) throw Error("k must be at least 2");
  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t r = 0; r < labels.size(); ++r) by_class[labels[r]].push_back(r);

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t next = 0;
  for (auto& rows : by_class) {
    std::shuffle(rows.begin(), rows.end(), rng);
    // Continue the round-robin across classes so fold sizes differ by at most one.
    for (std::size_t r : rows) folds[next++ % k].push_back(r);
  }
  for (auto& fold : folds) std::ranges::sort(fold);
  return folds;
}

Split stratified_split(std::span<const ClassLabel> labels, std::size_t n_classes,
                       double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error("test fraction must be in (0, 1)");
  }
  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t r = 0; r < labels.size(); ++r) by_class[labels[r]].push_back(r);

  std::mt19937_64 rng(seed);
  Split split;
  for (std::size_t c = 0; c < n_classes; ++c) {
    auto& rows = by_class[c];
    if (rows.size() < 2) {
      throw Error("class " + std::to_string(c) + " needs at least 2 samples to split");
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(rows.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, rows.size() - 1);
    split.test.insert(split.test.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.insert(split.train.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test), rows.end());
  }
  std::ranges::sort(split.train);
  std::ranges::sort(split.test);
  return split;
}

ConfusionCounts kfold_confusion(const FeatureSubsetView& view, std::size_t k,
                                const TrainConfig& config, std::uint64_t seed) {
  const Dataset& data = view.source();
  require_binary(data);
  if (k < 2) throw Error("k must be at least 2");
  const auto counts = data.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < k) {
      throw Error("class " + data.class_names()[c] + " has " + std::to_string(counts[c]) +
                  " samples, fewer than k=" + std::to_string(k));
    }
  }

  const auto folds = stratified_folds(data.labels(), data.n_classes(), k, seed);
  ConfusionCounts result(data.n_classes());
  std::vector<std::size_t> train_rows;
  std::vector<double> x(view.width());
  for (std::size_t f = 0; f < k; ++f) {
    train_rows.clear();
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
    }
    std::ranges::sort(train_rows);
    const LinearModel model = train(view, train_rows, config);
    for (std::size_t r : folds[f]) {
      view.gather(r, x);
      result.record(data.label(r), model.decision_value(x) > 0.0 ? 1 : 0);
    }
  }
  return result;
}

ConfusionCounts split_confusion(const FeatureSubsetView& view, const Split& split,
                                const TrainConfig& config) {
  const Dataset& data = view.source();
  const LinearModel model = train(view, split.train, config);
  ConfusionCounts result(data.n_classes());
  std::vector<double> x(view.width());
  for (std::size_t r : split.test) {
    view.gather(r, x);
    result.record(data.label(r), model.decision_value(x) > 0.0 ? 1 : 0);
  }
  return result;
}

double holdout_uar(const Dataset& train_set, const Dataset& test_set,
                   std::span<const FeatureId> ids, const TrainConfig& config) {
  if (train_set.n_features() != test_set.n_features()) {
    throw Error("train and test datasets have different widths");
  }
  const FeatureSubsetView train_view = project(train_set, ids);
  std::vector<std::size_t> rows(train_set.n_samples());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const LinearModel model = train(train_view, rows, config);

  const FeatureSubsetView test_view = project(test_set, ids);
  ConfusionCounts counts(test_set.n_classes());
  for (std::size_t r = 0; r < test_set.n_samples(); ++r) {
    counts.record(test_set.label(r), predict(model, test_view, r));
  }
  return uar(counts);
}

}  // namespace sbfe
