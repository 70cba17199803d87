#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sbfe/classifier.hpp"
#include "sbfe/error.hpp"

using namespace sbfe;

namespace {

std::vector<std::size_t> all_rows(const Dataset& d) {
  std::vector<std::size_t> rows(d.n_samples());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

LinearModel manual_model(std::vector<double> w, double b) {
  LinearModel m;
  m.weights = std::move(w);
  m.bias = b;
  m.active_ids = {0};
  m.standardizer = Standardizer({0.0}, {1.0});
  return m;
}

}  // namespace

TEST_CASE("uar examples") {
  CHECK(uar(ConfusionCounts({9, 7}, {1, 3})) == 0.8);
  CHECK(uar(ConfusionCounts({4, 6}, {0, 0})) == 1.0);
  CHECK(uar(ConfusionCounts({0, 5}, {5, 0})) == 0.5);
  CHECK_THROWS_AS(uar(ConfusionCounts({3, 0}, {1, 0})), Error);
  CHECK_THROWS_AS(uar(ConfusionCounts()), Error);
  // general N classes
  CHECK(uar(ConfusionCounts({1, 2, 3}, {1, 2, 1})) == doctest::Approx((0.5 + 0.5 + 0.75) / 3).epsilon(1e-15));
}

TEST_CASE("uar is invariant to class order and count scaling") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng() % 4;
    std::vector<std::uint64_t> correct(k);
    std::vector<std::uint64_t> wrong(k);
    for (std::size_t c = 0; c < k; ++c) {
      correct[c] = rng() % 50;
      wrong[c] = 1 + rng() % 50;
    }
    const double base = uar(ConfusionCounts(correct, wrong));

    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::uint64_t> pc(k);
    std::vector<std::uint64_t> pw(k);
    for (std::size_t c = 0; c < k; ++c) {
      pc[c] = correct[perm[c]];
      pw[c] = wrong[perm[c]];
    }
    CHECK(uar(ConfusionCounts(pc, pw)) == doctest::Approx(base).epsilon(1e-14));

    const std::uint64_t scale = 1 + rng() % 9;
    for (auto& v : correct) v *= scale;
    for (auto& v : wrong) v *= scale;
    CHECK(uar(ConfusionCounts(correct, wrong)) == doctest::Approx(base).epsilon(1e-14));
  }
}

TEST_CASE("confusion count merging is elementwise addition") {
  const ConfusionCounts a({1, 2}, {3, 4});
  const ConfusionCounts b({5, 6}, {7, 8});
  const ConfusionCounts c({9, 1}, {2, 3});
  CHECK(a + b == b + a);
  CHECK((a + b) + c == a + (b + c));
  CHECK((a + b).total() == a.total() + b.total());
  ConfusionCounts empty;
  empty += a;
  CHECK(empty == a);
  CHECK_THROWS_AS(a + ConfusionCounts(3), Error);
}

TEST_CASE("predict follows the sign rule with ties going to class 0") {
  const Dataset d(Matrix(3, 1, {2.0, 0.0, 1.0}), {0, 1, 0});
  const auto view = project(d, d.feature_ids());
  CHECK(predict(manual_model({1.0}, 0.0), view, 0) == 1);
  CHECK(predict(manual_model({1.0}, 0.0), view, 1) == 0);
  CHECK(predict(manual_model({-3.0}, 1.0), view, 2) == 0);

  LinearModel other = manual_model({1.0}, 0.0);
  other.active_ids = {5};
  CHECK_THROWS_AS(predict(other, view, 0), Error);
}

TEST_CASE("scaling w and b by a positive constant preserves predictions") {
  const Dataset d = testing::planted_dataset(60, 3, {0}, 1.5, 4);
  const auto view = project(d, d.feature_ids());
  TrainConfig cfg;
  cfg.seed = 2;
  LinearModel model = train(view, all_rows(d), cfg);
  std::vector<ClassLabel> before;
  for (std::size_t r = 0; r < d.n_samples(); ++r) before.push_back(predict(model, view, r));
  for (double scale : {0.5, 3.0, 1000.0}) {
    LinearModel scaled = model;
    for (double& w : scaled.weights) w *= scale;
    scaled.bias *= scale;
    for (std::size_t r = 0; r < d.n_samples(); ++r) CHECK(predict(scaled, view, r) == before[r]);
  }
}

TEST_CASE("train fits a separable two-point problem and is deterministic") {
  const Dataset d(Matrix(2, 1, {-1.0, 1.0}), {0, 1});
  const auto view = project(d, d.feature_ids());
  TrainConfig cfg;
  cfg.C = 1.0;
  cfg.epochs = 100;
  const auto model = train(view, all_rows(d), cfg);
  CHECK(predict(model, view, 0) == 0);
  CHECK(predict(model, view, 1) == 1);

  const Dataset noisy = testing::planted_dataset(50, 4, {1}, 1.0, 9);
  const auto nview = project(noisy, noisy.feature_ids());
  cfg.seed = 7;
  const auto m1 = train(nview, all_rows(noisy), cfg);
  const auto m2 = train(nview, all_rows(noisy), cfg);
  CHECK(m1.weights == m2.weights);
  CHECK(m1.bias == m2.bias);
}

TEST_CASE("train rejects single-class rows and multiclass data") {
  const Dataset d(Matrix(4, 1, {1.0, 2.0, 3.0, 4.0}), {0, 1, 0, 1});
  const auto view = project(d, d.feature_ids());
  const std::vector<std::size_t> class0{0, 2};
  CHECK_THROWS_WITH_AS(train(view, class0, TrainConfig{}), "training rows contain a single class", Error);

  const Dataset three(Matrix(3, 1, {1.0, 2.0, 3.0}), {0, 1, 2});
  const auto tview = project(three, three.feature_ids());
  CHECK_THROWS_WITH_AS(train(tview, all_rows(three), TrainConfig{}), "binary classifier only", Error);

  TrainConfig bad;
  bad.C = 0.0;
  CHECK_THROWS_AS(train(view, all_rows(d), bad), Error);
}

TEST_CASE("training objective does not increase from the zero model") {
  std::mt19937_64 rng(2024);
  for (int instance = 0; instance < 50; ++instance) {
    const std::size_t n = 20 + rng() % 200;
    const std::size_t width = 1 + rng() % 10;
    std::vector<FeatureId> predictive;
    for (FeatureId f = 0; f < width; ++f) {
      if (rng() % 3 == 0) predictive.push_back(f);
    }
    const double shift = static_cast<double>(rng() % 400) / 100.0;
    const Dataset d = testing::planted_dataset(n, width, predictive, shift, rng());
    const auto view = project(d, d.feature_ids());
    TrainConfig cfg;
    cfg.seed = rng();
    cfg.C = std::pow(10.0, static_cast<double>(rng() % 5) - 2.0);
    const auto rows = all_rows(d);
    const auto model = train(view, rows, cfg);

    LinearModel zero = model;
    std::ranges::fill(zero.weights, 0.0);
    zero.bias = 0.0;
    const double initial = regularized_hinge_loss(zero, view, rows, cfg.C);
    const double final_loss = regularized_hinge_loss(model, view, rows, cfg.C);
    CHECK(initial == doctest::Approx(1.0));
    CHECK(final_loss <= initial);
  }
}

TEST_CASE("stratified folds partition the rows and keep class balance") {
  std::vector<ClassLabel> labels;
  for (int i = 0; i < 31; ++i) labels.push_back(i < 11 ? 0 : 1);
  for (std::size_t k : {2u, 3u, 5u}) {
    const auto folds = stratified_folds(labels, 2, k, 99);
    std::vector<int> seen(labels.size(), 0);
    for (const auto& fold : folds) {
      std::size_t ones = 0;
      for (std::size_t r : fold) {
        ++seen[r];
        ones += labels[r];
      }
      CHECK(ones >= 20 / k);  // 20 class-1 rows dealt round-robin
      CHECK(fold.size() - ones >= 11 / k);
    }
    CHECK(std::ranges::all_of(seen, [](int c) { return c == 1; }));
  }
}

TEST_CASE("kfold_confusion on a label-carrying feature") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> tiny(0.0, 0.01);
  const std::size_t n = 60;
  Matrix m(n, 1);
  std::vector<ClassLabel> labels(n);
  for (std::size_t r = 0; r < n; ++r) {
    labels[r] = static_cast<ClassLabel>(r % 2);
    m(r, 0) = static_cast<double>(labels[r]) + tiny(rng);
  }
  const Dataset d(std::move(m), labels);
  const auto view = project(d, d.feature_ids());
  const auto counts = kfold_confusion(view, 2, TrainConfig{}, 3);
  CHECK(uar(counts) >= 0.95);
  CHECK(counts == kfold_confusion(view, 2, TrainConfig{}, 3));

  const Dataset noisy = testing::planted_dataset(45, 3, {0}, 1.0, 12);
  const auto nview = project(noisy, noisy.feature_ids());
  for (std::size_t k : {2u, 3u, 5u, 7u}) {
    CHECK(kfold_confusion(nview, k, TrainConfig{}, 8).total() == noisy.n_samples());
  }
}

TEST_CASE("kfold_confusion requires k samples per class") {
  const Dataset d(Matrix(5, 1, {0.0, 1.0, 2.0, 3.0, 4.0}), {0, 0, 0, 0, 1});
  const auto view = project(d, d.feature_ids());
  CHECK_THROWS_WITH_AS(kfold_confusion(view, 2, TrainConfig{}, 0),
                       "class 1 has 1 samples, fewer than k=2", Error);
  CHECK_THROWS_AS(kfold_confusion(view, 1, TrainConfig{}, 0), Error);
}

TEST_CASE("stratified_split and holdout evaluation") {
  const Dataset d = testing::planted_dataset(100, 4, {2}, 3.0, 21);
  const Split split = stratified_split(d.labels(), 2, 0.3, 4);
  CHECK(split.train.size() + split.test.size() == 100);
  CHECK(split.test.size() == 30);
  std::vector<std::size_t> merged = split.train;
  merged.insert(merged.end(), split.test.begin(), split.test.end());
  std::ranges::sort(merged);
  CHECK(std::ranges::adjacent_find(merged) == merged.end());

  const auto counts = split_confusion(project(d, d.feature_ids()), split, TrainConfig{});
  CHECK(counts.total() == 30);

  const Dataset train_set = d.subset_rows(split.train);
  const Dataset test_set = d.subset_rows(split.test);
  const std::vector<FeatureId> good{2};
  const std::vector<FeatureId> bad{0};
  CHECK(holdout_uar(train_set, test_set, good, TrainConfig{}) > 0.85);
  CHECK(holdout_uar(train_set, test_set, bad, TrainConfig{}) < 0.75);
  CHECK_THROWS_AS(stratified_split(d.labels(), 2, 1.0, 0), Error);
}
