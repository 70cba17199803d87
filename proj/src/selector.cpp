#include "sbfe/selector.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "sbfe/error.hpp"
#include "sbfe/mutual_info.hpp"

namespace sbfe {

void SelectionConfig::validate(std::size_t n_features) const {
  if (target_count < 1) throw Error("target count must be at least 1");
  if (target_count >= n_features) {
    throw Error("target count " + std::to_string(target_count) + " must be below the " +
                std::to_string(n_features) + " available features");
  }
  if (k_folds < 2) throw Error("k must be at least 2");
  if (!(local_threshold > 0.0)) throw Error("local threshold must be positive");
  if (min_iterations_per_step < 2) throw Error("min iterations per step must be at least 2");
  if (max_iterations_per_step < min_iterations_per_step) {
    throw Error("max iterations per step must be >= min iterations per step");
  }
  if (!(removal_fraction > 0.0 && removal_fraction <= 1.0)) {
    throw Error("removal fraction must be in (0, 1]");
  }
  if (n_bins < 2) throw Error("n_bins must be at least 2");
  if (subset_size_override && *subset_size_override < 1) throw Error("subset size must be at least 1");
  if (!(split_test_fraction > 0.0 && split_test_fraction < 1.0)) {
    throw Error("split test fraction must be in (0, 1)");
  }
  if (jobs < 1) throw Error("jobs must be at least 1");
  train.validate();
}

SelectionState::SelectionState(std::vector<FeatureId> ids, std::size_t n_classes,
                               std::uint64_t partition_seed)
    : remaining_ids(std::move(ids)), step_counts(n_classes), rng(partition_seed) {
  for (FeatureId id : remaining_ids) relevance[id] = 0.0;
}

void SelectionState::begin_step() {
  relevance.clear();
  for (FeatureId id : remaining_ids) relevance[id] = 0.0;
  step_scores.clear();
  step_counts = ConfusionCounts(step_counts.n_classes());
  iteration_index = 0;
}

bool StepRecord::operator==(const StepRecord& o) const {
  return step == o.step && iterations == o.iterations && iteration_scores == o.iteration_scores &&
         local_criterion == o.local_criterion && hit_iteration_cap == o.hit_iteration_cap &&
         baseline_uar == o.baseline_uar && alpha == o.alpha && removed == o.removed &&
         remaining_after == o.remaining_after;
}

std::vector<FeatureId> SelectionResult::removal_order() const {
  std::vector<FeatureId> order;
  for (const auto& step : trace) {
    for (const auto& r : step.removed) order.push_back(r.id);
  }
  return order;
}

Split fixed_split_for(const Dataset& dataset, const SelectionConfig& config) {
  const StreamSplitter streams(config.seed);
  return stratified_split(dataset.labels(), dataset.n_classes(), config.split_test_fraction,
                          streams.derive("split"));
}

SubsetEvaluator::SubsetEvaluator(const Dataset& dataset, const SelectionConfig& config)
    : dataset_(&dataset), config_(config), streams_(config.seed) {
  if (config_.validation == Validation::fixed_split) split_ = fixed_split_for(dataset, config_);
}

ConfusionCounts SubsetEvaluator::evaluate_one(const std::vector<FeatureId>& subset,
                                              std::uint64_t round) const {
  const FeatureSubsetView view = project(*dataset_, subset);
  if (split_) return split_confusion(view, *split_, config_.train);
  return kfold_confusion(view, config_.k_folds, config_.train, streams_.derive("folds", round));
}

std::vector<ConfusionCounts> SubsetEvaluator::evaluate(
    std::span<const std::vector<FeatureId>> subsets, std::uint64_t round) const {
  std::vector<ConfusionCounts> results(subsets.size());
  const std::size_t workers = std::min(config_.jobs, subsets.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < subsets.size(); ++i) results[i] = evaluate_one(subsets[i], round);
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(subsets.size());
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < subsets.size(); i = next++) {
          try {
            results[i] = evaluate_one(subsets[i], round);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::size_t subset_size(std::size_t n_remaining) {
  const auto size = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n_remaining))));
  return std::max<std::size_t>(size, 1);
}

std::vector<std::vector<FeatureId>> partition_subsets(SelectionState& state, std::size_t size) {
  if (state.remaining_ids.empty()) throw Error("no remaining features to partition");
  if (size < 1) throw Error("subset size must be at least 1");
  std::vector<FeatureId> shuffled = state.remaining_ids;
  std::shuffle(shuffled.begin(), shuffled.end(), state.rng);
  std::vector<std::vector<FeatureId>> chunks;
  for (std::size_t start = 0; start < shuffled.size(); start += size) {
    const std::size_t end = std::min(start + size, shuffled.size());
    chunks.emplace_back(shuffled.begin() + static_cast<std::ptrdiff_t>(start),
                        shuffled.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return chunks;
}

double run_iteration(SelectionState& state, const SubsetEvaluator& evaluator,
                     const SelectionConfig& config) {
  if (state.remaining_ids.size() <= config.target_count) {
    throw Error("iteration requested with " + std::to_string(state.remaining_ids.size()) +
                " features remaining and target " + std::to_string(config.target_count));
  }
  const std::size_t n = state.remaining_ids.size();
  const std::size_t size =
      config.subset_size_override ? std::min(*config.subset_size_override, n) : subset_size(n);
  const auto subsets = partition_subsets(state, size);
  const auto counts = evaluator.evaluate(subsets, state.total_iterations);

  ConfusionCounts iteration_counts(state.step_counts.n_classes());
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    const double subset_score = uar(counts[i]);
    state.step_counts += counts[i];
    iteration_counts += counts[i];
    const double baseline = uar(state.step_counts);
    for (FeatureId f : subsets[i]) state.relevance.at(f) += subset_score - baseline;
  }

  const double score = uar(iteration_counts);
  state.step_scores.push_back(score);
  ++state.iteration_index;
  ++state.total_iterations;
  state.subset_evaluations += subsets.size();
  return score;
}

double local_criterion(std::span<const double> step_scores) {
  if (step_scores.size() < 2) throw Error("local criterion needs at least 2 iteration scores");
  const double n = static_cast<double>(step_scores.size());
  // Shifted by the first score so identical scores give exactly zero.
  const double shift = step_scores.front();
  double mean = 0.0;
  for (double p : step_scores) mean += p - shift;
  mean /= n;
  double ss = 0.0;
  for (double p : step_scores) ss += (p - shift - mean) * (p - shift - mean);
  return std::sqrt(ss / n);
}

double apply_counter_score(SelectionState& state, const std::map<FeatureId, double>& scores,
                           std::size_t full_count, bool enabled) {
  if (!enabled || state.remaining_ids.empty()) return 0.0;
  if (full_count == 0) throw Error("full feature count must be positive");
  double r_max = 0.0;
  for (FeatureId f : state.remaining_ids) r_max = std::max(r_max, state.relevance.at(f));
  const double alpha = r_max * static_cast<double>(state.remaining_ids.size()) /
                       static_cast<double>(full_count);
  for (FeatureId f : state.remaining_ids) {
    const auto it = scores.find(f);
    if (it == scores.end()) throw Error("no counter score for feature " + std::to_string(f));
    state.relevance.at(f) += alpha * it->second;
  }
  return alpha;
}

std::size_t removal_count(std::size_t n_remaining, std::size_t target, double fraction) {
  if (n_remaining <= target) return 0;
  const auto m = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n_remaining)));
  return std::clamp<std::size_t>(m, 1, n_remaining - target);
}

std::vector<RemovedFeature> select_lsf(SelectionState& state, std::size_t m) {
  if (m >= state.remaining_ids.size()) {
    throw Error("cannot remove " + std::to_string(m) + " of " +
                std::to_string(state.remaining_ids.size()) + " remaining features");
  }
  std::vector<RemovedFeature> ranked;
  ranked.reserve(state.remaining_ids.size());
  for (FeatureId f : state.remaining_ids) ranked.push_back({f, state.relevance.at(f)});
  std::ranges::sort(ranked, [](const RemovedFeature& a, const RemovedFeature& b) {
    return a.relevance != b.relevance ? a.relevance < b.relevance : a.id < b.id;
  });
  ranked.resize(m);

  for (const auto& r : ranked) {
    state.relevance.erase(r.id);
    std::erase(state.remaining_ids, r.id);
  }
  return ranked;
}

SelectionResult run_selection(const Dataset& dataset, const SelectionConfig& config,
                              const StepObserver& observer) {
  config.validate(dataset.n_features());
  const StreamSplitter streams(config.seed);
  const std::size_t full_count = dataset.n_features();
  SelectionState state(dataset.feature_ids(), dataset.n_classes(), streams.derive("partitions"));
  const SubsetEvaluator evaluator(dataset, config);

  // Per-feature information never changes; only its normalisation over the
  // remaining set does.
  std::vector<double> information;
  if (config.counter_score_enabled) {
    information.resize(full_count);
    for (FeatureId f = 0; f < full_count; ++f) {
      information[f] = mutual_information(dataset.column(f), dataset.labels(), config.n_bins);
    }
  }

  SelectionResult result;
  while (state.remaining_ids.size() > config.target_count) {
    const auto started = std::chrono::steady_clock::now();
    state.begin_step();
    StepRecord record;
    record.step = state.step_index;

    while (true) {
      run_iteration(state, evaluator, config);
      if (state.iteration_index >= config.min_iterations_per_step &&
          local_criterion(state.step_scores) < config.local_threshold) {
        break;
      }
      if (state.iteration_index >= config.max_iterations_per_step) {
        record.hit_iteration_cap = true;
        break;
      }
    }
    record.iterations = state.iteration_index;
    record.iteration_scores = state.step_scores;
    record.local_criterion = local_criterion(state.step_scores);
    record.baseline_uar = uar(state.step_counts);

    if (config.counter_score_enabled) {
      std::map<FeatureId, double> remaining_info;
      for (FeatureId f : state.remaining_ids) remaining_info[f] = information[f];
      record.alpha = apply_counter_score(state, normalize_counter_scores(remaining_info), full_count);
    }

    const std::size_t m =
        removal_count(state.remaining_ids.size(), config.target_count, config.removal_fraction);
    record.removed = select_lsf(state, m);
    record.remaining_after = state.remaining_ids.size();
    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    ++state.step_index;
    if (observer) observer(record);
    result.trace.push_back(std::move(record));
  }

  result.selected_ids = state.remaining_ids;
  result.subset_evaluations = state.subset_evaluations;
  return result;
}

}  // namespace sbfe
