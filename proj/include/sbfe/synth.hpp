#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sbfe/dataset.hpp"

namespace sbfe {

/// Two-class Gaussian design with planted features.
///
/// Relevant features are N(0,1) for class 0 and N(separation,1) for class 1.
/// Each redundant feature copies a randomly chosen relevant feature plus
/// N(0, redundancy_noise^2). Irrelevant features are N(0,1) for both classes.
/// Columns are shuffled, so ground truth has to be read from the result.
struct SynthSpec {
  std::size_t samples_per_class = 200;
  std::size_t n_relevant = 8;
  std::size_t n_redundant = 0;
  std::size_t n_irrelevant = 56;
  double separation = 2.0;
  double redundancy_noise = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t n_features() const { return n_relevant + n_redundant + n_irrelevant; }
};

struct SynthData {
  Dataset dataset;
  std::vector<FeatureId> relevant_ids;
  std::vector<FeatureId> redundant_ids;
  std::vector<FeatureId> irrelevant_ids;
};

/// Rows are class 0 first, then class 1.
SynthData generate(const SynthSpec& spec);

}  // namespace sbfe
