#include "sbfe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sbfe/error.hpp"
#include "sbfe/random.hpp"

namespace sbfe {

void SynthSpec::validate() const {
  if (samples_per_class < 1) throw Error("need at least one sample per class");
  if (n_relevant < 1) throw Error("need at least one relevant feature");
  if (!(separation >= 0.0) || !std::isfinite(separation)) {
    throw Error("class separation must be finite and non-negative");
  }
  if (!(redundancy_noise >= 0.0) || !std::isfinite(redundancy_noise)) {
    throw Error("redundancy noise must be finite and non-negative");
  }
}

SynthData generate(const SynthSpec& spec) {
  spec.validate();
  const StreamSplitter streams(spec.seed);
  const std::size_t width = spec.n_features();
  const std::size_t rows = 2 * spec.samples_per_class;

  // Logical layout: [relevant | redundant | irrelevant]; `column_of` maps it to
  // the shuffled physical column.
  std::vector<FeatureId> column_of(width);
  std::iota(column_of.begin(), column_of.end(), FeatureId{0});
  auto column_rng = streams.stream("columns");
  std::shuffle(column_of.begin(), column_of.end(), column_rng);

  std::vector<std::size_t> source_of(spec.n_redundant);
  auto source_rng = streams.stream("redundancy-sources");
  std::uniform_int_distribution<std::size_t> pick(0, spec.n_relevant - 1);
  for (auto& s : source_of) s = pick(source_rng);

  Matrix samples(rows, width);
  std::vector<ClassLabel> labels(rows);
  auto value_rng = streams.stream("values");
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<double> logical(width);
  for (std::size_t r = 0; r < rows; ++r) {
    const ClassLabel cls = r < spec.samples_per_class ? 0 : 1;
    labels[r] = cls;
    const double shift = cls == 1 ? spec.separation : 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < spec.n_relevant; ++i) logical[j++] = shift + unit(value_rng);
    for (std::size_t i = 0; i < spec.n_redundant; ++i) {
      logical[j++] = logical[source_of[i]] + spec.redundancy_noise * unit(value_rng);
    }
    for (std::size_t i = 0; i < spec.n_irrelevant; ++i) logical[j++] = unit(value_rng);
    for (std::size_t c = 0; c < width; ++c) samples(r, column_of[c]) = logical[c];
  }

  SynthData out{Dataset(std::move(samples), std::move(labels)), {}, {}, {}};
  for (std::size_t c = 0; c < width; ++c) {
    if (c < spec.n_relevant) {
      out.relevant_ids.push_back(column_of[c]);
    } else if (c < spec.n_relevant + spec.n_redundant) {
      out.redundant_ids.push_back(column_of[c]);
    } else {
      out.irrelevant_ids.push_back(column_of[c]);
    }
  }
  std::ranges::sort(out.relevant_ids);
  std::ranges::sort(out.redundant_ids);
  std::ranges::sort(out.irrelevant_ids);
  return out;
}

}  // namespace sbfe
