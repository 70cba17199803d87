#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numeric>

#include "sbfe/appearance.hpp"
#include "sbfe/classic_sbe.hpp"
#include "sbfe/classifier.hpp"
#include "sbfe/error.hpp"
#include "sbfe/io.hpp"
#include "sbfe/mutual_info.hpp"
#include "sbfe/selector.hpp"
#include "sbfe/synth.hpp"

namespace py = pybind11;
using namespace sbfe;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DoubleArray& array) {
  if (array.ndim() != 2) throw Error("expected a 2-D array");
  const auto rows = static_cast<std::size_t>(array.shape(0));
  const auto cols = static_cast<std::size_t>(array.shape(1));
  return Matrix(rows, cols, std::vector<double>(array.data(), array.data() + rows * cols));
}

DoubleArray to_array(const Matrix& m) {
  DoubleArray out({m.rows(), m.cols()});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wrapper feature selection by k-fold subsampled sequential backward elimination.";
  m.attr("__version__") = std::string(kToolVersion);

  py::register_exception<Error>(m, "SbfeError", PyExc_ValueError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](const DoubleArray& samples, std::vector<ClassLabel> labels,
                       std::vector<std::string> class_names) {
             return Dataset(to_matrix(samples), std::move(labels), std::move(class_names));
           }),
           py::arg("samples"), py::arg("labels"), py::arg("class_names") = std::vector<std::string>{})
      .def_property_readonly("n_samples", &Dataset::n_samples)
      .def_property_readonly("n_features", &Dataset::n_features)
      .def_property_readonly("n_classes", &Dataset::n_classes)
      .def_property_readonly("labels", &Dataset::labels)
      .def_property_readonly("class_names", &Dataset::class_names)
      .def_property_readonly("samples", [](const Dataset& d) { return to_array(d.samples()); })
      .def("column", &Dataset::column)
      .def("subset_rows", [](const Dataset& d, std::vector<std::size_t> rows) { return d.subset_rows(rows); });

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("C", &TrainConfig::C)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("rate_offset", &TrainConfig::rate_offset)
      .def_readwrite("seed", &TrainConfig::seed);

  py::enum_<Validation>(m, "Validation")
      .value("kfold", Validation::kfold)
      .value("fixed_split", Validation::fixed_split);

  py::class_<SelectionConfig>(m, "SelectionConfig")
      .def(py::init<>())
      .def_readwrite("target_count", &SelectionConfig::target_count)
      .def_readwrite("k_folds", &SelectionConfig::k_folds)
      .def_readwrite("local_threshold", &SelectionConfig::local_threshold)
      .def_readwrite("min_iterations_per_step", &SelectionConfig::min_iterations_per_step)
      .def_readwrite("max_iterations_per_step", &SelectionConfig::max_iterations_per_step)
      .def_readwrite("removal_fraction", &SelectionConfig::removal_fraction)
      .def_readwrite("n_bins", &SelectionConfig::n_bins)
      .def_readwrite("counter_score_enabled", &SelectionConfig::counter_score_enabled)
      .def_readwrite("subset_size_override", &SelectionConfig::subset_size_override)
      .def_readwrite("seed", &SelectionConfig::seed)
      .def_readwrite("train", &SelectionConfig::train)
      .def_readwrite("validation", &SelectionConfig::validation)
      .def_readwrite("split_test_fraction", &SelectionConfig::split_test_fraction)
      .def_readwrite("jobs", &SelectionConfig::jobs);

  py::class_<StepRecord>(m, "StepRecord")
      .def_readonly("step", &StepRecord::step)
      .def_readonly("iterations", &StepRecord::iterations)
      .def_readonly("iteration_scores", &StepRecord::iteration_scores)
      .def_readonly("local_criterion", &StepRecord::local_criterion)
      .def_readonly("hit_iteration_cap", &StepRecord::hit_iteration_cap)
      .def_readonly("baseline_uar", &StepRecord::baseline_uar)
      .def_readonly("alpha", &StepRecord::alpha)
      .def_property_readonly("removed",
                             [](const StepRecord& s) {
                               std::vector<std::pair<FeatureId, double>> out;
                               for (const auto& r : s.removed) out.emplace_back(r.id, r.relevance);
                               return out;
                             })
      .def_readonly("remaining_after", &StepRecord::remaining_after);

  py::class_<SelectionResult>(m, "SelectionResult")
      .def_readonly("selected_ids", &SelectionResult::selected_ids)
      .def_readonly("trace", &SelectionResult::trace)
      .def_readonly("subset_evaluations", &SelectionResult::subset_evaluations)
      .def("removal_order", &SelectionResult::removal_order);

  m.def("run_selection",
        [](const Dataset& d, const SelectionConfig& c) {
          py::gil_scoped_release release;
          return run_selection(d, c);
        },
        py::arg("dataset"), py::arg("config"));

  m.def("uar",
        [](std::vector<std::uint64_t> correct, std::vector<std::uint64_t> wrong) {
          return uar(ConfusionCounts(std::move(correct), std::move(wrong)));
        },
        py::arg("correct"), py::arg("wrong"), "Unweighted average recall from per-class tallies.");

  m.def("kfold_uar",
        [](const Dataset& d, std::vector<FeatureId> ids, std::size_t k, const TrainConfig& train,
           std::uint64_t seed) { return uar(kfold_confusion(project(d, ids), k, train, seed)); },
        py::arg("dataset"), py::arg("feature_ids"), py::arg("k") = 3, py::arg("train") = TrainConfig{},
        py::arg("seed") = 0);

  m.def("local_criterion", [](std::vector<double> scores) { return local_criterion(scores); });
  m.def("subset_size", &subset_size);
  m.def("removal_count", &removal_count, py::arg("n_remaining"), py::arg("target"), py::arg("fraction"));

  m.def("entropy", [](std::vector<std::uint64_t> counts) { return entropy(counts); });
  m.def("discretize", [](std::vector<double> values, std::size_t n_bins) { return discretize(values, n_bins); });
  m.def("mutual_information",
        [](std::vector<double> feature, std::vector<ClassLabel> labels, std::size_t n_bins) {
          return mutual_information(feature, labels, n_bins);
        },
        py::arg("feature"), py::arg("labels"), py::arg("n_bins") = 10);
  m.def("counter_scores",
        [](const Dataset& d, std::vector<FeatureId> ids, std::size_t n_bins) {
          return counter_scores(d, ids, n_bins);
        },
        py::arg("dataset"), py::arg("remaining_ids"), py::arg("n_bins") = 10);

  m.def("generate_synth",
        [](std::size_t samples_per_class, std::size_t n_relevant, std::size_t n_redundant,
           std::size_t n_irrelevant, double separation, double redundancy_noise, std::uint64_t seed) {
          SynthData data = generate(SynthSpec{samples_per_class, n_relevant, n_redundant, n_irrelevant,
                                              separation, redundancy_noise, seed});
          return py::make_tuple(std::move(data.dataset), data.relevant_ids, data.redundant_ids,
                                data.irrelevant_ids);
        },
        py::arg("samples_per_class") = 200, py::arg("n_relevant") = 8, py::arg("n_redundant") = 0,
        py::arg("n_irrelevant") = 56, py::arg("separation") = 2.0, py::arg("redundancy_noise") = 0.5,
        py::arg("seed") = 0,
        "Returns (dataset, relevant_ids, redundant_ids, irrelevant_ids).");

  py::class_<AppearanceModel>(m, "AppearanceModel")
      .def_readonly("selected_ids", &AppearanceModel::selected_ids)
      .def_readonly("positive_filter", &AppearanceModel::positive_filter)
      .def_readonly("negative_filter", &AppearanceModel::negative_filter)
      .def("to_json", [](const AppearanceModel& model) { return model_to_json(model).dump(); })
      .def_static("from_json", [](const std::string& text) {
        try {
          return model_from_json(nlohmann::json::parse(text));
        } catch (const nlohmann::json::exception& e) {
          throw Error(e.what());
        }
      });

  m.def("build_model",
        [](const DoubleArray& positives, const DoubleArray& negatives, std::vector<FeatureId> ids) {
          return build_model(to_matrix(positives), to_matrix(negatives), ids);
        },
        py::arg("positives"), py::arg("negatives"), py::arg("selected_ids"));
  m.def("region_score",
        [](const AppearanceModel& model, const DoubleArray& vector) {
          if (vector.ndim() != 1) throw Error("expected a 1-D feature vector");
          return region_score(model, std::span<const double>(vector.data(), static_cast<std::size_t>(vector.size())));
        },
        py::arg("model"), py::arg("feature_vector"));

  m.def("classic_sbe",
        [](const Dataset& d, std::size_t target, double test_fraction, std::uint64_t seed,
           const TrainConfig& train) {
          SelectionConfig split_config;
          split_config.seed = seed;
          split_config.split_test_fraction = test_fraction;
          return classic_sbe(d, target, fixed_split_for(d, split_config), train).removal_order;
        },
        py::arg("dataset"), py::arg("target"), py::arg("test_fraction") = 0.3, py::arg("seed") = 0,
        py::arg("train") = TrainConfig{}, "Removal order of exhaustive backward elimination.");

  m.def("load_csv", &load_csv, py::arg("path"), py::arg("has_header") = false);
  m.def("load_libsvm", &load_libsvm, py::arg("path"));
}
