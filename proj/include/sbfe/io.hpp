#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbfe/appearance.hpp"
#include "sbfe/dataset.hpp"
#include "sbfe/selector.hpp"
#include "sbfe/synth.hpp"

namespace sbfe {

inline constexpr std::string_view kToolName = "sbfe";
inline constexpr std::string_view kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Text formats
// ---------------------------------------------------------------------------

/// CSV: numeric feature columns followed by one label column. Labels are
/// mapped to dense class indexes in order of first appearance.
Dataset parse_csv(std::istream& in, bool has_header);
Dataset load_csv(const std::filesystem::path& path, bool has_header);

/// CSV of numeric cells only (no label column).
Matrix parse_matrix_csv(std::istream& in, bool has_header);
Matrix load_matrix_csv(const std::filesystem::path& path, bool has_header);

/// LIBSVM: "label idx:val ..." with strictly increasing 1-based indexes;
/// absent indexes are 0 and the width is the largest index seen.
Dataset parse_libsvm(std::istream& in);
Dataset load_libsvm(const std::filesystem::path& path);

enum class DataFormat { automatic, csv, libsvm };

/// `automatic` picks LIBSVM for .libsvm/.svm/.txt files and CSV otherwise.
Dataset load_dataset(const std::filesystem::path& path, DataFormat format, bool has_header);

/// Shortest text that parses back to the same double.
std::string format_number(double value);

/// Writes feature cells in shortest round-trip form and the class name last.
void write_csv(std::ostream& out, const Dataset& dataset);
void save_csv(const std::filesystem::path& path, const Dataset& dataset);

/// One integer feature ID per line; blank lines and '#' comments are ignored.
std::vector<FeatureId> parse_ids(std::istream& in);
std::vector<FeatureId> load_ids(const std::filesystem::path& path);
void save_ids(const std::filesystem::path& path, const std::vector<FeatureId>& ids);

// ---------------------------------------------------------------------------
// JSON documents
// ---------------------------------------------------------------------------

nlohmann::json config_to_json(const SelectionConfig& config);
/// Overlays the keys present in `doc` onto `base`. Unknown keys are an error.
SelectionConfig config_from_json(const nlohmann::json& doc, SelectionConfig base = {});

nlohmann::json model_to_json(const AppearanceModel& model);
AppearanceModel model_from_json(const nlohmann::json& doc);
void save_model(const std::filesystem::path& path, const AppearanceModel& model);
AppearanceModel load_model(const std::filesystem::path& path);

nlohmann::json synth_truth_to_json(const SynthSpec& spec, const SynthData& data);

struct HoldoutSummary {
  double test_fraction = 0.0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  double full_uar = 0.0;
  double selected_uar = 0.0;
};

struct RunReport {
  SelectionConfig config;
  std::string data_path;
  std::size_t n_samples = 0;
  std::size_t n_features = 0;
  std::vector<std::string> class_names;
  SelectionResult result;
  std::optional<HoldoutSummary> holdout;
  double total_seconds = 0.0;
};

/// Runs selection, optionally on a stratified training portion only, and
/// scores the full and selected feature sets on the held-out rows.
/// `holdout_fraction` of 0 selects on all rows and skips the comparison.
RunReport run_select(const Dataset& dataset, const SelectionConfig& config,
                     double holdout_fraction, const StepObserver& observer = {});

/// Wall-clock values live only under the "timing" key.
nlohmann::json report_to_json(const RunReport& report);
std::vector<FeatureId> selected_ids_from_report(const nlohmann::json& doc);

nlohmann::json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace sbfe
