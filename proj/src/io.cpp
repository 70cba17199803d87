#include "sbfe/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "sbfe/error.hpp"
#include "sbfe/random.hpp"

namespace sbfe {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

double parse_number(std::string_view text, std::size_t line) {
  if (text.empty()) throw Error(at_line(line) + "missing value");
  std::string_view digits = text;
  if (digits.front() == '+') digits.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw Error(at_line(line) + "non-numeric value '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) throw Error(at_line(line) + "non-finite value '" + std::string(text) + "'");
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

class LabelMap {
 public:
  ClassLabel index_of(std::string_view name) {
    const auto it = index_.find(std::string(name));
    if (it != index_.end()) return it->second;
    const auto idx = static_cast<ClassLabel>(names_.size());
    names_.emplace_back(name);
    index_.emplace(std::string(name), idx);
    return idx;
  }
  std::vector<std::string> names() const { return names_; }
  std::size_t size() const { return names_.size(); }

 private:
  std::map<std::string, ClassLabel> index_;
  std::vector<std::string> names_;
};

Dataset finish(std::size_t rows, std::size_t cols, std::vector<double> values,
               std::vector<ClassLabel> labels, const LabelMap& classes) {
  if (rows == 0) throw Error("no data rows");
  if (classes.size() < 2) throw Error("only one class present; need at least 2");
  return Dataset(Matrix(rows, cols, std::move(values)), std::move(labels), classes.names());
}

// Shared CSV reader; `labelled` controls whether the last column is a label.
template <typename RowSink>
void read_csv_rows(std::istream& in, bool has_header, bool labelled, RowSink&& sink) {
  std::string raw;
  std::size_t line_no = 0;
  std::size_t expected = 0;
  bool header_pending = has_header;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (expected == 0) {
      expected = fields.size();
      if (labelled && expected < 2) {
        throw Error(at_line(line_no) + "need at least one feature column and a label column");
      }
    } else if (fields.size() != expected) {
      throw Error(at_line(line_no) + "expected " + std::to_string(expected) + " fields, found " +
                  std::to_string(fields.size()));
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }
    sink(fields, line_no);
  }
  if (expected == 0) throw Error("empty input");
}

}  // namespace

Dataset parse_csv(std::istream& in, bool has_header) {
  std::vector<double> values;
  std::vector<ClassLabel> labels;
  LabelMap classes;
  std::size_t cols = 0;
  read_csv_rows(in, has_header, true, [&](const std::vector<std::string_view>& fields, std::size_t line) {
    cols = fields.size() - 1;
    for (std::size_t c = 0; c < cols; ++c) values.push_back(parse_number(fields[c], line));
    if (fields.back().empty()) throw Error(at_line(line) + "missing label");
    labels.push_back(classes.index_of(fields.back()));
  });
  const std::size_t rows = labels.size();
  return finish(rows, cols, std::move(values), std::move(labels), classes);
}

Dataset load_csv(const std::filesystem::path& path, bool has_header) {
  auto in = open_input(path);
  try {
    return parse_csv(in, has_header);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

Matrix parse_matrix_csv(std::istream& in, bool has_header) {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  read_csv_rows(in, has_header, false, [&](const std::vector<std::string_view>& fields, std::size_t line) {
    cols = fields.size();
    for (auto f : fields) values.push_back(parse_number(f, line));
    ++rows;
  });
  return Matrix(rows, cols, std::move(values));
}

Matrix load_matrix_csv(const std::filesystem::path& path, bool has_header) {
  auto in = open_input(path);
  try {
    return parse_matrix_csv(in, has_header);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

Dataset parse_libsvm(std::istream& in) {
  struct Row {
    ClassLabel label;
    std::vector<std::pair<std::size_t, double>> cells;
  };
  std::vector<Row> rows;
  LabelMap classes;
  std::size_t width = 0;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    std::istringstream tokens{std::string(line)};
    std::string token;
    tokens >> token;
    Row row{classes.index_of(token), {}};
    std::size_t previous = 0;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) throw Error(at_line(line_no) + "expected idx:value, got '" + token + "'");
      std::size_t index = 0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + colon, index);
      if (ec != std::errc() || ptr != token.data() + colon) {
        throw Error(at_line(line_no) + "bad index in '" + token + "'");
      }
      if (index == 0) throw Error(at_line(line_no) + "indexes are 1-based");
      if (index <= previous) throw Error(at_line(line_no) + "indexes must be strictly increasing");
      previous = index;
      row.cells.emplace_back(index - 1, parse_number(std::string_view(token).substr(colon + 1), line_no));
      width = std::max(width, index);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("empty input");
  if (width == 0) throw Error("no feature values present");

  std::vector<double> values(rows.size() * width, 0.0);
  std::vector<ClassLabel> labels;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [c, v] : rows[r].cells) values[r * width + c] = v;
    labels.push_back(rows[r].label);
  }
  const std::size_t n_rows = rows.size();
  return finish(n_rows, width, std::move(values), std::move(labels), classes);
}

Dataset load_libsvm(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_libsvm(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format, bool has_header) {
  if (format == DataFormat::automatic) {
    const auto ext = path.extension().string();
    format = (ext == ".libsvm" || ext == ".svm" || ext == ".txt") ? DataFormat::libsvm : DataFormat::csv;
  }
  return format == DataFormat::libsvm ? load_libsvm(path) : load_csv(path, has_header);
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const Dataset& dataset) {
  for (std::size_t r = 0; r < dataset.n_samples(); ++r) {
    for (double v : dataset.samples().row(r)) out << format_number(v) << ',';
    out << dataset.class_names()[dataset.label(r)] << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& dataset) {
  auto out = open_output(path);
  write_csv(out, dataset);
}

std::vector<FeatureId> parse_ids(std::istream& in) {
  std::vector<FeatureId> ids;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    FeatureId id = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), id);
    if (ec != std::errc() || ptr != line.data() + line.size()) {
      throw Error(at_line(line_no) + "expected a feature id, got '" + std::string(line) + "'");
    }
    ids.push_back(id);
  }
  return ids;
}

std::vector<FeatureId> load_ids(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_ids(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void save_ids(const std::filesystem::path& path, const std::vector<FeatureId>& ids) {
  auto out = open_output(path);
  for (FeatureId id : ids) out << id << '\n';
}

nlohmann::json config_to_json(const SelectionConfig& c) {
  return {
      {"target", c.target_count},
      {"k_folds", c.k_folds},
      {"local_threshold", c.local_threshold},
      {"min_iterations", c.min_iterations_per_step},
      {"max_iterations", c.max_iterations_per_step},
      {"removal_fraction", c.removal_fraction},
      {"bins", c.n_bins},
      {"counter_score", c.counter_score_enabled},
      {"subset_size", c.subset_size_override ? nlohmann::json(*c.subset_size_override) : nlohmann::json()},
      {"seed", c.seed},
      {"validation", c.validation == Validation::kfold ? "kfold" : "fixed_split"},
      {"split_test_fraction", c.split_test_fraction},
      {"jobs", c.jobs},
      {"train",
       {{"C", c.train.C},
        {"epochs", c.train.epochs},
        {"rate_offset", c.train.rate_offset},
        {"seed", c.train.seed}}},
  };
}

SelectionConfig config_from_json(const nlohmann::json& doc, SelectionConfig c) {
  if (!doc.is_object()) throw Error("config must be a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "target") c.target_count = value.get<std::size_t>();
      else if (key == "k_folds") c.k_folds = value.get<std::size_t>();
      else if (key == "local_threshold") c.local_threshold = value.get<double>();
      else if (key == "min_iterations") c.min_iterations_per_step = value.get<std::size_t>();
      else if (key == "max_iterations") c.max_iterations_per_step = value.get<std::size_t>();
      else if (key == "removal_fraction") c.removal_fraction = value.get<double>();
      else if (key == "bins") c.n_bins = value.get<std::size_t>();
      else if (key == "counter_score") c.counter_score_enabled = value.get<bool>();
      else if (key == "subset_size") {
        c.subset_size_override =
            value.is_null() ? std::nullopt : std::optional<std::size_t>(value.get<std::size_t>());
      } else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "validation") {
        const auto v = value.get<std::string>();
        if (v == "kfold") c.validation = Validation::kfold;
        else if (v == "fixed_split") c.validation = Validation::fixed_split;
        else throw Error("config: validation must be 'kfold' or 'fixed_split'");
      } else if (key == "split_test_fraction") c.split_test_fraction = value.get<double>();
      else if (key == "jobs") c.jobs = value.get<std::size_t>();
      else if (key == "train") {
        if (!value.is_object()) throw Error("config: 'train' must be an object");
        for (const auto& [tkey, tvalue] : value.items()) {
          if (tkey == "C") c.train.C = tvalue.get<double>();
          else if (tkey == "epochs") c.train.epochs = tvalue.get<std::size_t>();
          else if (tkey == "rate_offset") c.train.rate_offset = tvalue.get<double>();
          else if (tkey == "seed") c.train.seed = tvalue.get<std::uint64_t>();
          else throw Error("config: unknown key 'train." + tkey + "'");
        }
      } else {
        throw Error("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  return c;
}

nlohmann::json model_to_json(const AppearanceModel& model) {
  return {{"selected_ids", model.selected_ids},
          {"positive_filter", model.positive_filter},
          {"negative_filter", model.negative_filter}};
}

AppearanceModel model_from_json(const nlohmann::json& doc) {
  AppearanceModel model;
  try {
    model.selected_ids = doc.at("selected_ids").get<std::vector<FeatureId>>();
    model.positive_filter = doc.at("positive_filter").get<std::vector<double>>();
    model.negative_filter = doc.at("negative_filter").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model: ") + e.what());
  }
  model.validate();
  return model;
}

void save_model(const std::filesystem::path& path, const AppearanceModel& model) {
  save_json(path, model_to_json(model));
}

AppearanceModel load_model(const std::filesystem::path& path) {
  return model_from_json(load_json(path));
}

nlohmann::json synth_truth_to_json(const SynthSpec& spec, const SynthData& data) {
  return {{"spec",
           {{"samples_per_class", spec.samples_per_class},
            {"n_relevant", spec.n_relevant},
            {"n_redundant", spec.n_redundant},
            {"n_irrelevant", spec.n_irrelevant},
            {"separation", spec.separation},
            {"redundancy_noise", spec.redundancy_noise},
            {"seed", spec.seed}}},
          {"relevant_ids", data.relevant_ids},
          {"redundant_ids", data.redundant_ids},
          {"irrelevant_ids", data.irrelevant_ids}};
}

RunReport run_select(const Dataset& dataset, const SelectionConfig& config,
                     double holdout_fraction, const StepObserver& observer) {
  const auto started = std::chrono::steady_clock::now();
  RunReport report;
  report.config = config;
  report.n_samples = dataset.n_samples();
  report.n_features = dataset.n_features();
  report.class_names = dataset.class_names();

  if (holdout_fraction == 0.0) {
    report.result = run_selection(dataset, config, observer);
  } else {
    const StreamSplitter streams(config.seed);
    const Split split = stratified_split(dataset.labels(), dataset.n_classes(), holdout_fraction,
                                         streams.derive("holdout"));
    const Dataset train_set = dataset.subset_rows(split.train);
    const Dataset test_set = dataset.subset_rows(split.test);
    report.result = run_selection(train_set, config, observer);
    report.holdout = HoldoutSummary{
        holdout_fraction, split.train.size(), split.test.size(),
        holdout_uar(train_set, test_set, dataset.feature_ids(), config.train),
        holdout_uar(train_set, test_set, report.result.selected_ids, config.train)};
  }
  report.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

nlohmann::json report_to_json(const RunReport& report) {
  nlohmann::json steps = nlohmann::json::array();
  nlohmann::json step_seconds = nlohmann::json::array();
  for (const auto& s : report.result.trace) {
    nlohmann::json removed = nlohmann::json::array();
    for (const auto& r : s.removed) removed.push_back({{"id", r.id}, {"relevance", r.relevance}});
    steps.push_back({{"step", s.step},
                     {"iterations", s.iterations},
                     {"iteration_scores", s.iteration_scores},
                     {"local_criterion", s.local_criterion},
                     {"hit_iteration_cap", s.hit_iteration_cap},
                     {"baseline_uar", s.baseline_uar},
                     {"alpha", s.alpha},
                     {"removed", removed},
                     {"remaining_after", s.remaining_after}});
    step_seconds.push_back(s.wall_seconds);
  }

  nlohmann::json holdout;  // null when absent
  if (report.holdout) {
    holdout = {{"test_fraction", report.holdout->test_fraction},
               {"train_rows", report.holdout->train_rows},
               {"test_rows", report.holdout->test_rows},
               {"full_uar", report.holdout->full_uar},
               {"selected_uar", report.holdout->selected_uar}};
  }

  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"config", config_to_json(report.config)},
          {"data",
           {{"path", report.data_path},
            {"n_samples", report.n_samples},
            {"n_features", report.n_features},
            {"class_names", report.class_names}}},
          {"selected_ids", report.result.selected_ids},
          {"removal_order", report.result.removal_order()},
          {"subset_evaluations", report.result.subset_evaluations},
          {"steps", steps},
          {"holdout", holdout},
          {"timing", {{"step_seconds", step_seconds}, {"total_seconds", report.total_seconds}}}};
}

std::vector<FeatureId> selected_ids_from_report(const nlohmann::json& doc) {
  try {
    return doc.at("selected_ids").get<std::vector<FeatureId>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("report: ") + e.what());
  }
}

nlohmann::json load_json(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void save_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
}

}  // namespace sbfe
