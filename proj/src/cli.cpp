#include "sbfe/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <numeric>
#include <ostream>

#include <CLI11.hpp>

#include "sbfe/appearance.hpp"
#include "sbfe/classic_sbe.hpp"
#include "sbfe/classifier.hpp"
#include "sbfe/error.hpp"
#include "sbfe/io.hpp"
#include "sbfe/mutual_info.hpp"
#include "sbfe/random.hpp"
#include "sbfe/selector.hpp"
#include "sbfe/synth.hpp"

namespace sbfe {

namespace {

namespace fs = std::filesystem;

struct DataOptions {
  std::string path;
  std::string format = "auto";
  bool header = false;

  void attach(CLI::App& cmd) {
    cmd.add_option("--data", path, "Dataset file (CSV with trailing label column, or LIBSVM)")
        ->required();
    cmd.add_option("--format", format, "auto, csv or libsvm")
        ->check(CLI::IsMember({"auto", "csv", "libsvm"}));
    cmd.add_flag("--header", header, "CSV input has a header row");
  }

  Dataset load() const {
    const DataFormat f = format == "csv"      ? DataFormat::csv
                         : format == "libsvm" ? DataFormat::libsvm
                                              : DataFormat::automatic;
    return load_dataset(path, f, header);
  }
};

// Training-order randomness is one named stream of the master seed.
std::uint64_t training_seed(std::uint64_t seed) { return StreamSplitter(seed).derive("training"); }

std::vector<FeatureId> load_feature_list(const fs::path& path) {
  if (path.extension() == ".json") return selected_ids_from_report(load_json(path));
  return load_ids(path);
}

struct SelectCommand {
  DataOptions data;
  std::string config_path;
  std::size_t target = 0;
  std::size_t k = 0;
  double tau = 0;
  std::size_t min_iterations = 0;
  std::size_t max_iterations = 0;
  double fraction = 0;
  std::size_t bins = 0;
  bool no_counter_score = false;
  std::size_t subset_size = 0;
  std::uint64_t seed = 0;
  double C = 0;
  std::size_t epochs = 0;
  double rate_offset = 0;
  std::string validation;
  double split_fraction = 0;
  std::size_t jobs = 0;
  double holdout = 0.25;
  std::string out;
  std::string ids_out;
  bool verbose = false;

  std::map<std::string, CLI::Option*> opts;

  void attach(CLI::App& cmd) {
    data.attach(cmd);
    cmd.add_option("--config", config_path, "JSON config file; flags override its values");
    opts["target"] = cmd.add_option("--target", target, "Number of features to keep")->check(CLI::PositiveNumber);
    opts["k"] = cmd.add_option("--k", k, "Folds for k-fold subsampling (default 3)");
    opts["tau"] = cmd.add_option("--tau", tau, "Local stopping threshold on the iteration-UAR stdev (default 0.6)");
    opts["min-iterations"] = cmd.add_option("--min-iterations", min_iterations, "Minimum iterations per step (default 5)");
    opts["max-iterations"] = cmd.add_option("--max-iterations", max_iterations, "Iteration cap per step (default 50)");
    opts["fraction"] = cmd.add_option("--fraction", fraction, "Fraction of remaining features removed per step (default 0.05)");
    opts["bins"] = cmd.add_option("--bins", bins, "Histogram bins for mutual information (default 10)");
    cmd.add_flag("--no-counter-score", no_counter_score, "Disable the mutual-information counter score");
    opts["subset-size"] = cmd.add_option("--subset-size", subset_size, "Fixed subset size instead of round(sqrt(N))");
    opts["seed"] = cmd.add_option("--seed", seed, "Master random seed");
    opts["C"] = cmd.add_option("--C", C, "SVM regularisation constant (default 1)");
    opts["epochs"] = cmd.add_option("--epochs", epochs, "SVM training epochs (default 20)");
    opts["rate-offset"] = cmd.add_option("--rate-offset", rate_offset, "Offset t0 in the 1/(lambda (t + t0)) step size");
    opts["validation"] = cmd.add_option("--validation", validation, "kfold or fixed_split")
                             ->check(CLI::IsMember({"kfold", "fixed_split"}));
    opts["split-fraction"] = cmd.add_option("--split-fraction", split_fraction, "Test fraction for fixed_split validation");
    opts["jobs"] = cmd.add_option("--jobs", jobs, "Worker threads for subset evaluation");
    cmd.add_option("--holdout", holdout, "Fraction of rows held out for the final full-vs-selected comparison (0 disables)")
        ->check(CLI::Range(0.0, 0.9));
    cmd.add_option("--out", out, "RunReport JSON output")->required();
    cmd.add_option("--ids-out", ids_out, "Selected feature IDs, one per line");
    cmd.add_flag("--verbose", verbose, "Print one line per step to stderr");
  }

  bool given(const std::string& name) const { return opts.at(name)->count() > 0; }

  SelectionConfig effective_config() const {
    SelectionConfig c;
    bool target_known = false;
    bool train_seed_known = false;
    if (!config_path.empty()) {
      const auto doc = load_json(config_path);
      c = config_from_json(doc, c);
      target_known = doc.contains("target");
      train_seed_known = doc.contains("train") && doc["train"].contains("seed");
    }
    if (given("target")) {
      c.target_count = target;
      target_known = true;
    }
    if (!target_known) throw CLI::RequiredError("--target (or 'target' in --config)");
    if (given("k")) c.k_folds = k;
    if (given("tau")) c.local_threshold = tau;
    if (given("min-iterations")) c.min_iterations_per_step = min_iterations;
    if (given("max-iterations")) c.max_iterations_per_step = max_iterations;
    if (given("fraction")) c.removal_fraction = fraction;
    if (given("bins")) c.n_bins = bins;
    if (no_counter_score) c.counter_score_enabled = false;
    if (given("subset-size")) c.subset_size_override = subset_size;
    if (given("seed")) c.seed = seed;
    if (given("C")) c.train.C = C;
    if (given("epochs")) c.train.epochs = epochs;
    if (given("rate-offset")) c.train.rate_offset = rate_offset;
    if (given("validation")) c.validation = validation == "kfold" ? Validation::kfold : Validation::fixed_split;
    if (given("split-fraction")) c.split_test_fraction = split_fraction;
    if (given("jobs")) c.jobs = jobs;
    if (!train_seed_known) c.train.seed = training_seed(c.seed);
    return c;
  }

  int run(std::ostream& out_stream, std::ostream& err) const {
    const SelectionConfig config = effective_config();
    const Dataset dataset = data.load();
    StepObserver observer;
    if (verbose) {
      observer = [&err](const StepRecord& s) {
        err << "step " << s.step << ": iterations=" << s.iterations << " L_c=" << s.local_criterion
            << " E=" << s.baseline_uar << " alpha=" << s.alpha << " removed=" << s.removed.size()
            << " remaining=" << s.remaining_after << '\n';
      };
    }
    RunReport report = run_select(dataset, config, holdout, observer);
    report.data_path = data.path;
    save_json(out, report_to_json(report));
    if (!ids_out.empty()) save_ids(ids_out, report.result.selected_ids);

    out_stream << "selected " << report.result.selected_ids.size() << " of " << dataset.n_features()
               << " features in " << report.result.trace.size() << " steps\n";
    if (report.holdout) {
      out_stream << "holdout uar full=" << format_number(report.holdout->full_uar)
                 << " selected=" << format_number(report.holdout->selected_uar) << '\n';
    }
    return kExitOk;
  }
};

struct TrainOptions {
  double C = 1.0;
  std::size_t epochs = 20;
  double rate_offset = 0.0;

  void attach(CLI::App& cmd) {
    cmd.add_option("--C", C, "SVM regularisation constant")->check(CLI::PositiveNumber);
    cmd.add_option("--epochs", epochs, "SVM training epochs")->check(CLI::PositiveNumber);
    cmd.add_option("--rate-offset", rate_offset, "Step size offset t0")->check(CLI::NonNegativeNumber);
  }

  TrainConfig make(std::uint64_t seed) const {
    return TrainConfig{C, epochs, rate_offset, training_seed(seed)};
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wrapper feature selection by k-fold subsampled sequential backward elimination",
               std::string(kToolName)};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  // select
  SelectCommand select;
  select.attach(*app.add_subcommand("select", "Run backward elimination and write a RunReport"));

  // rank-mi
  DataOptions rank_data;
  std::size_t rank_bins = 10;
  std::size_t rank_top = 0;
  auto* rank = app.add_subcommand("rank-mi", "Rank features by mutual information with the class");
  rank_data.attach(*rank);
  rank->add_option("--bins", rank_bins, "Equal-width histogram bins")->check(CLI::Range(2, 1 << 20));
  rank->add_option("--top", rank_top, "Only print the first N rows");

  // eval
  DataOptions eval_data;
  std::string eval_features;
  std::size_t eval_k = 3;
  std::uint64_t eval_seed = 0;
  TrainOptions eval_train;
  auto* eval = app.add_subcommand("eval", "k-fold UAR of a given feature subset");
  eval_data.attach(*eval);
  eval->add_option("--features", eval_features, "IDs file, or a RunReport JSON (all features if omitted)");
  eval->add_option("--k", eval_k, "Folds")->check(CLI::Range(2, 1 << 20));
  eval->add_option("--seed", eval_seed, "Master random seed");
  eval_train.attach(*eval);

  // gen-synth
  SynthSpec synth_spec;
  std::string synth_out;
  std::string synth_truth;
  auto* gen = app.add_subcommand("gen-synth", "Generate a dataset with planted relevant features");
  gen->add_option("--per-class", synth_spec.samples_per_class, "Samples per class");
  gen->add_option("--relevant", synth_spec.n_relevant, "Relevant features");
  gen->add_option("--redundant", synth_spec.n_redundant, "Redundant copies of relevant features");
  gen->add_option("--irrelevant", synth_spec.n_irrelevant, "Irrelevant features");
  gen->add_option("--delta", synth_spec.separation, "Class mean separation of relevant features");
  gen->add_option("--sigma", synth_spec.redundancy_noise, "Noise added to redundant copies");
  gen->add_option("--seed", synth_spec.seed, "Random seed");
  gen->add_option("--out", synth_out, "CSV output")->required();
  gen->add_option("--truth", synth_truth, "Ground-truth JSON output");

  // model-train
  DataOptions model_data;
  std::string model_features;
  std::string positive_label = "1";
  std::string model_out;
  auto* mtrain = app.add_subcommand("model-train", "Build an appearance model over selected features");
  model_data.attach(*mtrain);
  mtrain->add_option("--features", model_features, "IDs file, or a RunReport JSON")->required();
  mtrain->add_option("--positive-label", positive_label, "Label of positive examples; all others are negative");
  mtrain->add_option("--out", model_out, "Model JSON output")->required();

  // model-score
  std::string score_model;
  std::string score_data;
  bool score_header = false;
  bool score_unlabeled = false;
  auto* mscore = app.add_subcommand("model-score", "Score feature vectors with an appearance model");
  mscore->add_option("--model", score_model, "Model JSON")->required();
  mscore->add_option("--data", score_data, "CSV of feature vectors")->required();
  mscore->add_flag("--header", score_header, "CSV input has a header row");
  mscore->add_flag("--unlabeled", score_unlabeled, "CSV has no trailing label column");

  // sbe-oracle
  DataOptions oracle_data;
  std::size_t oracle_target = 1;
  std::uint64_t oracle_seed = 0;
  double oracle_split = 0.3;
  TrainOptions oracle_train;
  std::string oracle_out;
  auto* oracle = app.add_subcommand("sbe-oracle", "Exhaustive one-at-a-time backward elimination on a fixed split");
  oracle_data.attach(*oracle);
  oracle->add_option("--target", oracle_target, "Number of features to keep")->required();
  oracle->add_option("--seed", oracle_seed, "Master random seed");
  oracle->add_option("--split-fraction", oracle_split, "Test fraction of the fixed split");
  oracle_train.attach(*oracle);
  oracle->add_option("--out", oracle_out, "JSON output");

  if (!args.empty() && !args.front().starts_with("-")) {
    const auto subs = app.get_subcommands([](const CLI::App*) { return true; });
    const bool known = std::ranges::any_of(subs, [&](const CLI::App* s) { return s->get_name() == args.front(); });
    if (!known) {
      err << "error: unknown subcommand '" << args.front() << "'\n\n" << app.help();
      return kExitUsage;
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("select")) return select.run(out, err);

    if (app.got_subcommand("rank-mi")) {
      const Dataset dataset = rank_data.load();
      auto ranking = rank_by_mutual_information(dataset, rank_bins);
      if (rank_top > 0 && rank_top < ranking.size()) ranking.resize(rank_top);
      out << "feature_id\tmutual_information_bits\n";
      for (const auto& [id, bits] : ranking) out << id << '\t' << format_number(bits) << '\n';
      return kExitOk;
    }

    if (app.got_subcommand("eval")) {
      const Dataset dataset = eval_data.load();
      const auto ids = eval_features.empty() ? dataset.feature_ids() : load_feature_list(eval_features);
      const TrainConfig train_config = eval_train.make(eval_seed);
      const ConfusionCounts counts = kfold_confusion(project(dataset, ids), eval_k, train_config,
                                                     StreamSplitter(eval_seed).derive("folds"));
      out << "features " << ids.size() << '\n';
      for (std::size_t c = 0; c < counts.n_classes(); ++c) {
        out << "class " << dataset.class_names()[c] << " correct " << counts.correct(c) << " wrong "
            << counts.wrong(c) << '\n';
      }
      out << "uar " << format_number(uar(counts)) << '\n';
      return kExitOk;
    }

    if (app.got_subcommand("gen-synth")) {
      const SynthData data = generate(synth_spec);
      save_csv(synth_out, data.dataset);
      if (!synth_truth.empty()) save_json(synth_truth, synth_truth_to_json(synth_spec, data));
      out << "wrote " << data.dataset.n_samples() << " rows x " << data.dataset.n_features()
          << " features to " << synth_out << '\n';
      return kExitOk;
    }

    if (app.got_subcommand("model-train")) {
      const Dataset dataset = model_data.load();
      const auto ids = load_feature_list(model_features);
      const auto& names = dataset.class_names();
      const auto it = std::ranges::find(names, positive_label);
      if (it == names.end()) throw Error("positive label '" + positive_label + "' not found in data");
      const auto positive = static_cast<ClassLabel>(it - names.begin());
      std::vector<std::size_t> pos_rows;
      std::vector<std::size_t> neg_rows;
      for (std::size_t r = 0; r < dataset.n_samples(); ++r) {
        (dataset.label(r) == positive ? pos_rows : neg_rows).push_back(r);
      }
      const auto rows_of = [&](const std::vector<std::size_t>& rows) {
        Matrix m(rows.size(), dataset.n_features());
        for (std::size_t i = 0; i < rows.size(); ++i) {
          std::ranges::copy(dataset.samples().row(rows[i]), m.row(i).begin());
        }
        return m;
      };
      const AppearanceModel model = build_model(rows_of(pos_rows), rows_of(neg_rows), ids);
      save_model(model_out, model);
      out << "model over " << ids.size() << " features from " << pos_rows.size() << " positive and "
          << neg_rows.size() << " negative examples\n";
      return kExitOk;
    }

    if (app.got_subcommand("model-score")) {
      const AppearanceModel model = load_model(score_model);
      if (score_unlabeled) {
        const Matrix rows = load_matrix_csv(score_data, score_header);
        out << "row\tscore\n";
        for (std::size_t r = 0; r < rows.rows(); ++r) {
          out << r << '\t' << format_number(region_score(model, rows.row(r))) << '\n';
        }
      } else {
        const Dataset dataset = load_csv(score_data, score_header);
        out << "row\tscore\tlabel\n";
        for (std::size_t r = 0; r < dataset.n_samples(); ++r) {
          out << r << '\t' << format_number(region_score(model, dataset.samples().row(r))) << '\t'
              << dataset.class_names()[dataset.label(r)] << '\n';
        }
      }
      return kExitOk;
    }

    if (app.got_subcommand("sbe-oracle")) {
      const Dataset dataset = oracle_data.load();
      SelectionConfig split_config;
      split_config.seed = oracle_seed;
      split_config.split_test_fraction = oracle_split;
      const ClassicSbeResult result = classic_sbe(dataset, oracle_target, fixed_split_for(dataset, split_config),
                                                  oracle_train.make(oracle_seed));
      for (std::size_t i = 0; i < result.removal_order.size(); ++i) {
        out << "removed " << result.removal_order[i] << " uar " << format_number(result.step_uar[i]) << '\n';
      }
      out << "selected";
      for (FeatureId id : result.selected_ids) out << ' ' << id;
      out << '\n';
      if (!oracle_out.empty()) {
        save_json(oracle_out, {{"removal_order", result.removal_order},
                               {"selected_ids", result.selected_ids},
                               {"step_uar", result.step_uar}});
      }
      return kExitOk;
    }
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace sbfe
