#include "labmine/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "labmine/csv.hpp"
#include "labmine/errors.hpp"
#include "labmine/evaluate.hpp"
#include "labmine/events.hpp"
#include "labmine/feature_table.hpp"
#include "labmine/model.hpp"
#include "labmine/monitor.hpp"
#include "labmine/rank.hpp"
#include "labmine/synth.hpp"

namespace labmine {

namespace {

namespace fs = std::filesystem;

// Relative inputs fall back to LABMINE_DATA_DIR when not found beside
// the working directory.
fs::path resolve_input(const std::string& path) {
  fs::path p(path);
  if (fs::exists(p) || p.is_absolute()) return p;
  if (const char* base = std::getenv("LABMINE_DATA_DIR")) {
    const fs::path candidate = fs::path(base) / p;
    if (fs::exists(candidate)) return candidate;
  }
  return p;
}

using StampPairs = std::vector<std::pair<std::string, std::string>>;

void write_stamp(std::ostream& out, const std::string& subcommand,
                 const StampPairs& kv, char comment_char = '#') {
  out << comment_char << " labmine " << subcommand;
  for (const auto& [key, value] : kv) out << ' ' << key << '=' << value;
  out << '\n';
}

// Writes through a callback either to a file or to stdout for "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  fn(out);
}

struct TableInput {
  std::string table_path;
  std::string events_path;
  std::string outcomes_path;
  std::string items_path;
  std::string mode_name = "avg";

  void add_options(CLI::App* sub) {
    sub->add_option("--table", table_path,
                    "Prebuilt feature table (.csv or .arff)");
    sub->add_option("--events", events_path, "Lab events CSV");
    sub->add_option("--outcomes", outcomes_path, "Patient outcomes CSV");
    sub->add_option("--items", items_path,
                    "Lab item catalog CSV (fixes the item universe)");
    sub->add_option("--mode", mode_name, "Aggregation mode: avg or count")
        ->check(CLI::IsMember({"avg", "count"}));
  }

  FeatureTable load() const {
    if (!table_path.empty()) {
      if (!events_path.empty() || !outcomes_path.empty())
        throw std::invalid_argument(
            "--table cannot be combined with --events/--outcomes");
      const fs::path p = resolve_input(table_path);
      return read_table(p, table_format_for_path(p));
    }
    if (events_path.empty() || outcomes_path.empty())
      throw std::invalid_argument(
          "provide either --table or both --events and --outcomes");
    const AggregationMode mode = aggregation_mode_from_name(mode_name);
    const LabEventParse parsed = parse_labevents(resolve_input(events_path));
    const OutcomeMap outcomes = load_outcomes(resolve_input(outcomes_path));
    LabCatalog catalog;
    if (!items_path.empty()) catalog = parse_labitems(resolve_input(items_path));
    const std::vector<std::int64_t> universe =
        default_item_universe(catalog, parsed.events);
    FeatureBuildResult built =
        build_feature_table(parsed.events, outcomes, mode, universe);
    if (parsed.skipped_rows > 0)
      std::cerr << "note: skipped " << parsed.skipped_rows
                << " malformed event row(s)\n";
    if (built.events_outside_universe > 0)
      std::cerr << "note: ignored " << built.events_outside_universe
                << " event(s) outside the item universe\n";
    return std::move(built.table);
  }
};

struct AlgoFlags {
  std::string algo = "j48";
  double tree_confidence = 0.25;
  int tree_min_leaf = 2;
  bool unpruned = false;
  int rf_trees = 10;
  int rf_subset = 0;
  bool rf_no_bootstrap = false;
  std::string svm_kernel = "linear";
  int svm_degree = 2;
  double svm_c = 1.0;
  double svm_tol = 1e-3;
  std::uint64_t seed = 0;

  void add_options(CLI::App* sub) {
    sub->add_option("--algo", algo,
                    "Classifier: zeror, naivebayes, j48, randomforest, smo");
    sub->add_option("--seed", seed, "Seed for stochastic steps");
    sub->add_option("--confidence", tree_confidence,
                    "Tree pruning confidence factor");
    sub->add_option("--min-leaf", tree_min_leaf,
                    "Minimum training rows per split side");
    sub->add_flag("--unpruned", unpruned, "Skip tree pruning");
    sub->add_option("--trees", rf_trees, "Forest size");
    sub->add_option("--subset", rf_subset,
                    "Forest per-node feature subset (0 = floor(log2 M) + 1)");
    sub->add_flag("--no-bootstrap", rf_no_bootstrap,
                  "Train forest members on the full table");
    sub->add_option("--kernel", svm_kernel, "SVM kernel: linear or poly")
        ->check(CLI::IsMember({"linear", "poly"}));
    sub->add_option("--degree", svm_degree, "Polynomial kernel degree");
    sub->add_option("--c", svm_c, "SVM complexity constant");
    sub->add_option("--tol", svm_tol, "SMO KKT tolerance");
  }

  ModelSpec to_spec() const {
    const auto algorithm = parse_algorithm(algo);
    if (!algorithm)
      throw std::invalid_argument("unknown classifier '" + algo + "'");
    ModelSpec spec;
    spec.algorithm = *algorithm;
    spec.seed = seed;
    spec.tree.confidence = tree_confidence;
    spec.tree.min_leaf = tree_min_leaf;
    spec.tree.prune = !unpruned;
    spec.forest.n_trees = rf_trees;
    spec.forest.feature_subset = rf_subset;
    spec.forest.bootstrap = !rf_no_bootstrap;
    spec.svm.kernel =
        svm_kernel == "poly" ? SvmKernel::kPolynomial : SvmKernel::kLinear;
    spec.svm.degree = svm_degree;
    spec.svm.c = svm_c;
    spec.svm.tol = svm_tol;
    validate_spec(spec);
    return spec;
  }
};

std::string spec_label(const ModelSpec& spec) { return algorithm_name(spec.algorithm); }

StampPairs table_stamp(const TableInput& input) {
  StampPairs kv;
  if (!input.table_path.empty()) {
    kv.emplace_back("table", input.table_path);
  } else {
    kv.emplace_back("events", input.events_path);
    kv.emplace_back("outcomes", input.outcomes_path);
    if (!input.items_path.empty()) kv.emplace_back("items", input.items_path);
    kv.emplace_back("mode", input.mode_name);
  }
  return kv;
}

int run_ingest(const TableInput& input, const std::string& out_path,
               TableFormat format_override, bool has_override) {
  if (input.table_path.empty() &&
      (input.events_path.empty() || input.outcomes_path.empty()))
    throw std::invalid_argument("ingest requires --events and --outcomes");
  const FeatureTable table = input.load();
  const TableFormat format = has_override
                                 ? format_override
                                 : table_format_for_path(out_path);
  with_output(out_path, [&](std::ostream& out) {
    // ARFF readers treat % as the comment character, not #.
    write_stamp(out, "ingest", table_stamp(input),
                format == TableFormat::kArff ? '%' : '#');
    write_table(table, out, format);
  });
  std::cerr << "wrote " << table.n_rows() << " patients x "
            << table.n_attributes() << " items (" << input.mode_name << ")\n";
  return 0;
}

int run_rank(const TableInput& input, const std::string& out_path, int jobs) {
  const FeatureTable table = input.load();
  const std::vector<RankedAttribute> ranked = rank_all(table, jobs);
  with_output(out_path, [&](std::ostream& out) {
    write_stamp(out, "rank", table_stamp(input));
    write_ranking(out, ranked);
  });
  return 0;
}

int run_sweep(const TableInput& input, const AlgoFlags& algo, int k,
              const std::vector<double>& fraction_pcts,
              const std::string& scope_name, const std::string& format,
              const std::string& out_path, const std::string& series_path,
              int jobs) {
  const ModelSpec spec = algo.to_spec();
  const FeatureTable table = input.load();
  const std::vector<RankedAttribute> ranked = rank_all(table, jobs);
  std::vector<double> fractions;
  if (fraction_pcts.empty()) {
    fractions = default_sweep_fractions();
  } else {
    for (double pct : fraction_pcts) fractions.push_back(pct / 100.0);
  }
  const SelectionScope scope = scope_name == "perfold"
                                   ? SelectionScope::kPerFold
                                   : SelectionScope::kFullTable;
  const SweepResult result =
      sweep(spec, table, ranked, fractions, k, algo.seed, scope, jobs);

  StampPairs kv = table_stamp(input);
  kv.emplace_back("algo", spec_label(spec));
  kv.emplace_back("k", std::to_string(k));
  kv.emplace_back("seed", std::to_string(algo.seed));
  kv.emplace_back("scope", scope == SelectionScope::kPerFold ? "perfold" : "full");
  with_output(out_path, [&](std::ostream& out) {
    if (format == "structured") {
      out << structured_sweep_report(result);
    } else {
      write_stamp(out, "sweep", kv);
      out << render_sweep_report(result);
    }
  });
  if (!series_path.empty()) {
    with_output(series_path, [&](std::ostream& out) {
      write_stamp(out, "sweep", kv);
      write_sweep_series(out, result);
    });
  }
  return 0;
}

int run_train(const TableInput& input, const AlgoFlags& algo,
              const std::string& out_path, const std::string& readout_path,
              int jobs) {
  const ModelSpec spec = algo.to_spec();
  const FeatureTable table = input.load();
  const Model model = train(spec, table, jobs);
  if (out_path.empty())
    throw std::invalid_argument("train requires --out for the model file");
  save_model(fs::path(out_path), model);
  if (!readout_path.empty()) {
    const auto* tree_state = std::get_if<TreeModelState>(&model.state);
    if (tree_state == nullptr)
      throw std::invalid_argument("--readout applies to j48 models only");
    with_output(readout_path, [&](std::ostream& out) {
      out << render_tree(*tree_state->root, model.schema.attribute_names);
    });
  }
  std::cerr << "trained " << spec_label(spec) << " on " << table.n_rows()
            << " rows\n";
  return 0;
}

int run_eval(const TableInput& input, const AlgoFlags& algo,
             const std::string& protocol, int k, double train_pct, int repeats,
             const std::string& format, const std::string& out_path, int jobs) {
  const ModelSpec spec = algo.to_spec();
  const FeatureTable table = input.load();
  StampPairs kv = table_stamp(input);
  kv.emplace_back("algo", spec_label(spec));
  kv.emplace_back("protocol", protocol);
  kv.emplace_back("seed", std::to_string(algo.seed));

  if (protocol == "cv") {
    kv.emplace_back("k", std::to_string(k));
    const CvResult result = cross_validate(spec, table, k, algo.seed, jobs);
    with_output(out_path, [&](std::ostream& out) {
      if (format == "structured") {
        out << structured_cv_report(spec_label(spec), result);
      } else {
        write_stamp(out, "eval", kv);
        out << render_cv_report(spec_label(spec), result);
      }
    });
    return 0;
  }
  if (protocol != "split")
    throw std::invalid_argument("unknown protocol '" + protocol +
                                "' (use cv or split)");
  SplitPlan plan;
  plan.train_fraction = train_pct / 100.0;
  plan.repeats = repeats;
  plan.seed = algo.seed;
  kv.emplace_back("train_pct", format_double(train_pct));
  kv.emplace_back("repeats", std::to_string(repeats));
  const SplitEvalResult result = split_eval(spec, table, plan, jobs);
  with_output(out_path, [&](std::ostream& out) {
    if (format == "structured") {
      out << structured_split_report(spec_label(spec), result);
    } else {
      write_stamp(out, "eval", kv);
      out << render_split_report(spec_label(spec), result);
    }
  });
  return 0;
}

int run_monitor(const std::string& model_path, const std::string& events_path,
                double threshold, bool no_suppress, const std::string& out_path,
                const std::string& summary_path) {
  const Model model = load_model(resolve_input(model_path));
  LabEventParse parsed;
  if (events_path.empty() || events_path == "-") {
    parsed = parse_labevents(std::cin);
  } else {
    parsed = parse_labevents(resolve_input(events_path));
  }
  if (parsed.skipped_rows > 0)
    std::cerr << "note: skipped " << parsed.skipped_rows
              << " malformed event row(s)\n";

  ReplayOptions options;
  options.threshold = threshold;
  options.suppress_repeats = !no_suppress;
  const ReplayResult result = replay(model, parsed.events, options);

  StampPairs kv{{"model", model_path},
                {"threshold", format_double(threshold)},
                {"suppress", options.suppress_repeats ? "1" : "0"}};
  with_output(out_path, [&](std::ostream& out) {
    write_stamp(out, "monitor", kv);
    write_csv_record(out, {"SUBJECT_ID", "CHART_TIME", "PROBABILITY", "THRESHOLD"});
    for (const WarningEvent& w : result.warnings) {
      write_csv_record(out, {std::to_string(w.subject_id), w.chart_time.to_string(),
                             format_double(w.probability),
                             format_double(w.threshold)});
    }
  });
  if (!summary_path.empty()) {
    with_output(summary_path, [&](std::ostream& out) {
      write_stamp(out, "monitor", kv);
      write_csv_record(out, {"SUBJECT_ID", "FINAL_PROBABILITY", "EVENTS",
                             "WARNINGS"});
      for (const PatientSummary& s : result.summaries) {
        write_csv_record(out, {std::to_string(s.subject_id),
                               format_double(s.final_probability),
                               std::to_string(s.n_events),
                               std::to_string(s.n_warnings)});
      }
    });
  }
  std::cerr << result.warnings.size() << " warning(s) across "
            << result.summaries.size() << " patient(s)\n";
  return 0;
}

int run_synth(const SynthConfig& config, const std::string& out_dir) {
  const SynthResult result = synth_corpus(config, out_dir);
  std::cerr << "wrote " << result.n_events << " events for " << config.n_patients
            << " patients (" << result.n_died << " died) to " << out_dir << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Clinical lab-event mining: aggregation, ranking, classifiers, "
               "evaluation protocols, and a deterioration monitor"};
  app.require_subcommand(1);

  int exit_code = 0;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Build a per-patient feature table");
  TableInput ingest_input;
  ingest_input.add_options(ingest);
  std::string ingest_out;
  std::string ingest_format;
  ingest->add_option("--out", ingest_out, "Output table path (- for stdout)");
  ingest->add_option("--format", ingest_format, "Force table format: csv or arff")
      ->check(CLI::IsMember({"csv", "arff"}));
  ingest->callback([&] {
    const bool has_override = !ingest_format.empty();
    const TableFormat fmt =
        ingest_format == "arff" ? TableFormat::kArff : TableFormat::kDelimited;
    exit_code = run_ingest(ingest_input, ingest_out, fmt, has_override);
  });

  // rank
  auto* rank = app.add_subcommand("rank", "Rank items by information gain");
  TableInput rank_input;
  rank_input.add_options(rank);
  std::string rank_out;
  int rank_jobs = 1;
  rank->add_option("--out", rank_out, "Ranking CSV path (- for stdout)");
  rank->add_option("--jobs", rank_jobs, "Worker thread cap");
  rank->callback([&] { exit_code = run_rank(rank_input, rank_out, rank_jobs); });

  // sweep
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Cross-validate top-ranked attribute fractions");
  TableInput sweep_input;
  sweep_input.add_options(sweep_cmd);
  AlgoFlags sweep_algo;
  sweep_algo.add_options(sweep_cmd);
  int sweep_k = 10;
  std::vector<double> sweep_fractions;
  std::string sweep_scope = "full";
  std::string sweep_format = "text";
  std::string sweep_out;
  std::string sweep_series;
  int sweep_jobs = 1;
  sweep_cmd->add_option("--k", sweep_k, "Cross-validation folds");
  sweep_cmd->add_option("--fractions", sweep_fractions,
                        "Percent fractions, e.g. 10,20,50")
      ->delimiter(',');
  sweep_cmd->add_option("--scope", sweep_scope,
                        "Attribute selection scope: full or perfold")
      ->check(CLI::IsMember({"full", "perfold"}));
  sweep_cmd->add_option("--report-format", sweep_format, "text or structured")
      ->check(CLI::IsMember({"text", "structured"}));
  sweep_cmd->add_option("--out", sweep_out, "Report path (- for stdout)");
  sweep_cmd->add_option("--series", sweep_series,
                        "Accuracy-vs-fraction CSV path");
  sweep_cmd->add_option("--jobs", sweep_jobs, "Worker thread cap");
  sweep_cmd->callback([&] {
    exit_code = run_sweep(sweep_input, sweep_algo, sweep_k, sweep_fractions,
                          sweep_scope, sweep_format, sweep_out, sweep_series,
                          sweep_jobs);
  });

  // train
  auto* train_cmd = app.add_subcommand("train", "Train and persist one model");
  TableInput train_input;
  train_input.add_options(train_cmd);
  AlgoFlags train_algo;
  train_algo.add_options(train_cmd);
  std::string train_out;
  std::string train_readout;
  int train_jobs = 1;
  train_cmd->add_option("--out", train_out, "Model file path")->required();
  train_cmd->add_option("--readout", train_readout,
                        "Also write the tree text readout here");
  train_cmd->add_option("--jobs", train_jobs, "Worker thread cap");
  train_cmd->callback([&] {
    exit_code =
        run_train(train_input, train_algo, train_out, train_readout, train_jobs);
  });

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a classifier spec");
  TableInput eval_input;
  eval_input.add_options(eval_cmd);
  AlgoFlags eval_algo;
  eval_algo.add_options(eval_cmd);
  std::string eval_protocol = "cv";
  int eval_k = 10;
  double eval_train_pct = 66.0;
  int eval_repeats = 10;
  std::string eval_format = "text";
  std::string eval_out;
  int eval_jobs = 1;
  eval_cmd->add_option("--protocol", eval_protocol, "cv or split")
      ->check(CLI::IsMember({"cv", "split"}));
  eval_cmd->add_option("--k", eval_k, "Cross-validation folds");
  eval_cmd->add_option("--train-pct", eval_train_pct,
                       "Split protocol: train percentage");
  eval_cmd->add_option("--repeats", eval_repeats, "Split protocol: repeats");
  eval_cmd->add_option("--report-format", eval_format, "text or structured")
      ->check(CLI::IsMember({"text", "structured"}));
  eval_cmd->add_option("--out", eval_out, "Report path (- for stdout)");
  eval_cmd->add_option("--jobs", eval_jobs, "Worker thread cap");
  eval_cmd->callback([&] {
    exit_code = run_eval(eval_input, eval_algo, eval_protocol, eval_k,
                         eval_train_pct, eval_repeats, eval_format, eval_out,
                         eval_jobs);
  });

  // monitor
  auto* monitor_cmd = app.add_subcommand(
      "monitor", "Replay events through a saved model and emit warnings");
  std::string monitor_model;
  std::string monitor_events;
  double monitor_threshold = 0.5;
  bool monitor_no_suppress = false;
  std::string monitor_out;
  std::string monitor_summary;
  monitor_cmd->add_option("--model", monitor_model, "Model file")->required();
  monitor_cmd->add_option("--events", monitor_events,
                          "Event stream CSV (- or empty for stdin)");
  monitor_cmd->add_option("--threshold", monitor_threshold,
                          "Warning threshold in [0, 1]");
  monitor_cmd->add_flag("--no-suppress", monitor_no_suppress,
                        "Warn on every scoring at or above the threshold");
  monitor_cmd->add_option("--out", monitor_out, "Warnings CSV (- for stdout)");
  monitor_cmd->add_option("--summary", monitor_summary,
                          "Per-patient summary CSV path");
  monitor_cmd->callback([&] {
    exit_code = run_monitor(monitor_model, monitor_events, monitor_threshold,
                            monitor_no_suppress, monitor_out, monitor_summary);
  });

  // synth
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic lab-event corpus");
  SynthConfig synth_config;
  std::string synth_out_dir;
  synth_cmd->add_option("--patients", synth_config.n_patients, "Patient count");
  synth_cmd->add_option("--items", synth_config.n_items, "Item count");
  synth_cmd->add_option("--informative", synth_config.n_informative,
                        "Planted informative item count");
  synth_cmd->add_option("--prevalence", synth_config.prevalence,
                        "Death-class fraction");
  synth_cmd->add_option("--seed", synth_config.seed, "Corpus seed");
  synth_cmd->add_option("--out-dir", synth_out_dir, "Output directory")
      ->required();
  synth_cmd->callback(
      [&] { exit_code = run_synth(synth_config, synth_out_dir); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return exit_code;
}

}  // namespace labmine
