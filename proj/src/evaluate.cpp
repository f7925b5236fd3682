#include "labmine/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "labmine/csv.hpp"
#include "labmine/parallel.hpp"
#include "labmine/tree.hpp"

namespace labmine {

std::int64_t ConfusionMatrix::total() const {
  return cells[0][0] + cells[0][1] + cells[1][0] + cells[1][1];
}

double ConfusionMatrix::accuracy() const {
  const std::int64_t n = total();
  if (n == 0) return 0.0;
  return static_cast<double>(cells[0][0] + cells[1][1]) / static_cast<double>(n);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (int a = 0; a < 2; ++a)
    for (int p = 0; p < 2; ++p) cells[a][p] += other.cells[a][p];
  return *this;
}

ConfusionMatrix confusion(std::span<const int> predictions,
                          std::span<const int> truths) {
  if (predictions.size() != truths.size())
    throw std::invalid_argument("confusion: prediction/truth length mismatch");
  if (predictions.empty())
    throw std::invalid_argument("confusion: empty inputs");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int p = predictions[i];
    const int a = truths[i];
    if ((p != 0 && p != 1) || (a != 0 && a != 1))
      throw std::invalid_argument("confusion: labels must be 0 or 1");
    ++cm.cells[a][p];
  }
  return cm;
}

MetricsReport weighted_metrics(const ConfusionMatrix& cm) {
  const std::int64_t n = cm.total();
  if (n == 0) throw std::invalid_argument("weighted_metrics: empty matrix");
  MetricsReport report;
  report.accuracy = cm.accuracy();
  for (int c = 0; c < 2; ++c) {
    const std::int64_t tp = cm.cells[c][c];
    const std::int64_t predicted = cm.cells[0][c] + cm.cells[1][c];
    const std::int64_t actual = cm.cells[c][0] + cm.cells[c][1];
    // Never-predicted class: precision 0 by convention.
    const double precision =
        predicted > 0 ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    const double recall =
        actual > 0 ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
    const double f =
        precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall)
                                 : 0.0;
    const double weight = static_cast<double>(actual) / static_cast<double>(n);
    report.weighted_precision += weight * precision;
    report.weighted_recall += weight * recall;
    report.weighted_f += weight * f;
  }
  return report;
}

namespace {

ConfusionMatrix evaluate_rows(const Model& model, const FeatureTable& table,
                              std::span<const std::size_t> rows) {
  ConfusionMatrix cm;
  for (std::size_t r : rows) {
    const FeatureRow& row = table.rows[r];
    const int predicted = predict_label(model, row.values);
    ++cm.cells[row.label == 1 ? 1 : 0][predicted];
  }
  return cm;
}

MetricsReport mean_metrics(std::span<const MetricsReport> reports) {
  MetricsReport mean;
  if (reports.empty()) return mean;
  for (const MetricsReport& r : reports) {
    mean.accuracy += r.accuracy;
    mean.weighted_precision += r.weighted_precision;
    mean.weighted_recall += r.weighted_recall;
    mean.weighted_f += r.weighted_f;
  }
  const double n = static_cast<double>(reports.size());
  mean.accuracy /= n;
  mean.weighted_precision /= n;
  mean.weighted_recall /= n;
  mean.weighted_f /= n;
  return mean;
}

}  // namespace

CvResult cross_validate(const ModelSpec& spec, const FeatureTable& table, int k,
                        std::uint64_t seed, int jobs) {
  validate_spec(spec);
  const FoldPlan plan = stratified_folds(table, k, seed);

  std::vector<ConfusionMatrix> per_fold(static_cast<std::size_t>(k));
  parallel_for(static_cast<std::size_t>(k), jobs, [&](std::size_t f) {
    const int fold = static_cast<int>(f);
    const FeatureTable train_table = select_rows(table, plan.train_rows(fold));
    const Model model = train(spec, train_table, 1);
    per_fold[f] = evaluate_rows(model, table, plan.test_rows(fold));
  });

  CvResult result;
  result.k = k;
  result.seed = seed;
  for (const ConfusionMatrix& cm : per_fold) result.pooled += cm;
  result.metrics = weighted_metrics(result.pooled);
  return result;
}

SplitEvalResult split_eval(const ModelSpec& spec, const FeatureTable& table,
                           const SplitPlan& plan, int jobs) {
  validate_spec(spec);
  if (plan.repeats < 1)
    throw std::invalid_argument("split_eval: repeats must be at least 1");

  const std::size_t repeats = static_cast<std::size_t>(plan.repeats);
  std::vector<MetricsReport> train_reports(repeats);
  std::vector<MetricsReport> test_reports(repeats);
  parallel_for(repeats, jobs, [&](std::size_t r) {
    const auto [train_table, test_table] =
        shuffle_split(table, plan, static_cast<int>(r));
    const Model model = train(spec, train_table, 1);
    std::vector<std::size_t> all_train(train_table.n_rows());
    std::vector<std::size_t> all_test(test_table.n_rows());
    for (std::size_t i = 0; i < all_train.size(); ++i) all_train[i] = i;
    for (std::size_t i = 0; i < all_test.size(); ++i) all_test[i] = i;
    train_reports[r] =
        weighted_metrics(evaluate_rows(model, train_table, all_train));
    test_reports[r] = weighted_metrics(evaluate_rows(model, test_table, all_test));
  });

  SplitEvalResult result;
  result.plan = plan;
  result.train_side.per_repeat = std::move(train_reports);
  result.train_side.mean = mean_metrics(result.train_side.per_repeat);
  result.test_side.per_repeat = std::move(test_reports);
  result.test_side.mean = mean_metrics(result.test_side.per_repeat);
  return result;
}

std::vector<double> default_sweep_fractions() {
  std::vector<double> fractions;
  for (int i = 1; i <= 10; ++i) fractions.push_back(static_cast<double>(i) / 10.0);
  return fractions;
}

namespace {

// Selected names projected back into the table's own column order.
std::vector<std::string> in_table_order(const FeatureTable& table,
                                        std::span<const std::string> names) {
  const std::set<std::string> wanted(names.begin(), names.end());
  std::vector<std::string> ordered;
  for (const std::string& name : table.attribute_names)
    if (wanted.contains(name)) ordered.push_back(name);
  if (ordered.size() != wanted.size())
    throw std::invalid_argument("sweep: ranking names missing from table");
  return ordered;
}

CvResult cross_validate_per_fold_selection(const ModelSpec& spec,
                                           const FeatureTable& table, int k,
                                           std::uint64_t seed, double fraction,
                                           int jobs) {
  const FoldPlan plan = stratified_folds(table, k, seed);
  std::vector<ConfusionMatrix> per_fold(static_cast<std::size_t>(k));
  parallel_for(static_cast<std::size_t>(k), jobs, [&](std::size_t f) {
    const int fold = static_cast<int>(f);
    const FeatureTable train_full = select_rows(table, plan.train_rows(fold));
    const std::vector<RankedAttribute> fold_ranking = rank_all(train_full, 1);
    const std::vector<std::string> keep =
        in_table_order(table, head_fraction(fold_ranking, fraction));
    const FeatureTable train_table = project_columns(train_full, keep);
    const FeatureTable test_view =
        project_columns(select_rows(table, plan.test_rows(fold)), keep);
    const Model model = train(spec, train_table, 1);
    std::vector<std::size_t> all(test_view.n_rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    per_fold[f] = evaluate_rows(model, test_view, all);
  });
  CvResult result;
  result.k = k;
  result.seed = seed;
  for (const ConfusionMatrix& cm : per_fold) result.pooled += cm;
  result.metrics = weighted_metrics(result.pooled);
  return result;
}

}  // namespace

SweepResult sweep(const ModelSpec& spec, const FeatureTable& table,
                  std::span<const RankedAttribute> ranked,
                  std::span<const double> fractions, int k, std::uint64_t seed,
                  SelectionScope scope, int jobs) {
  validate_spec(spec);
  if (ranked.size() != table.n_attributes())
    throw std::invalid_argument("sweep: ranking does not cover the table");
  {
    std::set<std::string> names;
    for (const RankedAttribute& r : ranked) names.insert(r.name);
    for (const std::string& name : table.attribute_names)
      if (!names.contains(name))
        throw std::invalid_argument("sweep: ranking is missing attribute '" +
                                    name + "'");
  }
  if (fractions.empty()) throw std::invalid_argument("sweep: no fractions");
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] > 0.0 && fractions[i] <= 1.0))
      throw std::invalid_argument("sweep: fractions must be in (0, 1]");
    if (i > 0 && fractions[i] <= fractions[i - 1])
      throw std::invalid_argument("sweep: fractions must be strictly increasing");
  }

  SweepResult result;
  result.k = k;
  result.seed = seed;
  result.scope = scope;
  for (const double fraction : fractions) {
    SweepRow row;
    row.fraction = fraction;
    const std::vector<std::string> keep =
        in_table_order(table, head_fraction(ranked, fraction));
    row.selected = keep.size();
    const FeatureTable projected = project_columns(table, keep);
    if (scope == SelectionScope::kFullTable) {
      const CvResult cv = cross_validate(spec, projected, k, seed, jobs);
      row.metrics = cv.metrics;
      row.pooled = cv.pooled;
    } else {
      const CvResult cv = cross_validate_per_fold_selection(spec, table, k, seed,
                                                            fraction, jobs);
      row.metrics = cv.metrics;
      row.pooled = cv.pooled;
    }
    if (spec.algorithm == Algorithm::kDecisionTree) {
      const auto tree = induce_c45(projected, spec.tree);
      row.leaves = leaf_count(*tree);
      row.tree_size = tree_size(*tree);
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

namespace {

std::string percent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f %%", value * 100.0);
  return buf;
}

std::string three(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  return buf;
}

void append_padded(std::string& out, const std::string& cell, std::size_t width) {
  out += cell;
  for (std::size_t i = cell.size(); i < width; ++i) out += ' ';
}

std::string render_table(std::span<const std::vector<std::string>> rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c)
      widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c + 1 < row.size()) {
        append_padded(out, row[c], widths[c] + 2);
      } else {
        out += row[c];
      }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  return out;
}

const char* kMetricsFooter =
    "Precision, recall and F-measure are support-weighted class averages;\n"
    "a class never predicted contributes precision 0.\n";

}  // namespace

std::string render_metrics_table(
    std::span<const std::pair<std::string, MetricsReport>> rows) {
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"Classifier", "Accuracy", "Precision", "Recall", "F-Measure"});
  for (const auto& [label, m] : rows) {
    grid.push_back({label, percent(m.accuracy), three(m.weighted_precision),
                    three(m.weighted_recall), three(m.weighted_f)});
  }
  return render_table(grid) + kMetricsFooter;
}

std::string render_confusion(const ConfusionMatrix& cm) {
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"", "predicted 0", "predicted 1"});
  grid.push_back({"actual 0", std::to_string(cm.cells[0][0]),
                  std::to_string(cm.cells[0][1])});
  grid.push_back({"actual 1", std::to_string(cm.cells[1][0]),
                  std::to_string(cm.cells[1][1])});
  return render_table(grid);
}

std::string render_cv_report(const std::string& label, const CvResult& result) {
  std::string out = "Stratified " + std::to_string(result.k) +
                    "-fold cross-validation (seed " +
                    std::to_string(result.seed) + ")\n\n";
  const std::pair<std::string, MetricsReport> row{label, result.metrics};
  out += render_metrics_table(std::span(&row, 1));
  out += "\nPooled confusion matrix (" + std::to_string(result.pooled.total()) +
         " rows):\n";
  out += render_confusion(result.pooled);
  return out;
}

std::string render_split_report(const std::string& label,
                                const SplitEvalResult& result) {
  char head[160];
  std::snprintf(head, sizeof(head),
                "Percentage split: %.0f %% train, %d repeat(s), seed %llu\n\n",
                result.plan.train_fraction * 100.0, result.plan.repeats,
                static_cast<unsigned long long>(result.plan.seed));
  std::string out = head;

  std::vector<std::vector<std::string>> grid;
  grid.push_back({"Repeat", "Side", "Accuracy", "Precision", "Recall", "F-Measure"});
  for (std::size_t r = 0; r < result.test_side.per_repeat.size(); ++r) {
    const MetricsReport& tr = result.train_side.per_repeat[r];
    const MetricsReport& te = result.test_side.per_repeat[r];
    grid.push_back({std::to_string(r + 1), "train", percent(tr.accuracy),
                    three(tr.weighted_precision), three(tr.weighted_recall),
                    three(tr.weighted_f)});
    grid.push_back({"", "test", percent(te.accuracy),
                    three(te.weighted_precision), three(te.weighted_recall),
                    three(te.weighted_f)});
  }
  const MetricsReport& mtr = result.train_side.mean;
  const MetricsReport& mte = result.test_side.mean;
  grid.push_back({"mean", "train", percent(mtr.accuracy),
                  three(mtr.weighted_precision), three(mtr.weighted_recall),
                  three(mtr.weighted_f)});
  grid.push_back({"", "test", percent(mte.accuracy), three(mte.weighted_precision),
                  three(mte.weighted_recall), three(mte.weighted_f)});
  out += label + "\n" + render_table(grid) + kMetricsFooter;
  return out;
}

std::string render_sweep_report(const SweepResult& result) {
  std::string out = "Attribute-fraction sweep, " + std::to_string(result.k) +
                    "-fold cross-validation (seed " +
                    std::to_string(result.seed) + ")";
  out += result.scope == SelectionScope::kPerFold
             ? ", per-fold selection\n\n"
             : "\n\n";
  const bool with_tree =
      std::any_of(result.rows.begin(), result.rows.end(),
                  [](const SweepRow& r) { return r.tree_size > 0; });
  std::vector<std::vector<std::string>> grid;
  if (with_tree) {
    grid.push_back({"Fraction", "Selected", "Accuracy", "Leaves", "Tree size"});
  } else {
    grid.push_back({"Fraction", "Selected", "Accuracy"});
  }
  for (const SweepRow& row : result.rows) {
    char fraction[32];
    std::snprintf(fraction, sizeof(fraction), "%.0f %%", row.fraction * 100.0);
    std::vector<std::string> cells{fraction, std::to_string(row.selected),
                                   percent(row.metrics.accuracy)};
    if (with_tree) {
      cells.push_back(std::to_string(row.leaves));
      cells.push_back(std::to_string(row.tree_size));
    }
    grid.push_back(std::move(cells));
  }
  return out + render_table(grid);
}

namespace {

using nlohmann::json;

json metrics_json(const MetricsReport& m) {
  return json{{"accuracy", m.accuracy},
              {"weighted_precision", m.weighted_precision},
              {"weighted_recall", m.weighted_recall},
              {"weighted_f_measure", m.weighted_f}};
}

json confusion_json(const ConfusionMatrix& cm) {
  return json{{"actual0_predicted0", cm.cells[0][0]},
              {"actual0_predicted1", cm.cells[0][1]},
              {"actual1_predicted0", cm.cells[1][0]},
              {"actual1_predicted1", cm.cells[1][1]}};
}

}  // namespace

std::string structured_cv_report(const std::string& label,
                                 const CvResult& result) {
  json j{{"protocol", "cross_validation"},
         {"classifier", label},
         {"k", result.k},
         {"seed", result.seed},
         {"metrics", metrics_json(result.metrics)},
         {"confusion", confusion_json(result.pooled)}};
  return j.dump(2) + "\n";
}

std::string structured_split_report(const std::string& label,
                                    const SplitEvalResult& result) {
  json repeats = json::array();
  for (std::size_t r = 0; r < result.test_side.per_repeat.size(); ++r) {
    repeats.push_back(json{{"repeat", r + 1},
                           {"train", metrics_json(result.train_side.per_repeat[r])},
                           {"test", metrics_json(result.test_side.per_repeat[r])}});
  }
  json j{{"protocol", "percentage_split"},
         {"classifier", label},
         {"train_fraction", result.plan.train_fraction},
         {"repeats", result.plan.repeats},
         {"seed", result.plan.seed},
         {"per_repeat", std::move(repeats)},
         {"mean",
          {{"train", metrics_json(result.train_side.mean)},
           {"test", metrics_json(result.test_side.mean)}}}};
  return j.dump(2) + "\n";
}

std::string structured_sweep_report(const SweepResult& result) {
  json rows = json::array();
  for (const SweepRow& row : result.rows) {
    json r{{"fraction", row.fraction},
           {"selected", row.selected},
           {"metrics", metrics_json(row.metrics)},
           {"confusion", confusion_json(row.pooled)}};
    if (row.tree_size > 0) {
      r["leaves"] = row.leaves;
      r["tree_size"] = row.tree_size;
    }
    rows.push_back(std::move(r));
  }
  json j{{"protocol", "fraction_sweep"},
         {"k", result.k},
         {"seed", result.seed},
         {"selection_scope",
          result.scope == SelectionScope::kPerFold ? "per_fold" : "full_table"},
         {"rows", std::move(rows)}};
  return j.dump(2) + "\n";
}

void write_sweep_series(std::ostream& out, const SweepResult& result) {
  write_csv_record(out, {"FRACTION_PCT", "ACCURACY_PCT"});
  for (const SweepRow& row : result.rows) {
    write_csv_record(out, {format_double(row.fraction * 100.0),
                           format_double(row.metrics.accuracy * 100.0)});
  }
}

}  // namespace labmine
