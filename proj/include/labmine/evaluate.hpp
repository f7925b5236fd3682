#ifndef LABMINE_EVALUATE_HPP_
#define LABMINE_EVALUATE_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "labmine/feature_table.hpp"
#include "labmine/model.hpp"
#include "labmine/rank.hpp"
#include "labmine/resample.hpp"

namespace labmine {

struct ConfusionMatrix {
  // cells[actual][predicted]
  std::array<std::array<std::int64_t, 2>, 2> cells{{{0, 0}, {0, 0}}};

  std::int64_t total() const;
  double accuracy() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const int> predictions,
                          std::span<const int> truths);

struct MetricsReport {
  double accuracy = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f = 0.0;

  bool operator==(const MetricsReport&) const = default;
};

// Support-weighted per-class precision/recall/F1. A class never
// predicted contributes precision 0 rather than being dropped.
MetricsReport weighted_metrics(const ConfusionMatrix& cm);

struct CvResult {
  int k = 0;
  std::uint64_t seed = 0;
  ConfusionMatrix pooled;
  MetricsReport metrics;
};

// Stratified k-fold cross-validation; per-fold predictions pool into
// one matrix before metrics are computed.
CvResult cross_validate(const ModelSpec& spec, const FeatureTable& table, int k,
                        std::uint64_t seed, int jobs = 1);

struct SplitSideStats {
  std::vector<MetricsReport> per_repeat;
  MetricsReport mean;
};

struct SplitEvalResult {
  SplitPlan plan;
  SplitSideStats train_side;  // resubstitution on the training partition
  SplitSideStats test_side;   // held-out partition
};

// Repeated percentage split: each repeat trains on its shuffled train
// side and is scored on both sides, surfacing optimism alongside the
// held-out estimate.
SplitEvalResult split_eval(const ModelSpec& spec, const FeatureTable& table,
                           const SplitPlan& plan, int jobs = 1);

// Whether attribute selection sees the whole table once (matching the
// reference protocol) or is redone inside each training fold.
enum class SelectionScope { kFullTable, kPerFold };

struct SweepRow {
  double fraction = 0.0;
  std::size_t selected = 0;
  MetricsReport metrics;
  ConfusionMatrix pooled;
  // Populated for tree specs only: one tree trained on the full
  // projected table.
  std::size_t leaves = 0;
  std::size_t tree_size = 0;
};

struct SweepResult {
  int k = 0;
  std::uint64_t seed = 0;
  SelectionScope scope = SelectionScope::kFullTable;
  std::vector<SweepRow> rows;
};

std::vector<double> default_sweep_fractions();  // 0.1, 0.2, ... 1.0

// For each fraction, keeps the top-ranked attribute subset (columns
// stay in original table order, so fraction 1.0 reproduces a plain
// cross_validate exactly) and cross-validates the projection.
SweepResult sweep(const ModelSpec& spec, const FeatureTable& table,
                  std::span<const RankedAttribute> ranked,
                  std::span<const double> fractions, int k, std::uint64_t seed,
                  SelectionScope scope = SelectionScope::kFullTable, int jobs = 1);

// Aligned-text report renderers.
std::string render_metrics_table(
    std::span<const std::pair<std::string, MetricsReport>> rows);
std::string render_confusion(const ConfusionMatrix& cm);
std::string render_cv_report(const std::string& label, const CvResult& result);
std::string render_split_report(const std::string& label,
                                const SplitEvalResult& result);
std::string render_sweep_report(const SweepResult& result);

// Machine-readable JSON documents for the same reports.
std::string structured_cv_report(const std::string& label, const CvResult& result);
std::string structured_split_report(const std::string& label,
                                    const SplitEvalResult& result);
std::string structured_sweep_report(const SweepResult& result);

// Two-column percent series (fraction vs accuracy) for plotting.
void write_sweep_series(std::ostream& out, const SweepResult& result);

}  // namespace labmine

#endif  // LABMINE_EVALUATE_HPP_
