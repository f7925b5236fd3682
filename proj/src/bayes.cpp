#include "labmine/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace labmine {

std::array<double, 2> ZeroRModel::predict_proba() const {
  const double n = static_cast<double>(class_counts[0] + class_counts[1]);
  if (n <= 0.0) return {0.5, 0.5};
  return {static_cast<double>(class_counts[0]) / n,
          static_cast<double>(class_counts[1]) / n};
}

ZeroRModel train_zero_r(const FeatureTable& table) {
  if (table.n_rows() == 0)
    throw std::invalid_argument("train_zero_r: empty table");
  ZeroRModel model;
  const auto counts = table.class_counts();
  model.class_counts = {counts[0], counts[1]};
  return model;
}

NaiveBayesModel train_naive_bayes(const FeatureTable& table) {
  if (table.n_rows() < 2)
    throw std::invalid_argument("train_naive_bayes: need at least 2 rows");
  const std::size_t m = table.n_attributes();
  const auto counts = table.class_counts();
  const double n = static_cast<double>(table.n_rows());

  NaiveBayesModel model;
  for (std::size_t c = 0; c < 2; ++c) {
    model.class_present[c] = counts[c] > 0;
    model.priors[c] = (static_cast<double>(counts[c]) + 1.0) / (n + 2.0);
    model.per_attr[c].assign(m, GaussianStats{});
  }

  // Mean pass then variance pass; maximum-likelihood variance with a
  // floor so constant columns stay usable.
  for (const FeatureRow& row : table.rows) {
    auto& stats = model.per_attr[static_cast<std::size_t>(row.label)];
    for (std::size_t j = 0; j < m; ++j) stats[j].mean += row.values[j];
  }
  for (std::size_t c = 0; c < 2; ++c) {
    if (counts[c] == 0) continue;
    for (std::size_t j = 0; j < m; ++j)
      model.per_attr[c][j].mean /= static_cast<double>(counts[c]);
  }
  for (const FeatureRow& row : table.rows) {
    auto& stats = model.per_attr[static_cast<std::size_t>(row.label)];
    for (std::size_t j = 0; j < m; ++j) {
      const double d = row.values[j] - stats[j].mean;
      stats[j].variance += d * d;
    }
  }
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t j = 0; j < m; ++j) {
      auto& s = model.per_attr[c][j];
      if (counts[c] > 0) s.variance /= static_cast<double>(counts[c]);
      s.variance = std::max(s.variance, NaiveBayesModel::kVarianceFloor);
    }
  }
  return model;
}

std::array<double, 2> NaiveBayesModel::predict_proba(
    std::span<const double> row) const {
  if (!class_present[0] && !class_present[1])
    throw std::invalid_argument("naive Bayes model has no trained class");
  if (row.size() != per_attr[0].size())
    throw std::invalid_argument("naive Bayes: row length mismatch");
  if (class_present[0] != class_present[1]) {
    // Single-class training data: the absent class stays at zero.
    return class_present[0] ? std::array<double, 2>{1.0, 0.0}
                            : std::array<double, 2>{0.0, 1.0};
  }

  std::array<double, 2> log_post{};
  for (std::size_t c = 0; c < 2; ++c) {
    double lp = std::log(priors[c]);
    for (std::size_t j = 0; j < row.size(); ++j) {
      const GaussianStats& s = per_attr[c][j];
      const double d = row[j] - s.mean;
      lp += -0.5 * std::log(2.0 * M_PI * s.variance) - d * d / (2.0 * s.variance);
    }
    log_post[c] = lp;
  }
  const double peak = std::max(log_post[0], log_post[1]);
  const double e0 = std::exp(log_post[0] - peak);
  const double e1 = std::exp(log_post[1] - peak);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

}  // namespace labmine
