#ifndef LABMINE_BAYES_HPP_
#define LABMINE_BAYES_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "labmine/feature_table.hpp"

namespace labmine {

// Majority baseline: stores raw training class frequencies and emits
// them as the probability pair for every row.
struct ZeroRModel {
  std::array<std::int64_t, 2> class_counts{0, 0};

  std::array<double, 2> predict_proba() const;
  bool operator==(const ZeroRModel&) const = default;
};

ZeroRModel train_zero_r(const FeatureTable& table);

struct GaussianStats {
  double mean = 0.0;
  double variance = 0.0;  // floored, never below kVarianceFloor

  bool operator==(const GaussianStats&) const = default;
};

// Gaussian naive Bayes over numeric attributes with Laplace-smoothed
// class priors. A class absent from training keeps probability zero.
struct NaiveBayesModel {
  static constexpr double kVarianceFloor = 1e-9;

  std::array<bool, 2> class_present{false, false};
  std::array<double, 2> priors{0.0, 0.0};  // (count + 1) / (n + 2)
  std::array<std::vector<GaussianStats>, 2> per_attr;  // [class][attribute]

  std::array<double, 2> predict_proba(std::span<const double> row) const;
  bool operator==(const NaiveBayesModel&) const = default;
};

NaiveBayesModel train_naive_bayes(const FeatureTable& table);

}  // namespace labmine

#endif  // LABMINE_BAYES_HPP_
