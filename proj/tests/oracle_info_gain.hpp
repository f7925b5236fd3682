#ifndef LABMINE_TESTS_ORACLE_INFO_GAIN_HPP_
#define LABMINE_TESTS_ORACLE_INFO_GAIN_HPP_

// Brute-force recomputation of the entropy / discretization / ranking
// stack. Deliberately structured differently from the library code
// (index ranges over sorted pairs, natural-log arithmetic, linear bin
// scans) so agreement vouches for the math, not the code path.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "labmine/feature_table.hpp"
#include "labmine/rank.hpp"

namespace labmine::test::oracle {

inline double plain_entropy(double c0, double c1) {
  const double n = c0 + c1;
  double h = 0.0;
  if (c0 > 0.0) h -= (c0 / n) * std::log(c0 / n);
  if (c1 > 0.0) h -= (c1 / n) * std::log(c1 / n);
  return h / std::log(2.0);
}

struct ValueLabel {
  double value = 0.0;
  int label = 0;
};

// Classes present among pairs[lo, hi) sharing pairs[at].value.
inline std::pair<bool, bool> classes_of_value(const std::vector<ValueLabel>& pairs,
                                              std::size_t lo, std::size_t hi,
                                              double value) {
  bool has0 = false;
  bool has1 = false;
  for (std::size_t i = lo; i < hi; ++i) {
    if (pairs[i].value != value) continue;
    (pairs[i].label == 0 ? has0 : has1) = true;
  }
  return {has0, has1};
}

// Recursive entropy-minimizing split of pairs[lo, hi), accepting the
// best boundary only when it clears the description-length bound.
inline void slow_split(const std::vector<ValueLabel>& pairs, std::size_t lo,
                       std::size_t hi, std::vector<double>& cuts) {
  const std::size_t n = hi - lo;
  if (n < 2) return;
  double total0 = 0.0;
  double total1 = 0.0;
  for (std::size_t i = lo; i < hi; ++i) (pairs[i].label == 0 ? total0 : total1) += 1.0;
  const double parent = plain_entropy(total0, total1);
  if (parent == 0.0) return;

  bool found = false;
  double best_gain = 0.0;
  std::size_t best_pos = 0;
  double best_cut = 0.0;
  for (std::size_t b = lo + 1; b < hi; ++b) {
    if (pairs[b - 1].value == pairs[b].value) continue;
    const auto left_set = classes_of_value(pairs, lo, hi, pairs[b - 1].value);
    const auto right_set = classes_of_value(pairs, lo, hi, pairs[b].value);
    if (left_set == right_set) continue;
    const double mid = (pairs[b - 1].value + pairs[b].value) / 2.0;
    if (!(pairs[b - 1].value < mid && mid < pairs[b].value)) continue;
    double l0 = 0.0;
    double l1 = 0.0;
    for (std::size_t i = lo; i < b; ++i) (pairs[i].label == 0 ? l0 : l1) += 1.0;
    const double r0 = total0 - l0;
    const double r1 = total1 - l1;
    const double gain = parent - ((l0 + l1) * plain_entropy(l0, l1) +
                                  (r0 + r1) * plain_entropy(r0, r1)) /
                                     static_cast<double>(n);
    if (!found || gain > best_gain) {
      found = true;
      best_gain = gain;
      best_pos = b;
      best_cut = mid;
    }
  }
  if (!found || best_gain <= 0.0) return;

  double l0 = 0.0;
  double l1 = 0.0;
  for (std::size_t i = lo; i < best_pos; ++i) (pairs[i].label == 0 ? l0 : l1) += 1.0;
  const double r0 = total0 - l0;
  const double r1 = total1 - l1;
  const auto count_classes = [](double a, double b2) {
    return (a > 0.0 ? 1 : 0) + (b2 > 0.0 ? 1 : 0);
  };
  const int k = count_classes(total0, total1);
  const int k1 = count_classes(l0, l1);
  const int k2 = count_classes(r0, r1);
  const double delta = std::log2(std::pow(3.0, k) - 2.0) -
                       (k * parent - k1 * plain_entropy(l0, l1) -
                        k2 * plain_entropy(r0, r1));
  const double bound =
      (std::log2(static_cast<double>(n) - 1.0) + delta) / static_cast<double>(n);
  if (!(best_gain > bound)) return;

  cuts.push_back(best_cut);
  slow_split(pairs, lo, best_pos, cuts);
  slow_split(pairs, best_pos, hi, cuts);
}

inline std::vector<double> slow_cuts(const std::vector<double>& values,
                                     const std::vector<int>& labels) {
  std::vector<ValueLabel> pairs;
  for (std::size_t i = 0; i < values.size(); ++i)
    pairs.push_back({values[i], labels[i]});
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const ValueLabel& a, const ValueLabel& b) {
                     return a.value < b.value;
                   });
  std::vector<double> cuts;
  slow_split(pairs, 0, pairs.size(), cuts);
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

// Gain of one attribute under given cuts; bins counted by direct scans.
inline double slow_gain(const FeatureTable& table, std::size_t attr,
                        const std::vector<double>& cuts) {
  const std::size_t n_bins = cuts.size() + 1;
  std::vector<double> bin0(n_bins, 0.0);
  std::vector<double> bin1(n_bins, 0.0);
  double total0 = 0.0;
  double total1 = 0.0;
  for (const FeatureRow& row : table.rows) {
    const double v = row.values[attr];
    std::size_t bin = 0;
    for (double c : cuts) {
      if (v > c) ++bin;
    }
    (row.label == 0 ? bin0[bin] : bin1[bin]) += 1.0;
    (row.label == 0 ? total0 : total1) += 1.0;
  }
  const double n = total0 + total1;
  double conditional = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    const double size = bin0[b] + bin1[b];
    if (size == 0.0) continue;
    conditional += (size / n) * plain_entropy(bin0[b], bin1[b]);
  }
  return plain_entropy(total0, total1) - conditional;
}

inline bool slow_name_less(const std::string& a, const std::string& b) {
  const auto as_number = [](const std::string& s) -> std::pair<bool, long long> {
    if (s.empty()) return {false, 0};
    for (char ch : s) {
      if (ch < '0' || ch > '9') return {false, 0};
    }
    if (s.size() > 18) return {false, 0};
    return {true, std::stoll(s)};
  };
  const auto [a_num, a_val] = as_number(a);
  const auto [b_num, b_val] = as_number(b);
  if (a_num && b_num && a_val != b_val) return a_val < b_val;
  if (a_num && b_num) return a < b;
  return a < b;
}

inline std::vector<RankedAttribute> slow_rank(const FeatureTable& table) {
  std::vector<RankedAttribute> out;
  for (std::size_t a = 0; a < table.n_attributes(); ++a) {
    std::vector<double> column;
    std::vector<int> labels;
    for (const FeatureRow& row : table.rows) {
      column.push_back(row.values[a]);
      labels.push_back(row.label);
    }
    out.push_back({table.attribute_names[a],
                   slow_gain(table, a, slow_cuts(column, labels))});
  }
  std::sort(out.begin(), out.end(),
            [](const RankedAttribute& x, const RankedAttribute& y) {
              if (x.gain_bits != y.gain_bits) return x.gain_bits > y.gain_bits;
              return slow_name_less(x.name, y.name);
            });
  return out;
}

}  // namespace labmine::test::oracle

#endif  // LABMINE_TESTS_ORACLE_INFO_GAIN_HPP_
