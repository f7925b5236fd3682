#ifndef LABMINE_TESTS_ORACLE_TREE_HPP_
#define LABMINE_TESTS_ORACLE_TREE_HPP_

// Naive reference inducer for the gain-ratio tree: same documented
// rules (boundary candidates, minimum leaf occupancy, average-gain
// guard, ratio tie toward the lower attribute index), written as a
// straightforward recursive function over row-pointer vectors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "labmine/feature_table.hpp"

namespace labmine::test::oracle {

struct SlowNode {
  bool leaf = true;
  std::size_t attr = 0;
  double threshold = 0.0;
  int label = 0;
  double n0 = 0.0;
  double n1 = 0.0;
  std::unique_ptr<SlowNode> low;
  std::unique_ptr<SlowNode> high;
};

inline double slow_entropy(double c0, double c1) {
  const double n = c0 + c1;
  double h = 0.0;
  if (c0 > 0.0) h -= (c0 / n) * std::log2(c0 / n);
  if (c1 > 0.0) h -= (c1 / n) * std::log2(c1 / n);
  return h;
}

struct SlowSplit {
  bool ok = false;
  double threshold = 0.0;
  double gain = 0.0;
  double ratio = 0.0;
};

inline SlowSplit slow_attr_split(const std::vector<const FeatureRow*>& rows,
                                 std::size_t attr, int min_leaf) {
  std::vector<std::pair<double, int>> sorted;
  for (const FeatureRow* row : rows) sorted.emplace_back(row->values[attr], row->label);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double total0 = 0.0;
  double total1 = 0.0;
  for (const auto& [v, y] : sorted) (y == 0 ? total0 : total1) += 1.0;
  const double n = total0 + total1;
  const double parent = slow_entropy(total0, total1);

  const auto value_classes = [&](double value) {
    std::pair<bool, bool> has{false, false};
    for (const auto& [v, y] : sorted) {
      if (v == value) (y == 0 ? has.first : has.second) = true;
    }
    return has;
  };

  SlowSplit best;
  double left0 = 0.0;
  double left1 = 0.0;
  for (std::size_t b = 1; b < sorted.size(); ++b) {
    (sorted[b - 1].second == 0 ? left0 : left1) += 1.0;
    if (sorted[b - 1].first == sorted[b].first) continue;
    const double nl = left0 + left1;
    const double nr = n - nl;
    if (nl < min_leaf || nr < min_leaf) continue;
    if (value_classes(sorted[b - 1].first) == value_classes(sorted[b].first))
      continue;
    const double mid = (sorted[b - 1].first + sorted[b].first) / 2.0;
    if (!(sorted[b - 1].first < mid && mid < sorted[b].first)) continue;
    const double gain = parent - (nl * slow_entropy(left0, left1) +
                                  nr * slow_entropy(total0 - left0, total1 - left1)) /
                                     n;
    if (!best.ok || gain > best.gain) {
      best.ok = true;
      best.threshold = mid;
      best.gain = gain;
      best.ratio = gain / slow_entropy(nl, nr);
    }
  }
  return best;
}

inline std::unique_ptr<SlowNode> slow_induce_rec(
    const std::vector<const FeatureRow*>& rows, std::size_t n_attrs,
    int min_leaf) {
  auto node = std::make_unique<SlowNode>();
  for (const FeatureRow* row : rows) (row->label == 0 ? node->n0 : node->n1) += 1.0;
  node->label = node->n1 > node->n0 ? 1 : 0;
  if (node->n0 == 0.0 || node->n1 == 0.0 ||
      rows.size() < 2 * static_cast<std::size_t>(min_leaf))
    return node;

  std::vector<std::pair<std::size_t, SlowSplit>> usable;
  double gain_sum = 0.0;
  for (std::size_t attr = 0; attr < n_attrs; ++attr) {
    const SlowSplit s = slow_attr_split(rows, attr, min_leaf);
    if (s.ok && s.gain > 1e-12) {
      usable.emplace_back(attr, s);
      gain_sum += s.gain;
    }
  }
  if (usable.empty()) return node;
  const double avg = gain_sum / static_cast<double>(usable.size());
  const SlowSplit* chosen = nullptr;
  std::size_t chosen_attr = 0;
  for (const auto& [attr, s] : usable) {
    if (s.gain < avg - 1e-12) continue;
    if (chosen == nullptr || s.ratio > chosen->ratio) {
      chosen = &s;
      chosen_attr = attr;
    }
  }
  if (chosen == nullptr) return node;

  std::vector<const FeatureRow*> low_rows;
  std::vector<const FeatureRow*> high_rows;
  for (const FeatureRow* row : rows) {
    (row->values[chosen_attr] <= chosen->threshold ? low_rows : high_rows)
        .push_back(row);
  }
  node->leaf = false;
  node->attr = chosen_attr;
  node->threshold = chosen->threshold;
  node->low = slow_induce_rec(low_rows, n_attrs, min_leaf);
  node->high = slow_induce_rec(high_rows, n_attrs, min_leaf);
  return node;
}

inline std::unique_ptr<SlowNode> slow_induce(const FeatureTable& table,
                                             int min_leaf) {
  std::vector<const FeatureRow*> rows;
  for (const FeatureRow& row : table.rows) rows.push_back(&row);
  return slow_induce_rec(rows, table.n_attributes(), min_leaf);
}

inline std::size_t slow_leaf_count(const SlowNode& node) {
  if (node.leaf) return 1;
  return slow_leaf_count(*node.low) + slow_leaf_count(*node.high);
}

inline int slow_predict(const SlowNode& node, const std::vector<double>& row) {
  if (node.leaf) return node.label;
  return row[node.attr] <= node.threshold ? slow_predict(*node.low, row)
                                          : slow_predict(*node.high, row);
}

}  // namespace labmine::test::oracle

#endif  // LABMINE_TESTS_ORACLE_TREE_HPP_
