#include "labmine/discretize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace labmine {

double entropy(std::span<const std::int64_t> class_counts) {
  std::int64_t total = 0;
  for (std::int64_t c : class_counts) {
    if (c < 0) throw std::invalid_argument("entropy: negative class count");
    total += c;
  }
  if (total == 0) throw std::invalid_argument("entropy: empty class distribution");
  double h = 0.0;
  for (std::int64_t c : class_counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

std::size_t bin_index(std::span<const double> cuts, double value) {
  // First cut >= value wins; value equal to a cut stays low.
  return static_cast<std::size_t>(
      std::lower_bound(cuts.begin(), cuts.end(), value) - cuts.begin());
}

namespace {

struct Run {
  double value = 0.0;
  // Class-presence mask and per-class counts for one distinct value.
  std::array<std::int64_t, 2> counts{0, 0};
  bool has(int cls) const { return counts[static_cast<std::size_t>(cls)] > 0; }
};

double entropy2(std::int64_t c0, std::int64_t c1) {
  const std::array<std::int64_t, 2> counts{c0, c1};
  return entropy(counts);
}

int distinct_classes(std::int64_t c0, std::int64_t c1) {
  return (c0 > 0 ? 1 : 0) + (c1 > 0 ? 1 : 0);
}

// Recursive split of runs[lo, hi). Appends accepted cut points to out.
void split_range(const std::vector<Run>& runs, std::size_t lo, std::size_t hi,
                 std::vector<double>& out) {
  if (hi - lo < 2) return;

  std::int64_t total0 = 0;
  std::int64_t total1 = 0;
  for (std::size_t r = lo; r < hi; ++r) {
    total0 += runs[r].counts[0];
    total1 += runs[r].counts[1];
  }
  const std::int64_t n = total0 + total1;
  const double parent_entropy = entropy2(total0, total1);
  if (parent_entropy == 0.0) return;

  double best_gain = -1.0;
  std::size_t best_boundary = 0;  // cut between runs[best-1] and runs[best]
  double best_left_entropy = 0.0;
  double best_right_entropy = 0.0;
  std::int64_t best_left0 = 0;
  std::int64_t best_left1 = 0;

  std::int64_t left0 = 0;
  std::int64_t left1 = 0;
  for (std::size_t b = lo + 1; b < hi; ++b) {
    left0 += runs[b - 1].counts[0];
    left1 += runs[b - 1].counts[1];
    const bool sets_differ = runs[b - 1].has(0) != runs[b].has(0) ||
                             runs[b - 1].has(1) != runs[b].has(1);
    if (!sets_differ) continue;
    const double mid = (runs[b - 1].value + runs[b].value) / 2.0;
    if (!(runs[b - 1].value < mid && mid < runs[b].value)) continue;  // FP underflow guard
    const std::int64_t right0 = total0 - left0;
    const std::int64_t right1 = total1 - left1;
    const double h_left = entropy2(left0, left1);
    const double h_right = entropy2(right0, right1);
    const double nl = static_cast<double>(left0 + left1);
    const double nr = static_cast<double>(right0 + right1);
    const double gain =
        parent_entropy - (nl * h_left + nr * h_right) / static_cast<double>(n);
    if (gain > best_gain) {
      best_gain = gain;
      best_boundary = b;
      best_left_entropy = h_left;
      best_right_entropy = h_right;
      best_left0 = left0;
      best_left1 = left1;
    }
  }
  if (best_boundary == 0 || best_gain <= 0.0) return;

  // Description-length acceptance bound for the best split.
  const int k = distinct_classes(total0, total1);
  const int k1 = distinct_classes(best_left0, best_left1);
  const int k2 = distinct_classes(total0 - best_left0, total1 - best_left1);
  const double delta =
      std::log2(std::pow(3.0, k) - 2.0) -
      (k * parent_entropy - k1 * best_left_entropy - k2 * best_right_entropy);
  const double bound =
      (std::log2(static_cast<double>(n) - 1.0) + delta) / static_cast<double>(n);
  if (!(best_gain > bound)) return;

  out.push_back((runs[best_boundary - 1].value + runs[best_boundary].value) / 2.0);
  split_range(runs, lo, best_boundary, out);
  split_range(runs, best_boundary, hi, out);
}

}  // namespace

std::vector<double> mdl_discretize(std::span<const double> values,
                                   std::span<const int> labels) {
  if (values.size() != labels.size())
    throw std::invalid_argument("mdl_discretize: values/labels size mismatch");
  if (values.empty()) throw std::invalid_argument("mdl_discretize: empty input");
  for (int y : labels) {
    if (y != 0 && y != 1)
      throw std::invalid_argument("mdl_discretize: labels must be 0 or 1");
  }

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });

  // Collapse equal values into runs so candidates land between distinct values.
  std::vector<Run> runs;
  for (std::size_t idx : order) {
    if (runs.empty() || runs.back().value != values[idx]) {
      Run r;
      r.value = values[idx];
      runs.push_back(r);
    }
    ++runs.back().counts[static_cast<std::size_t>(labels[idx])];
  }

  std::vector<double> cuts;
  split_range(runs, 0, runs.size(), cuts);
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

}  // namespace labmine
