#include "labmine/resample.hpp"

#include <cmath>
#include <stdexcept>

#include "labmine/rng.hpp"

namespace labmine {

std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

std::vector<std::size_t> FoldPlan::test_rows(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> FoldPlan::train_rows(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) rows.push_back(i);
  }
  return rows;
}

FoldPlan stratified_folds(const FeatureTable& table, int k, std::uint64_t seed) {
  const std::size_t n = table.n_rows();
  if (k < 2) throw std::invalid_argument("stratified_folds: k must be at least 2");
  if (static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("stratified_folds: k exceeds row count");
  }
  // Class-grouped sequence, shuffled within each group, then dealt by
  // position: fold = position mod k. Consecutive positions land in
  // consecutive folds, so both classes and totals stay balanced.
  std::vector<std::size_t> grouped;
  grouped.reserve(n);
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (table.rows[i].label == cls) members.push_back(i);
    }
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(cls));
    rng.shuffle(members);
    grouped.insert(grouped.end(), members.begin(), members.end());
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(n, 0);
  for (std::size_t pos = 0; pos < grouped.size(); ++pos) {
    plan.assignments[grouped[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  }
  return plan;
}

std::pair<FeatureTable, FeatureTable> shuffle_split(const FeatureTable& table,
                                                    const SplitPlan& plan, int repeat_index) {
  if (plan.repeats < 1) throw std::invalid_argument("shuffle_split: repeats must be >= 1");
  if (repeat_index < 0 || repeat_index >= plan.repeats) {
    throw std::invalid_argument("shuffle_split: repeat_index out of range");
  }
  if (!(plan.train_fraction > 0.0 && plan.train_fraction < 1.0)) {
    throw std::invalid_argument("shuffle_split: train_fraction must lie in (0,1)");
  }
  const std::size_t n = table.n_rows();
  const std::size_t n_train = round_half_up(plan.train_fraction * static_cast<double>(n));
  if (n_train == 0 || n_train >= n) {
    throw std::invalid_argument("shuffle_split: split leaves an empty side");
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  Rng rng = Rng::stream(plan.seed, static_cast<std::uint64_t>(repeat_index));
  rng.shuffle(perm);
  const std::span<const std::size_t> all(perm);
  return {select_rows(table, all.subspan(0, n_train)), select_rows(table, all.subspan(n_train))};
}

}  // namespace labmine
