#ifndef LABMINE_RESAMPLE_HPP_
#define LABMINE_RESAMPLE_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "labmine/feature_table.hpp"

namespace labmine {

// Round half up; the rule behind both subset sizing and split sizing.
std::size_t round_half_up(double x);

struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<int> assignments;  // row index -> fold in [0, k)

  std::vector<std::size_t> test_rows(int fold) const;
  std::vector<std::size_t> train_rows(int fold) const;
};

// Stratified fold assignment: rows are grouped by class, shuffled within
// each group, and dealt round-robin, so per-fold class counts stay
// within one of exact proportionality. Deterministic for a fixed
// (table, k, seed); small classes are simply spread as far as they go.
FoldPlan stratified_folds(const FeatureTable& table, int k, std::uint64_t seed);

struct SplitPlan {
  double train_fraction = 0.66;
  int repeats = 1;
  std::uint64_t seed = 0;
};

// Seeded disjoint partition; |train| = round(train_fraction * n). Each
// repeat_index draws an independent shuffle from the seeded stream.
std::pair<FeatureTable, FeatureTable> shuffle_split(const FeatureTable& table,
                                                    const SplitPlan& plan, int repeat_index);

}  // namespace labmine

#endif  // LABMINE_RESAMPLE_HPP_
