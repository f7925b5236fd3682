#ifndef LABMINE_FOREST_HPP_
#define LABMINE_FOREST_HPP_

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "labmine/feature_table.hpp"
#include "labmine/tree.hpp"

namespace labmine {

struct ForestParams {
  int n_trees = 10;
  int feature_subset = 0;  // per-node candidate count; 0 = floor(log2 M) + 1
  bool bootstrap = true;
  int min_leaf = 1;  // members grow unpruned

  bool operator==(const ForestParams&) const = default;
};

// Effective per-node candidate count for a table with m attributes.
std::size_t forest_subset_size(const ForestParams& params, std::size_t m);

// Bagged ensemble of unpruned gain-ratio trees with per-node feature
// subsampling. Probability is the mean of member leaf distributions.
struct ForestModel {
  ForestParams params;
  std::uint64_t seed = 0;
  std::vector<std::shared_ptr<const TreeNode>> trees;

  std::array<double, 2> predict_proba(std::span<const double> row) const;
};

// Member t draws its bootstrap sample and node subsets from an RNG
// stream keyed by (seed, t), so results are independent of training
// order and worker count.
ForestModel train_forest(const FeatureTable& table, const ForestParams& params,
                         std::uint64_t seed, int jobs = 1);

}  // namespace labmine

#endif  // LABMINE_FOREST_HPP_
