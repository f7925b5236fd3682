#include "labmine/forest.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "labmine/parallel.hpp"
#include "labmine/rng.hpp"

namespace labmine {

std::size_t forest_subset_size(const ForestParams& params, std::size_t m) {
  if (m == 0) return 0;
  std::size_t s;
  if (params.feature_subset <= 0) {
    s = static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(m)))) + 1;
  } else {
    s = static_cast<std::size_t>(params.feature_subset);
  }
  return std::min(s, m);
}

ForestModel train_forest(const FeatureTable& table, const ForestParams& params,
                         std::uint64_t seed, int jobs) {
  if (params.n_trees < 1)
    throw std::invalid_argument("forest: tree count must be at least 1");
  if (params.feature_subset < 0)
    throw std::invalid_argument("forest: feature subset must be non-negative");
  if (params.min_leaf < 1)
    throw std::invalid_argument("forest: min_leaf must be at least 1");
  if (table.n_rows() == 0) throw std::invalid_argument("forest: empty table");

  const std::size_t n = table.n_rows();
  const std::size_t m = table.n_attributes();
  const std::size_t subset = forest_subset_size(params, m);

  ForestModel model;
  model.params = params;
  model.seed = seed;
  model.trees.resize(static_cast<std::size_t>(params.n_trees));

  TreeParams tree_params;
  tree_params.min_leaf = params.min_leaf;
  tree_params.prune = false;

  parallel_for(model.trees.size(), jobs, [&](std::size_t t) {
    Rng rng = Rng::stream(seed, t);

    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      for (std::size_t i = 0; i < n; ++i)
        rows[i] = static_cast<std::size_t>(rng.below(n));
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }

    FeatureSampler sampler;
    if (subset < m) {
      sampler = [&rng, subset](std::size_t n_attrs) {
        return rng.sample_without_replacement(n_attrs, subset);
      };
    }
    model.trees[t] = induce_on_rows(table, rows, tree_params, sampler);
  });
  return model;
}

std::array<double, 2> ForestModel::predict_proba(
    std::span<const double> row) const {
  if (trees.empty()) throw std::invalid_argument("forest: model has no trees");
  std::array<double, 2> sum{0.0, 0.0};
  for (const auto& tree : trees) {
    const std::array<double, 2> p = tree_proba(*tree, row);
    sum[0] += p[0];
    sum[1] += p[1];
  }
  const double b = static_cast<double>(trees.size());
  return {sum[0] / b, sum[1] / b};
}

}  // namespace labmine
