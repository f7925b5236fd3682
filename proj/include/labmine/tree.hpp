#ifndef LABMINE_TREE_HPP_
#define LABMINE_TREE_HPP_

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "labmine/feature_table.hpp"

namespace labmine {

struct TreeParams {
  double confidence = 0.25;  // pruning confidence factor, (0, 0.5]
  int min_leaf = 2;          // minimum training rows per side of a split
  bool prune = true;

  bool operator==(const TreeParams&) const = default;
};

// Binary split node. Leaves have no children; `weights` holds the
// per-class training weight reaching the node (class 0, class 1).
struct TreeNode {
  bool leaf = true;
  std::size_t attr_index = 0;  // internal only
  double threshold = 0.0;      // internal only; value <= threshold goes left
  int label = 0;               // leaf only
  std::array<double, 2> weights{0.0, 0.0};
  std::unique_ptr<TreeNode> left;
  std::unique_ptr<TreeNode> right;

  double total_weight() const { return weights[0] + weights[1]; }
  double misclassified_weight() const {
    return total_weight() - weights[static_cast<std::size_t>(label)];
  }
};

// Per-node attribute subset provider for ensemble training. Receives
// the attribute count, returns candidate indices (order irrelevant,
// duplicates forbidden). Null means all attributes.
using FeatureSampler = std::function<std::vector<std::size_t>(std::size_t)>;

// Grows a gain-ratio tree over the whole table, then applies
// pessimistic subtree-replacement pruning when params.prune is set.
std::unique_ptr<TreeNode> induce_c45(const FeatureTable& table,
                                     const TreeParams& params);

// Same inducer over an explicit row multiset (repeats allowed, as in
// bootstrap resamples) with an optional per-node feature sampler.
std::unique_ptr<TreeNode> induce_on_rows(const FeatureTable& table,
                                         std::span<const std::size_t> row_indices,
                                         const TreeParams& params,
                                         const FeatureSampler& sampler = nullptr);

std::size_t leaf_count(const TreeNode& node);
std::size_t tree_size(const TreeNode& node);  // all nodes, internal + leaf
std::unique_ptr<TreeNode> clone_tree(const TreeNode& node);

// Leaf distribution for one feature vector: weights of the reached
// leaf normalized to probabilities.
std::array<double, 2> tree_proba(const TreeNode& root, std::span<const double> row);

// Text readout: `| ` per depth level, `<attr> <= <thr>` / `<attr> > <thr>`
// condition lines, leaves appended as `: <class> (<total>/<miscl>)` with
// one-decimal weights and the `/<miscl>` part omitted at zero. The
// rendering is lossless; parse_tree inverts it exactly.
std::string render_tree(const TreeNode& root,
                        std::span<const std::string> attribute_names);
std::unique_ptr<TreeNode> parse_tree(const std::string& text,
                                     std::span<const std::string> attribute_names);

// Upper-confidence-bound error surplus for a leaf observing `errors`
// misclassified out of `total`, at confidence factor cf.
double pessimistic_added_errors(double total, double errors, double cf);

// Inverse standard normal CDF (Acklam's rational approximation).
double inverse_normal_cdf(double p);

}  // namespace labmine

#endif  // LABMINE_TREE_HPP_
