#include <doctest.h>

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "labmine/errors.hpp"
#include "labmine/rng.hpp"
#include "labmine/tree.hpp"

#include "helpers.hpp"
#include "oracle_tree.hpp"

using namespace labmine;
using labmine::test::make_table;
using labmine::test::one_column;
using labmine::test::random_table;
namespace oracle = labmine::test::oracle;

namespace {

TreeParams unpruned_params(int min_leaf) {
  TreeParams params;
  params.prune = false;
  params.min_leaf = min_leaf;
  return params;
}

}  // namespace

TEST_SUITE("tree") {

TEST_CASE("pure table collapses to a clean leaf") {
  const FeatureTable table = one_column({1, 2, 3}, {1, 1, 1});
  const auto root = induce_c45(table, TreeParams{});
  REQUIRE(root->leaf);
  CHECK(root->label == 1);
  CHECK(root->total_weight() == 3.0);
  CHECK(root->misclassified_weight() == 0.0);
}

TEST_CASE("separable four rows split once at the boundary midpoint") {
  const FeatureTable table = one_column({1, 2, 3, 4}, {0, 0, 1, 1});
  const auto root = induce_c45(table, TreeParams{});
  REQUIRE_FALSE(root->leaf);
  CHECK(root->attr_index == 0);
  CHECK(root->threshold == doctest::Approx(2.5));
  REQUIRE(root->left->leaf);
  REQUIRE(root->right->leaf);
  CHECK(root->left->label == 0);
  CHECK(root->right->label == 1);
  CHECK(root->left->misclassified_weight() == 0.0);
  CHECK(root->right->misclassified_weight() == 0.0);
  CHECK(leaf_count(*root) == 2);
  CHECK(tree_size(*root) == 3);
}

TEST_CASE("two-attribute table picks the separating attribute") {
  // Attribute two carries the class; attribute one is constant.
  const FeatureTable table = make_table(
      {"50001", "50002"},
      {{4.0, 1.0}, {4.0, 2.0}, {4.0, 3.0}, {4.0, 4.0}}, {0, 0, 1, 1});
  const auto root = induce_c45(table, TreeParams{});
  REQUIRE_FALSE(root->leaf);
  CHECK(root->attr_index == 1);
  CHECK(root->threshold == doctest::Approx(2.5));
}

TEST_CASE("unpruned induction agrees with the naive reference inducer") {
  Rng rng(321);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n_rows = 30 + rng.below(171);
    const std::size_t n_attrs = 2 + rng.below(5);
    FeatureTable table = random_table(rng, n_rows, n_attrs);
    // Give two columns a weak class signal so real trees grow.
    for (FeatureRow& row : table.rows) {
      if (row.label == 1) {
        row.values[0] += 2.0;
        row.values[n_attrs - 1] += 1.0;
      }
    }
    std::vector<std::size_t> all_rows(table.n_rows());
    std::iota(all_rows.begin(), all_rows.end(), 0);
    for (const int min_leaf : {1, 2, 5}) {
      const auto fast = induce_on_rows(
          table, all_rows, unpruned_params(min_leaf), nullptr);
      const auto slow = oracle::slow_induce(table, min_leaf);
      CHECK(leaf_count(*fast) == oracle::slow_leaf_count(*slow));
      for (const FeatureRow& row : table.rows) {
        const auto proba = tree_proba(*fast, row.values);
        const int fast_label = proba[1] > proba[0] ? 1 : 0;
        CHECK(fast_label == oracle::slow_predict(*slow, row.values));
      }
    }
  }
}

TEST_CASE("pruning never increases the leaf count") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n_rows = 20 + rng.below(120);
    const FeatureTable table = random_table(rng, n_rows, 1 + rng.below(6));
    TreeParams pruned;
    const auto with_pruning = induce_c45(table, pruned);
    const auto without = induce_c45(table, unpruned_params(pruned.min_leaf));
    CHECK(leaf_count(*with_pruning) <= leaf_count(*without));
  }
}

TEST_CASE("leaf confidence for weights 772 and 22 reads about 97.15 percent") {
  TreeNode leaf;
  leaf.leaf = true;
  leaf.label = 1;
  leaf.weights = {22.0, 750.0};
  const auto proba = tree_proba(leaf, std::vector<double>{0.0});
  CHECK(proba[1] == doctest::Approx(750.0 / 772.0).epsilon(1e-12));
  CHECK(std::abs(proba[1] - 0.9715) < 0.001);
  CHECK(leaf.total_weight() == doctest::Approx(772.0));
  CHECK(leaf.misclassified_weight() == doctest::Approx(22.0));
}

TEST_CASE("added-error estimate follows the confidence bound conventions") {
  // Zero observed errors: N * (1 - cf^(1/N)).
  CHECK(pessimistic_added_errors(10.0, 0.0, 0.25) ==
        doctest::Approx(10.0 * (1.0 - std::pow(0.25, 0.1))));
  // Interpolation below one error stays between the anchors.
  const double at0 = pessimistic_added_errors(10.0, 0.0, 0.25);
  const double at1 = pessimistic_added_errors(10.0, 1.0, 0.25);
  const double half = pessimistic_added_errors(10.0, 0.5, 0.25);
  CHECK(half == doctest::Approx(at0 + 0.5 * (at1 - at0)));
  // Saturated leaves cannot add beyond the remaining weight.
  CHECK(pessimistic_added_errors(6.0, 6.0, 0.25) == 0.0);
  // Monotone in the error count.
  double prev = pessimistic_added_errors(100.0, 1.0, 0.25);
  for (double e = 2.0; e < 60.0; e += 1.0) {
    const double cur = pessimistic_added_errors(100.0, e, 0.25);
    CHECK(cur + e > prev + (e - 1.0));
    prev = cur;
  }
}

TEST_CASE("normal quantile matches the classic table values") {
  CHECK(inverse_normal_cdf(0.75) == doctest::Approx(0.6744897501960817).epsilon(1e-12));
  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0));
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK(inverse_normal_cdf(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-10));
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::invalid_argument);
}

TEST_CASE("single leaf renders as a bare class line") {
  TreeNode leaf;
  leaf.leaf = true;
  leaf.label = 1;
  leaf.weights = {22.0, 750.0};
  const std::vector<std::string> names{"50440"};
  CHECK(render_tree(leaf, names) == ": 1 (772.0/22.0)\n");

  TreeNode clean;
  clean.leaf = true;
  clean.label = 0;
  clean.weights = {39.0, 0.0};
  CHECK(render_tree(clean, names) == ": 0 (39.0)\n");
}

TEST_CASE("depth-one tree renders two unprefixed condition lines") {
  const FeatureTable table = one_column({1, 2, 3, 4}, {0, 0, 1, 1});
  const auto root = induce_c45(table, TreeParams{});
  const std::string text = render_tree(*root, table.attribute_names);
  CHECK(text ==
        "50001 <= 2.5: 0 (2.0)\n"
        "50001 > 2.5: 1 (2.0)\n");
}

TEST_CASE("nested branches gain one bar per level") {
  const FeatureTable table = make_table(
      {"50001", "50002"},
      {{1.0, 1.0}, {1.0, 2.0}, {1.0, 7.0}, {1.0, 8.0},
       {9.0, 1.0}, {9.0, 2.0}, {9.0, 3.0}, {9.0, 4.0}},
      {0, 0, 1, 1, 1, 1, 1, 1});
  const auto root = induce_c45(table, unpruned_params(2));
  REQUIRE_FALSE(root->leaf);
  const std::string text = render_tree(*root, table.attribute_names);
  CHECK(text.find("| ") != std::string::npos);
  const auto parsed = parse_tree(text, table.attribute_names);
  CHECK(render_tree(*parsed, table.attribute_names) == text);
}

TEST_CASE("render then parse reproduces random trees exactly") {
  Rng rng(2718);
  for (int trial = 0; trial < 20; ++trial) {
    FeatureTable table = random_table(rng, 25 + rng.below(80), 2 + rng.below(4));
    for (FeatureRow& row : table.rows) {
      if (row.label == 1) row.values[0] += 1.5;
    }
    const auto root = induce_c45(table, unpruned_params(1));
    const std::string text = render_tree(*root, table.attribute_names);
    const auto back = parse_tree(text, table.attribute_names);
    CHECK(render_tree(*back, table.attribute_names) == text);
    CHECK(leaf_count(*back) == leaf_count(*root));
    CHECK(tree_size(*back) == tree_size(*root));
    for (const FeatureRow& row : table.rows) {
      const auto a = tree_proba(*root, row.values);
      const auto b = tree_proba(*back, row.values);
      CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-12));
      CHECK(a[1] == doctest::Approx(b[1]).epsilon(1e-12));
    }
  }
}

TEST_CASE("thresholds render with full round-trip precision") {
  TreeNode root;
  root.leaf = false;
  root.attr_index = 0;
  root.threshold = 20.757143;
  root.left = std::make_unique<TreeNode>();
  root.left->label = 1;
  root.left->weights = {22.0, 750.0};
  root.right = std::make_unique<TreeNode>();
  root.right->label = 0;
  root.right->weights = {5.0, 0.0};
  root.weights = {27.0, 750.0};
  const std::vector<std::string> names{"50440"};
  const std::string text = render_tree(root, names);
  CHECK(text ==
        "50440 <= 20.757143: 1 (772.0/22.0)\n"
        "50440 > 20.757143: 0 (5.0)\n");
  const auto back = parse_tree(text, names);
  CHECK(back->threshold == 20.757143);
  CHECK(back->left->weights[1] == 750.0);
  CHECK(back->left->weights[0] == 22.0);
}

TEST_CASE("malformed readouts are rejected with their line number") {
  const std::vector<std::string> names{"50001"};
  CHECK_THROWS_AS(parse_tree("50001 <= 1.0: 2 (4.0)\n"
                             "50001 > 1.0: 0 (4.0)\n", names),
                  DataError);
  CHECK_THROWS_AS(parse_tree("50002 <= 1.0: 0 (4.0)\n"
                             "50002 > 1.0: 0 (4.0)\n", names),
                  DataError);
  CHECK_THROWS_AS(parse_tree("50001 <= 1.0: 0 (4.0)\n", names), DataError);
}

TEST_CASE("hyperparameters are validated before any work") {
  const FeatureTable table = one_column({1, 2}, {0, 1});
  TreeParams bad;
  bad.confidence = 0.0;
  CHECK_THROWS_AS(induce_c45(table, bad), std::invalid_argument);
  bad = TreeParams{};
  bad.min_leaf = 0;
  CHECK_THROWS_AS(induce_c45(table, bad), std::invalid_argument);
}

TEST_CASE("feature sampler contract is enforced") {
  const FeatureTable table = make_table(
      {"50001", "50002"}, {{1.0, 5.0}, {2.0, 6.0}, {3.0, 1.0}, {4.0, 2.0}},
      {0, 0, 1, 1});
  const std::vector<std::size_t> all_rows{0, 1, 2, 3};
  CHECK_THROWS_AS(
      induce_on_rows(table, all_rows, unpruned_params(1),
                     [](std::size_t) { return std::vector<std::size_t>{}; }),
      std::invalid_argument);
  CHECK_THROWS_AS(
      induce_on_rows(table, all_rows, unpruned_params(1),
                     [](std::size_t) { return std::vector<std::size_t>{0, 0}; }),
      std::invalid_argument);
  CHECK_THROWS_AS(
      induce_on_rows(table, all_rows, unpruned_params(1),
                     [](std::size_t) { return std::vector<std::size_t>{7}; }),
      std::invalid_argument);
  // Restricting splits to the second attribute forces it to be used.
  const auto root = induce_on_rows(
      table, all_rows, unpruned_params(1),
      [](std::size_t) { return std::vector<std::size_t>{1}; });
  REQUIRE_FALSE(root->leaf);
  CHECK(root->attr_index == 1);
}

}  // TEST_SUITE
