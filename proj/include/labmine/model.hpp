#ifndef LABMINE_MODEL_HPP_
#define LABMINE_MODEL_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "labmine/bayes.hpp"
#include "labmine/feature_table.hpp"
#include "labmine/forest.hpp"
#include "labmine/svm.hpp"
#include "labmine/tree.hpp"

namespace labmine {

enum class Algorithm { kZeroR, kNaiveBayes, kDecisionTree, kRandomForest, kSvmSmo };

// Canonical names: zeror, naivebayes, j48, randomforest, smo.
std::string algorithm_name(Algorithm algorithm);
// Accepts canonical names plus common aliases (nb, tree, decisiontree,
// rf, forest, svm, svmsmo), case-insensitive.
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct ModelSpec {
  Algorithm algorithm = Algorithm::kZeroR;
  TreeParams tree;
  ForestParams forest;
  SvmParams svm;
  std::uint64_t seed = 0;

  bool operator==(const ModelSpec&) const = default;
};

// Throws std::invalid_argument on out-of-range hyperparameters, before
// any data is read.
void validate_spec(const ModelSpec& spec);

struct ModelSchema {
  std::vector<std::string> attribute_names;
  AggregationMode mode = AggregationMode::kAvg;

  bool operator==(const ModelSchema&) const = default;
};

// Pruned-tree state wrapped for cheap copies; the node tree is
// immutable once trained.
struct TreeModelState {
  std::shared_ptr<const TreeNode> root;
};

struct Model {
  ModelSpec spec;
  ModelSchema schema;
  std::variant<ZeroRModel, NaiveBayesModel, TreeModelState, ForestModel, SvmModel>
      state;
};

// Trains per spec.algorithm. Deterministic given (spec, table). Tables
// with a single class yield degenerate models that keep the absent
// class at probability zero.
Model train(const ModelSpec& spec, const FeatureTable& table, int jobs = 1);

// (p_class0, p_class1); non-negative, sums to 1 within 1e-9.
std::array<double, 2> predict_proba(const Model& model, std::span<const double> row);
// argmax of predict_proba with ties to class 0.
int predict_label(const Model& model, std::span<const double> row);

// Verifies a table was built with the model's attribute set and
// aggregation mode; throws DataError otherwise.
void check_schema(const Model& model, const FeatureTable& table);

// Versioned JSON persistence. Tree-backed models embed their text
// readout, so a save/load round trip is exact.
void save_model(std::ostream& out, const Model& model);
void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(std::istream& in);
Model load_model(const std::filesystem::path& path);

}  // namespace labmine

#endif  // LABMINE_MODEL_HPP_
