#include "labmine/model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "labmine/errors.hpp"

namespace labmine {

namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "labmine.model";
constexpr int kFormatVersion = 1;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

}  // namespace

std::string algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kZeroR: return "zeror";
    case Algorithm::kNaiveBayes: return "naivebayes";
    case Algorithm::kDecisionTree: return "j48";
    case Algorithm::kRandomForest: return "randomforest";
    case Algorithm::kSvmSmo: return "smo";
  }
  throw std::invalid_argument("unknown algorithm enum value");
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  const std::string n = lower(name);
  if (n == "zeror" || n == "zero_r" || n == "majority") return Algorithm::kZeroR;
  if (n == "naivebayes" || n == "naive_bayes" || n == "nb")
    return Algorithm::kNaiveBayes;
  if (n == "j48" || n == "tree" || n == "decisiontree" || n == "c45")
    return Algorithm::kDecisionTree;
  if (n == "randomforest" || n == "random_forest" || n == "rf" || n == "forest")
    return Algorithm::kRandomForest;
  if (n == "smo" || n == "svm" || n == "svmsmo") return Algorithm::kSvmSmo;
  return std::nullopt;
}

void validate_spec(const ModelSpec& spec) {
  switch (spec.algorithm) {
    case Algorithm::kZeroR:
    case Algorithm::kNaiveBayes:
      return;
    case Algorithm::kDecisionTree:
      if (!(spec.tree.confidence > 0.0 && spec.tree.confidence <= 0.5))
        throw std::invalid_argument("tree confidence factor must be in (0, 0.5]");
      if (spec.tree.min_leaf < 1)
        throw std::invalid_argument("tree min_leaf must be at least 1");
      return;
    case Algorithm::kRandomForest:
      if (spec.forest.n_trees < 1)
        throw std::invalid_argument("forest tree count must be at least 1");
      if (spec.forest.feature_subset < 0)
        throw std::invalid_argument("forest feature subset must be non-negative");
      if (spec.forest.min_leaf < 1)
        throw std::invalid_argument("forest min_leaf must be at least 1");
      return;
    case Algorithm::kSvmSmo:
      if (!(spec.svm.c > 0.0))
        throw std::invalid_argument("svm C must be positive");
      if (!(spec.svm.tol > 0.0))
        throw std::invalid_argument("svm tol must be positive");
      if (spec.svm.kernel == SvmKernel::kPolynomial && spec.svm.degree < 1)
        throw std::invalid_argument("svm polynomial degree must be at least 1");
      return;
  }
  throw std::invalid_argument("unknown algorithm enum value");
}

Model train(const ModelSpec& spec, const FeatureTable& table, int jobs) {
  validate_spec(spec);
  if (table.n_rows() == 0) throw std::invalid_argument("train: empty table");

  Model model;
  model.spec = spec;
  model.schema.attribute_names = table.attribute_names;
  model.schema.mode = table.mode;
  switch (spec.algorithm) {
    case Algorithm::kZeroR:
      model.state = train_zero_r(table);
      break;
    case Algorithm::kNaiveBayes:
      model.state = train_naive_bayes(table);
      break;
    case Algorithm::kDecisionTree: {
      TreeModelState state;
      state.root = induce_c45(table, spec.tree);
      model.state = std::move(state);
      break;
    }
    case Algorithm::kRandomForest:
      model.state = train_forest(table, spec.forest, spec.seed, jobs);
      break;
    case Algorithm::kSvmSmo:
      model.state = train_svm(table, spec.svm);
      break;
  }
  return model;
}

std::array<double, 2> predict_proba(const Model& model,
                                    std::span<const double> row) {
  if (row.size() != model.schema.attribute_names.size())
    throw std::invalid_argument("predict: row length does not match model schema");
  return std::visit(
      [&](const auto& state) -> std::array<double, 2> {
        using T = std::decay_t<decltype(state)>;
        if constexpr (std::is_same_v<T, ZeroRModel>) {
          return state.predict_proba();
        } else if constexpr (std::is_same_v<T, NaiveBayesModel>) {
          return state.predict_proba(row);
        } else if constexpr (std::is_same_v<T, TreeModelState>) {
          return tree_proba(*state.root, row);
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          return state.predict_proba(row);
        } else {
          return state.predict_proba(row);
        }
      },
      model.state);
}

int predict_label(const Model& model, std::span<const double> row) {
  const std::array<double, 2> p = predict_proba(model, row);
  return p[1] > p[0] ? 1 : 0;
}

void check_schema(const Model& model, const FeatureTable& table) {
  if (table.mode != model.schema.mode)
    throw DataError("table aggregation mode '" +
                    std::string(aggregation_mode_name(table.mode)) +
                    "' does not match model mode '" +
                    std::string(aggregation_mode_name(model.schema.mode)) + "'");
  if (table.attribute_names != model.schema.attribute_names)
    throw DataError("table attributes do not match model schema");
}

namespace {

json params_to_json(const ModelSpec& spec) {
  switch (spec.algorithm) {
    case Algorithm::kZeroR:
    case Algorithm::kNaiveBayes:
      return json::object();
    case Algorithm::kDecisionTree:
      return json{{"confidence", spec.tree.confidence},
                  {"min_leaf", spec.tree.min_leaf},
                  {"prune", spec.tree.prune}};
    case Algorithm::kRandomForest:
      return json{{"n_trees", spec.forest.n_trees},
                  {"feature_subset", spec.forest.feature_subset},
                  {"bootstrap", spec.forest.bootstrap},
                  {"min_leaf", spec.forest.min_leaf}};
    case Algorithm::kSvmSmo:
      return json{{"kernel", spec.svm.kernel == SvmKernel::kLinear ? "linear" : "poly"},
                  {"degree", spec.svm.degree},
                  {"c", spec.svm.c},
                  {"tol", spec.svm.tol}};
  }
  throw std::invalid_argument("unknown algorithm enum value");
}

json state_to_json(const Model& model) {
  return std::visit(
      [&](const auto& state) -> json {
        using T = std::decay_t<decltype(state)>;
        if constexpr (std::is_same_v<T, ZeroRModel>) {
          return json{{"class_counts", state.class_counts}};
        } else if constexpr (std::is_same_v<T, NaiveBayesModel>) {
          json stats = json::array();
          for (std::size_t c = 0; c < 2; ++c) {
            json per_class = json::array();
            for (const GaussianStats& s : state.per_attr[c])
              per_class.push_back(json{{"mean", s.mean}, {"variance", s.variance}});
            stats.push_back(std::move(per_class));
          }
          return json{{"class_present", state.class_present},
                      {"priors", state.priors},
                      {"stats", std::move(stats)}};
        } else if constexpr (std::is_same_v<T, TreeModelState>) {
          return json{
              {"readout", render_tree(*state.root, model.schema.attribute_names)}};
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          json trees = json::array();
          for (const auto& tree : state.trees)
            trees.push_back(render_tree(*tree, model.schema.attribute_names));
          return json{{"trees", std::move(trees)}};
        } else {
          return json{{"single_class", state.single_class},
                      {"only_class", state.only_class},
                      {"feat_min", state.feat_min},
                      {"feat_range", state.feat_range},
                      {"support_vectors", state.support_vectors},
                      {"sv_coeff", state.sv_coeff},
                      {"bias", state.bias},
                      {"platt_a", state.platt_a},
                      {"platt_b", state.platt_b}};
        }
      },
      model.state);
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key))
    throw DataError(std::string("model file: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw DataError(std::string("model file: bad value for field '") + key + "'");
  }
}

void state_from_json(const json& j, Model& model) {
  switch (model.spec.algorithm) {
    case Algorithm::kZeroR: {
      ZeroRModel state;
      const auto counts = require<std::vector<std::int64_t>>(j, "class_counts");
      if (counts.size() != 2 || counts[0] < 0 || counts[1] < 0 ||
          counts[0] + counts[1] <= 0)
        throw DataError("model file: bad class_counts");
      state.class_counts = {counts[0], counts[1]};
      model.state = state;
      return;
    }
    case Algorithm::kNaiveBayes: {
      NaiveBayesModel state;
      const auto present = require<std::vector<bool>>(j, "class_present");
      const auto priors = require<std::vector<double>>(j, "priors");
      if (present.size() != 2 || priors.size() != 2)
        throw DataError("model file: bad class fields");
      state.class_present = {present[0], present[1]};
      state.priors = {priors[0], priors[1]};
      if (!j.contains("stats") || !j.at("stats").is_array() ||
          j.at("stats").size() != 2)
        throw DataError("model file: bad stats");
      for (std::size_t c = 0; c < 2; ++c) {
        for (const json& s : j.at("stats").at(c)) {
          GaussianStats gs;
          gs.mean = require<double>(s, "mean");
          gs.variance = require<double>(s, "variance");
          if (!(gs.variance > 0.0))
            throw DataError("model file: non-positive variance");
          state.per_attr[c].push_back(gs);
        }
      }
      if (state.per_attr[0].size() != model.schema.attribute_names.size() ||
          state.per_attr[1].size() != model.schema.attribute_names.size())
        throw DataError("model file: stats do not match schema width");
      model.state = std::move(state);
      return;
    }
    case Algorithm::kDecisionTree: {
      TreeModelState state;
      state.root =
          parse_tree(require<std::string>(j, "readout"), model.schema.attribute_names);
      model.state = std::move(state);
      return;
    }
    case Algorithm::kRandomForest: {
      ForestModel state;
      state.params = model.spec.forest;
      state.seed = model.spec.seed;
      const auto readouts = require<std::vector<std::string>>(j, "trees");
      if (readouts.empty()) throw DataError("model file: forest has no trees");
      for (const std::string& text : readouts)
        state.trees.push_back(parse_tree(text, model.schema.attribute_names));
      model.state = std::move(state);
      return;
    }
    case Algorithm::kSvmSmo: {
      SvmModel state;
      state.params = model.spec.svm;
      state.single_class = require<bool>(j, "single_class");
      state.only_class = require<int>(j, "only_class");
      state.feat_min = require<std::vector<double>>(j, "feat_min");
      state.feat_range = require<std::vector<double>>(j, "feat_range");
      state.support_vectors =
          require<std::vector<std::vector<double>>>(j, "support_vectors");
      state.sv_coeff = require<std::vector<double>>(j, "sv_coeff");
      state.bias = require<double>(j, "bias");
      state.platt_a = require<double>(j, "platt_a");
      state.platt_b = require<double>(j, "platt_b");
      const std::size_t m = model.schema.attribute_names.size();
      if (state.feat_min.size() != m || state.feat_range.size() != m)
        throw DataError("model file: normalization stats do not match schema");
      if (state.support_vectors.size() != state.sv_coeff.size())
        throw DataError("model file: support vector count mismatch");
      for (const auto& sv : state.support_vectors)
        if (sv.size() != m)
          throw DataError("model file: support vector width mismatch");
      model.state = std::move(state);
      return;
    }
  }
  throw DataError("model file: unknown algorithm");
}

void params_from_json(const json& j, ModelSpec& spec) {
  switch (spec.algorithm) {
    case Algorithm::kZeroR:
    case Algorithm::kNaiveBayes:
      return;
    case Algorithm::kDecisionTree:
      spec.tree.confidence = require<double>(j, "confidence");
      spec.tree.min_leaf = require<int>(j, "min_leaf");
      spec.tree.prune = require<bool>(j, "prune");
      return;
    case Algorithm::kRandomForest:
      spec.forest.n_trees = require<int>(j, "n_trees");
      spec.forest.feature_subset = require<int>(j, "feature_subset");
      spec.forest.bootstrap = require<bool>(j, "bootstrap");
      spec.forest.min_leaf = require<int>(j, "min_leaf");
      return;
    case Algorithm::kSvmSmo: {
      const std::string kernel = require<std::string>(j, "kernel");
      if (kernel == "linear")
        spec.svm.kernel = SvmKernel::kLinear;
      else if (kernel == "poly")
        spec.svm.kernel = SvmKernel::kPolynomial;
      else
        throw DataError("model file: unknown kernel '" + kernel + "'");
      spec.svm.degree = require<int>(j, "degree");
      spec.svm.c = require<double>(j, "c");
      spec.svm.tol = require<double>(j, "tol");
      return;
    }
  }
  throw DataError("model file: unknown algorithm");
}

}  // namespace

void save_model(std::ostream& out, const Model& model) {
  json j{{"format", kFormatTag},
         {"version", kFormatVersion},
         {"algorithm", algorithm_name(model.spec.algorithm)},
         {"seed", model.spec.seed},
         {"schema",
          {{"mode", aggregation_mode_name(model.schema.mode)},
           {"attributes", model.schema.attribute_names}}},
         {"params", params_to_json(model.spec)},
         {"state", state_to_json(model)}};
  out << j.dump(2) << '\n';
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  save_model(out, model);
}

Model load_model(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(std::string("model file: invalid JSON: ") + e.what());
  }
  if (require<std::string>(j, "format") != kFormatTag)
    throw DataError("model file: wrong format tag");
  if (require<int>(j, "version") != kFormatVersion)
    throw DataError("model file: unsupported version");

  Model model;
  const std::string algo_name = require<std::string>(j, "algorithm");
  const auto algo = parse_algorithm(algo_name);
  if (!algo) throw DataError("model file: unknown algorithm '" + algo_name + "'");
  model.spec.algorithm = *algo;
  model.spec.seed = require<std::uint64_t>(j, "seed");

  if (!j.contains("schema")) throw DataError("model file: missing schema");
  const json& schema = j.at("schema");
  const std::string mode_name = require<std::string>(schema, "mode");
  try {
    model.schema.mode = aggregation_mode_from_name(mode_name);
  } catch (const std::invalid_argument&) {
    throw DataError("model file: unknown mode '" + mode_name + "'");
  }
  model.schema.attribute_names =
      require<std::vector<std::string>>(schema, "attributes");
  if (model.schema.attribute_names.empty())
    throw DataError("model file: empty attribute schema");

  if (!j.contains("params")) throw DataError("model file: missing params");
  params_from_json(j.at("params"), model.spec);
  try {
    validate_spec(model.spec);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  if (!j.contains("state")) throw DataError("model file: missing state");
  state_from_json(j.at("state"), model);
  return model;
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return load_model(in);
}

}  // namespace labmine
