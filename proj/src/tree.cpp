#include "labmine/tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>

#include "labmine/csv.hpp"
#include "labmine/discretize.hpp"
#include "labmine/errors.hpp"

namespace labmine {

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("inverse_normal_cdf: p must be in (0, 1)");
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step against the exact CDF tightens to full precision.
  const double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = err * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

double pessimistic_added_errors(double total, double errors, double cf) {
  if (total <= 0.0) return 0.0;
  if (cf > 0.5) return total * (1.0 - cf);
  if (errors < 1.0) {
    const double base = total * (1.0 - std::pow(cf, 1.0 / total));
    if (errors == 0.0) return base;
    return base + errors * (pessimistic_added_errors(total, 1.0, cf) - base);
  }
  if (errors + 0.5 >= total) return std::max(total - errors, 0.0);
  const double z = inverse_normal_cdf(1.0 - cf);
  const double f = (errors + 0.5) / total;
  const double r =
      (f + z * z / (2.0 * total) +
       z * std::sqrt(f / total - f * f / total + z * z / (4.0 * total * total))) /
      (1.0 + z * z / total);
  return r * total - errors;
}

namespace {

constexpr double kGainEps = 1e-12;

double entropy_pair(std::int64_t c0, std::int64_t c1) {
  double h = 0.0;
  const double n = static_cast<double>(c0 + c1);
  if (c0 > 0) {
    const double p = static_cast<double>(c0) / n;
    h -= p * std::log2(p);
  }
  if (c1 > 0) {
    const double p = static_cast<double>(c1) / n;
    h -= p * std::log2(p);
  }
  return h;
}

struct ValueRun {
  double value = 0.0;
  std::int64_t c[2] = {0, 0};
  bool has(int cls) const { return c[cls] > 0; }
};

struct AttrSplit {
  bool valid = false;
  double threshold = 0.0;
  double gain = 0.0;
  double ratio = 0.0;
};

// Best boundary threshold for one attribute over the node's rows.
// Candidates sit between adjacent distinct values whose class sets
// differ and must leave min_leaf rows on each side; gain ties keep the
// lower threshold.
AttrSplit best_split(const FeatureTable& table,
                     std::span<const std::uint32_t> rows, std::size_t attr,
                     double parent_entropy, int min_leaf,
                     std::vector<std::pair<double, int>>& scratch) {
  scratch.clear();
  for (std::uint32_t r : rows)
    scratch.emplace_back(table.rows[r].values[attr], table.rows[r].label);
  std::sort(scratch.begin(), scratch.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  std::vector<ValueRun> runs;
  for (const auto& [v, y] : scratch) {
    if (runs.empty() || runs.back().value != v) {
      ValueRun run;
      run.value = v;
      runs.push_back(run);
    }
    ++runs.back().c[y];
  }
  if (runs.size() < 2) return {};

  std::int64_t total0 = 0;
  std::int64_t total1 = 0;
  for (const ValueRun& run : runs) {
    total0 += run.c[0];
    total1 += run.c[1];
  }
  const std::int64_t n = total0 + total1;

  AttrSplit best;
  std::int64_t left0 = 0;
  std::int64_t left1 = 0;
  for (std::size_t b = 1; b < runs.size(); ++b) {
    left0 += runs[b - 1].c[0];
    left1 += runs[b - 1].c[1];
    const std::int64_t nl = left0 + left1;
    const std::int64_t nr = n - nl;
    if (nl < min_leaf || nr < min_leaf) continue;
    const bool sets_differ = runs[b - 1].has(0) != runs[b].has(0) ||
                             runs[b - 1].has(1) != runs[b].has(1);
    if (!sets_differ) continue;
    const double mid = (runs[b - 1].value + runs[b].value) / 2.0;
    if (!(runs[b - 1].value < mid && mid < runs[b].value)) continue;
    const double h_left = entropy_pair(left0, left1);
    const double h_right = entropy_pair(total0 - left0, total1 - left1);
    const double gain = parent_entropy -
                        (static_cast<double>(nl) * h_left +
                         static_cast<double>(nr) * h_right) /
                            static_cast<double>(n);
    if (!best.valid || gain > best.gain) {
      best.valid = true;
      best.threshold = mid;
      best.gain = gain;
      const double split_info =
          entropy_pair(nl, nr);  // both sides non-empty, so > 0
      best.ratio = gain / split_info;
    }
  }
  return best;
}

class Inducer {
 public:
  Inducer(const FeatureTable& table, const TreeParams& params,
          const FeatureSampler& sampler)
      : table_(table), params_(params), sampler_(sampler) {
    all_attrs_.resize(table.n_attributes());
    std::iota(all_attrs_.begin(), all_attrs_.end(), 0);
  }

  std::unique_ptr<TreeNode> build(std::vector<std::uint32_t>&& rows) {
    auto node = std::make_unique<TreeNode>();
    std::int64_t c0 = 0;
    std::int64_t c1 = 0;
    for (std::uint32_t r : rows) {
      if (table_.rows[r].label == 0)
        ++c0;
      else
        ++c1;
    }
    node->weights = {static_cast<double>(c0), static_cast<double>(c1)};
    node->label = c1 > c0 ? 1 : 0;

    const std::int64_t n = c0 + c1;
    if (c0 == 0 || c1 == 0 ||
        n < 2 * static_cast<std::int64_t>(params_.min_leaf))
      return node;

    std::vector<std::size_t> candidate_attrs;
    if (sampler_) {
      candidate_attrs = sampler_(table_.n_attributes());
      if (candidate_attrs.empty())
        throw std::invalid_argument("feature sampler returned no attributes");
      std::sort(candidate_attrs.begin(), candidate_attrs.end());
      if (std::adjacent_find(candidate_attrs.begin(), candidate_attrs.end()) !=
          candidate_attrs.end())
        throw std::invalid_argument("feature sampler returned duplicates");
      if (candidate_attrs.back() >= table_.n_attributes())
        throw std::invalid_argument("feature sampler index out of range");
    }
    const std::vector<std::size_t>& attrs =
        sampler_ ? candidate_attrs : all_attrs_;

    const double parent_entropy = entropy_pair(c0, c1);
    std::vector<std::pair<std::size_t, AttrSplit>> splits;
    double gain_sum = 0.0;
    for (std::size_t attr : attrs) {
      AttrSplit s = best_split(table_, rows, attr, parent_entropy,
                               params_.min_leaf, scratch_);
      if (s.valid && s.gain > kGainEps) {
        splits.emplace_back(attr, s);
        gain_sum += s.gain;
      }
    }
    if (splits.empty()) return node;

    // Gain-ratio choice limited to splits of at least average gain;
    // attribute order breaks ratio ties toward the lower index.
    const double avg_gain = gain_sum / static_cast<double>(splits.size());
    const AttrSplit* chosen = nullptr;
    std::size_t chosen_attr = 0;
    for (const auto& [attr, s] : splits) {
      if (s.gain < avg_gain - kGainEps) continue;
      if (!chosen || s.ratio > chosen->ratio) {
        chosen = &s;
        chosen_attr = attr;
      }
    }
    if (!chosen) return node;

    std::vector<std::uint32_t> left_rows;
    std::vector<std::uint32_t> right_rows;
    for (std::uint32_t r : rows) {
      if (table_.rows[r].values[chosen_attr] <= chosen->threshold)
        left_rows.push_back(r);
      else
        right_rows.push_back(r);
    }
    node->leaf = false;
    node->attr_index = chosen_attr;
    node->threshold = chosen->threshold;
    rows.clear();
    rows.shrink_to_fit();
    node->left = build(std::move(left_rows));
    node->right = build(std::move(right_rows));
    return node;
  }

 private:
  const FeatureTable& table_;
  const TreeParams& params_;
  const FeatureSampler& sampler_;
  std::vector<std::size_t> all_attrs_;
  std::vector<std::pair<double, int>> scratch_;
};

double subtree_error_estimate(const TreeNode& node, double cf) {
  if (node.leaf) {
    const double mis = node.misclassified_weight();
    return mis + pessimistic_added_errors(node.total_weight(), mis, cf);
  }
  return subtree_error_estimate(*node.left, cf) +
         subtree_error_estimate(*node.right, cf);
}

// Bottom-up subtree replacement: a node collapses to a leaf when the
// leaf's pessimistic error does not exceed the subtree's by more than
// the conventional 0.1 slack.
void prune_rec(TreeNode& node, double cf) {
  if (node.leaf) return;
  prune_rec(*node.left, cf);
  prune_rec(*node.right, cf);
  const double mis = node.misclassified_weight();
  const double leaf_err = mis + pessimistic_added_errors(node.total_weight(), mis, cf);
  const double tree_err = subtree_error_estimate(node, cf);
  if (leaf_err <= tree_err + 0.1) {
    node.leaf = true;
    node.left.reset();
    node.right.reset();
  }
}

void validate_params(const TreeParams& params) {
  if (!(params.confidence > 0.0 && params.confidence <= 0.5))
    throw std::invalid_argument("tree confidence factor must be in (0, 0.5]");
  if (params.min_leaf < 1)
    throw std::invalid_argument("tree min_leaf must be at least 1");
}

std::string format_weight(double w) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", w);
  return buf;
}

std::string leaf_suffix(const TreeNode& leaf) {
  std::string s = ": " + std::to_string(leaf.label) + " (" +
                  format_weight(leaf.total_weight());
  const double mis = leaf.misclassified_weight();
  if (mis > 0.0) s += "/" + format_weight(mis);
  s += ")";
  return s;
}

void render_rec(const TreeNode& node, std::span<const std::string> names,
                std::size_t depth, std::string& out) {
  std::string prefix;
  for (std::size_t i = 0; i < depth; ++i) prefix += "| ";
  if (node.attr_index >= names.size())
    throw std::invalid_argument("render_tree: attribute index outside schema");
  const std::string condition_base =
      names[node.attr_index] + " ";
  const std::string thr = format_double(node.threshold);
  const TreeNode* children[2] = {node.left.get(), node.right.get()};
  const char* ops[2] = {"<= ", "> "};
  for (int side = 0; side < 2; ++side) {
    out += prefix + condition_base + ops[side] + thr;
    if (children[side]->leaf) {
      out += leaf_suffix(*children[side]);
      out += '\n';
    } else {
      out += '\n';
      render_rec(*children[side], names, depth + 1, out);
    }
  }
}

struct LeafFields {
  int label = 0;
  double total = 0.0;
  double miscl = 0.0;
};

// Parses `: <class> (<total>[/<miscl>])`.
LeafFields parse_leaf_suffix(const std::string& text, std::size_t line_no) {
  const auto fail = [line_no](const std::string& msg) {
    throw DataError("tree text line " + std::to_string(line_no) + ": " + msg);
  };
  std::string_view s = trim(text);
  if (s.empty() || s.front() != ':') fail("expected leaf suffix after ':'");
  s.remove_prefix(1);
  s = trim(s);
  const std::size_t open = s.find(" (");
  if (open == std::string_view::npos || s.empty() || s.back() != ')')
    fail("malformed leaf weights");
  LeafFields leaf;
  const std::string_view cls = trim(s.substr(0, open));
  if (cls == "0")
    leaf.label = 0;
  else if (cls == "1")
    leaf.label = 1;
  else
    fail("leaf class must be 0 or 1");
  const std::string_view inner = s.substr(open + 2, s.size() - open - 3);
  const std::size_t slash = inner.find('/');
  const auto total = parse_double(trim(
      slash == std::string_view::npos ? inner : inner.substr(0, slash)));
  if (!total || *total < 0.0) fail("bad leaf total weight");
  leaf.total = *total;
  if (slash != std::string_view::npos) {
    const auto mis = parse_double(trim(inner.substr(slash + 1)));
    if (!mis || *mis < 0.0 || *mis > *total) fail("bad leaf misclassified weight");
    leaf.miscl = *mis;
  }
  return leaf;
}

std::unique_ptr<TreeNode> make_leaf(const LeafFields& f) {
  auto node = std::make_unique<TreeNode>();
  node->leaf = true;
  node->label = f.label;
  node->weights[static_cast<std::size_t>(f.label)] = f.total - f.miscl;
  node->weights[static_cast<std::size_t>(1 - f.label)] = f.miscl;
  return node;
}

class TreeParser {
 public:
  TreeParser(std::vector<std::string> lines,
             std::span<const std::string> names)
      : lines_(std::move(lines)) {
    for (std::size_t i = 0; i < names.size(); ++i) name_index_[names[i]] = i;
  }

  std::unique_ptr<TreeNode> parse() {
    if (lines_.empty()) throw DataError("tree text: empty input");
    if (trim(lines_[0]).starts_with(":")) {
      if (lines_.size() != 1)
        throw DataError("tree text: leaf root must be the only line");
      return make_leaf(parse_leaf_suffix(lines_[0], 1));
    }
    auto root = parse_internal(0);
    if (pos_ != lines_.size())
      throw DataError("tree text line " + std::to_string(pos_ + 1) +
                      ": unexpected trailing content");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw DataError("tree text line " + std::to_string(pos_ + 1) + ": " + msg);
  }

  // Consumes one condition line at the given depth; returns the line
  // body after the depth prefix.
  std::string take_line(std::size_t depth) {
    if (pos_ >= lines_.size()) fail("unexpected end of tree text");
    std::string_view line = lines_[pos_];
    for (std::size_t i = 0; i < depth; ++i) {
      if (!line.starts_with("| ")) fail("wrong indentation depth");
      line.remove_prefix(2);
    }
    if (line.starts_with("| ")) fail("wrong indentation depth");
    ++pos_;
    return std::string(line);
  }

  struct Condition {
    std::size_t attr = 0;
    bool greater = false;
    double threshold = 0.0;
    std::string rest;  // leaf suffix or empty
  };

  Condition parse_condition(const std::string& body) {
    Condition cond;
    std::size_t op_pos = body.find(" <= ");
    std::size_t op_len = 4;
    if (op_pos == std::string::npos) {
      op_pos = body.find(" > ");
      op_len = 3;
      if (op_pos == std::string::npos) fail("expected comparison operator");
      cond.greater = true;
    }
    const std::string name = body.substr(0, op_pos);
    const auto it = name_index_.find(name);
    if (it == name_index_.end()) fail("unknown attribute '" + name + "'");
    cond.attr = it->second;
    const std::string tail = body.substr(op_pos + op_len);
    // Thresholds never contain ':', so the first colon starts a leaf suffix.
    const std::size_t colon = tail.find(':');
    cond.rest = colon == std::string::npos ? "" : tail.substr(colon);
    const std::string_view thr_text =
        trim(std::string_view(tail).substr(0, colon == std::string::npos
                                                  ? tail.size()
                                                  : colon));
    const auto thr = parse_double(thr_text);
    if (!thr) fail("bad threshold '" + std::string(thr_text) + "'");
    cond.threshold = *thr;
    return cond;
  }

  std::unique_ptr<TreeNode> parse_internal(std::size_t depth) {
    const std::size_t first_line = pos_ + 1;
    Condition left_cond = parse_condition(take_line(depth));
    if (left_cond.greater) fail("expected '<=' branch first");
    std::unique_ptr<TreeNode> left =
        left_cond.rest.empty()
            ? parse_internal(depth + 1)
            : make_leaf(parse_leaf_suffix(left_cond.rest, first_line));

    const std::size_t second_line = pos_ + 1;
    Condition right_cond = parse_condition(take_line(depth));
    if (!right_cond.greater) fail("expected '>' branch second");
    if (right_cond.attr != left_cond.attr ||
        right_cond.threshold != left_cond.threshold)
      fail("'>' branch does not match its '<=' sibling");
    std::unique_ptr<TreeNode> right =
        right_cond.rest.empty()
            ? parse_internal(depth + 1)
            : make_leaf(parse_leaf_suffix(right_cond.rest, second_line));

    auto node = std::make_unique<TreeNode>();
    node->leaf = false;
    node->attr_index = left_cond.attr;
    node->threshold = left_cond.threshold;
    node->weights = {left->weights[0] + right->weights[0],
                     left->weights[1] + right->weights[1]};
    node->label = node->weights[1] > node->weights[0] ? 1 : 0;
    node->left = std::move(left);
    node->right = std::move(right);
    return node;
  }

  std::vector<std::string> lines_;
  std::map<std::string, std::size_t> name_index_;
  std::size_t pos_ = 0;
};

}  // namespace

std::unique_ptr<TreeNode> induce_on_rows(const FeatureTable& table,
                                         std::span<const std::size_t> row_indices,
                                         const TreeParams& params,
                                         const FeatureSampler& sampler) {
  validate_params(params);
  if (row_indices.empty())
    throw std::invalid_argument("induce_on_rows: no training rows");
  std::vector<std::uint32_t> rows;
  rows.reserve(row_indices.size());
  for (std::size_t r : row_indices) {
    if (r >= table.n_rows())
      throw std::invalid_argument("induce_on_rows: row index out of range");
    rows.push_back(static_cast<std::uint32_t>(r));
  }
  Inducer inducer(table, params, sampler);
  auto root = inducer.build(std::move(rows));
  if (params.prune) prune_rec(*root, params.confidence);
  return root;
}

std::unique_ptr<TreeNode> induce_c45(const FeatureTable& table,
                                     const TreeParams& params) {
  if (table.n_rows() == 0)
    throw std::invalid_argument("induce_c45: empty table");
  std::vector<std::size_t> rows(table.n_rows());
  std::iota(rows.begin(), rows.end(), 0);
  return induce_on_rows(table, rows, params, nullptr);
}

std::size_t leaf_count(const TreeNode& node) {
  if (node.leaf) return 1;
  return leaf_count(*node.left) + leaf_count(*node.right);
}

std::size_t tree_size(const TreeNode& node) {
  if (node.leaf) return 1;
  return 1 + tree_size(*node.left) + tree_size(*node.right);
}

std::unique_ptr<TreeNode> clone_tree(const TreeNode& node) {
  auto copy = std::make_unique<TreeNode>();
  copy->leaf = node.leaf;
  copy->attr_index = node.attr_index;
  copy->threshold = node.threshold;
  copy->label = node.label;
  copy->weights = node.weights;
  if (!node.leaf) {
    copy->left = clone_tree(*node.left);
    copy->right = clone_tree(*node.right);
  }
  return copy;
}

std::array<double, 2> tree_proba(const TreeNode& root,
                                 std::span<const double> row) {
  const TreeNode* node = &root;
  while (!node->leaf) {
    if (node->attr_index >= row.size())
      throw std::invalid_argument("tree_proba: row shorter than tree schema");
    node = row[node->attr_index] <= node->threshold ? node->left.get()
                                                    : node->right.get();
  }
  const double total = node->total_weight();
  if (total <= 0.0) return {0.5, 0.5};
  return {node->weights[0] / total, node->weights[1] / total};
}

std::string render_tree(const TreeNode& root,
                        std::span<const std::string> attribute_names) {
  std::string out;
  if (root.leaf) {
    out = leaf_suffix(root);
    out += '\n';
    return out;
  }
  render_rec(root, attribute_names, 0, out);
  return out;
}

std::unique_ptr<TreeNode> parse_tree(const std::string& text,
                                     std::span<const std::string> attribute_names) {
  std::vector<std::string> lines;
  std::string current;
  for (char ch : text) {
    if (ch == '\n') {
      while (!current.empty() && current.back() == '\r') current.pop_back();
      if (!current.empty()) lines.push_back(current);
      current.clear();
    } else {
      current += ch;
    }
  }
  if (!current.empty()) lines.push_back(current);
  TreeParser parser(std::move(lines), attribute_names);
  return parser.parse();
}

}  // namespace labmine
