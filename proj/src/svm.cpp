#include "labmine/svm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace labmine {

namespace {

constexpr double kAlphaEps = 1e-12;

void check_inputs(const DenseMatrix& gram, std::span<const int> y, double c,
                  double tol, bool require_both_classes) {
  if (gram.n == 0) throw std::invalid_argument("smo_solve: empty problem");
  if (gram.data.size() != gram.n * gram.n)
    throw std::invalid_argument("smo_solve: matrix storage size mismatch");
  if (y.size() != gram.n)
    throw std::invalid_argument("smo_solve: label count does not match matrix order");
  if (!(c > 0.0)) throw std::invalid_argument("smo_solve: C must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("smo_solve: tol must be positive");
  bool saw_pos = false;
  bool saw_neg = false;
  for (int label : y) {
    if (label == 1)
      saw_pos = true;
    else if (label == -1)
      saw_neg = true;
    else
      throw std::invalid_argument("smo_solve: labels must be -1 or +1");
  }
  if (require_both_classes && (!saw_pos || !saw_neg))
    throw std::invalid_argument("smo_solve: both classes required");
  for (std::size_t i = 0; i < gram.n; ++i)
    for (std::size_t j = i + 1; j < gram.n; ++j)
      if (std::abs(gram.at(i, j) - gram.at(j, i)) > 1e-10)
        throw std::invalid_argument("smo_solve: gram matrix not symmetric");
}

class SmoSolver {
 public:
  SmoSolver(const DenseMatrix& gram, std::span<const int> y, double c, double tol)
      : gram_(gram), y_(y), c_(c), tol_(tol), n_(gram.n) {
    alphas_.assign(n_, 0.0);
    // With all alphas zero, f(x_i) = 0 so the cached error is -y_i.
    errors_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) errors_[i] = -static_cast<double>(y_[i]);
  }

  SmoState solve() {
    // Cached errors drift by accumulated roundoff, so convergence only
    // counts once a pass over freshly recomputed errors stays clean.
    // The round cap guards the corner where roundoff keeps resurfacing
    // a violation that take_step can no longer improve.
    for (int round = 0; round < 4; ++round) {
      run_passes();
      refresh_errors();
      if (!any_violation()) break;
    }
    return SmoState{std::move(alphas_), bias_};
  }

 private:
  void run_passes() {
    std::size_t num_changed = 0;
    bool examine_all = true;
    while (num_changed > 0 || examine_all) {
      num_changed = 0;
      if (examine_all) {
        for (std::size_t i = 0; i < n_; ++i) num_changed += examine(i);
      } else {
        for (std::size_t i = 0; i < n_; ++i)
          if (is_unbound(alphas_[i])) num_changed += examine(i);
      }
      if (examine_all)
        examine_all = false;
      else if (num_changed == 0)
        examine_all = true;
    }
  }

  // Mirrors decision_values term for term so the refreshed cache agrees
  // bit for bit with any later recomputation from the same state.
  void refresh_errors() {
    std::fill(errors_.begin(), errors_.end(), bias_);
    for (std::size_t j = 0; j < n_; ++j) {
      const double coeff = alphas_[j] * static_cast<double>(y_[j]);
      if (coeff == 0.0) continue;
      for (std::size_t i = 0; i < n_; ++i) errors_[i] += coeff * gram_.at(i, j);
    }
    for (std::size_t i = 0; i < n_; ++i)
      errors_[i] -= static_cast<double>(y_[i]);
  }

  bool any_violation() const {
    for (std::size_t i = 0; i < n_; ++i) {
      const double r = errors_[i] * static_cast<double>(y_[i]);
      if ((r < -tol_ && alphas_[i] < c_ - kAlphaEps) ||
          (r > tol_ && alphas_[i] > kAlphaEps))
        return true;
    }
    return false;
  }

  bool is_unbound(double a) const { return a > kAlphaEps && a < c_ - kAlphaEps; }

  std::size_t examine(std::size_t i2) {
    const double y2 = y_[i2];
    const double alph2 = alphas_[i2];
    const double r2 = errors_[i2] * y2;  // y*f - 1
    const bool violates = (r2 < -tol_ && alph2 < c_ - kAlphaEps) ||
                          (r2 > tol_ && alph2 > kAlphaEps);
    if (!violates) return 0;

    // First heuristic: the unbound example with the largest |E1 - E2|.
    std::size_t best = n_;
    double best_gap = -1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (!is_unbound(alphas_[i])) continue;
      const double gap = std::abs(errors_[i] - errors_[i2]);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best < n_ && take_step(best, i2)) return 1;
    // Then every unbound example, then the whole set, in index order.
    for (std::size_t i = 0; i < n_; ++i)
      if (is_unbound(alphas_[i]) && take_step(i, i2)) return 1;
    for (std::size_t i = 0; i < n_; ++i)
      if (take_step(i, i2)) return 1;
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double alph1 = alphas_[i1];
    const double alph2 = alphas_[i2];
    const double y1 = y_[i1];
    const double y2 = y_[i2];
    const double e1 = errors_[i1];
    const double e2 = errors_[i2];
    const double s = y1 * y2;

    double low, high;
    if (y1 != y2) {
      low = std::max(0.0, alph2 - alph1);
      high = std::min(c_, c_ + alph2 - alph1);
    } else {
      low = std::max(0.0, alph1 + alph2 - c_);
      high = std::min(c_, alph1 + alph2);
    }
    if (low >= high) return false;

    const double k11 = gram_.at(i1, i1);
    const double k12 = gram_.at(i1, i2);
    const double k22 = gram_.at(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;

    double a2;
    if (eta > 0.0) {
      a2 = alph2 + y2 * (e1 - e2) / eta;
      a2 = std::clamp(a2, low, high);
    } else {
      // Flat direction: evaluate the objective at both clip ends.
      // (e - bias) restates the error without the threshold term.
      const double f1 = y1 * (e1 - bias_) - alph1 * k11 - s * alph2 * k12;
      const double f2 = y2 * (e2 - bias_) - s * alph1 * k12 - alph2 * k22;
      const double l1 = alph1 + s * (alph2 - low);
      const double h1 = alph1 + s * (alph2 - high);
      const double obj_low = l1 * f1 + low * f2 + 0.5 * l1 * l1 * k11 +
                             0.5 * low * low * k22 + s * low * l1 * k12;
      const double obj_high = h1 * f1 + high * f2 + 0.5 * h1 * h1 * k11 +
                              0.5 * high * high * k22 + s * high * h1 * k12;
      if (obj_low < obj_high - kAlphaEps)
        a2 = low;
      else if (obj_low > obj_high + kAlphaEps)
        a2 = high;
      else
        a2 = alph2;
    }
    if (std::abs(a2 - alph2) < kAlphaEps * (a2 + alph2 + kAlphaEps)) return false;

    double a1 = alph1 + s * (alph2 - a2);
    if (a1 < 0.0) a1 = 0.0;
    if (a1 > c_) a1 = c_;

    const double d1 = y1 * (a1 - alph1);
    const double d2 = y2 * (a2 - alph2);
    double new_bias;
    const double b1 = bias_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = bias_ - e2 - d1 * k12 - d2 * k22;
    if (is_unbound(a1))
      new_bias = b1;
    else if (is_unbound(a2))
      new_bias = b2;
    else
      new_bias = (b1 + b2) / 2.0;

    const double bias_delta = new_bias - bias_;
    for (std::size_t i = 0; i < n_; ++i)
      errors_[i] += d1 * gram_.at(i1, i) + d2 * gram_.at(i2, i) + bias_delta;

    alphas_[i1] = a1;
    alphas_[i2] = a2;
    bias_ = new_bias;
    return true;
  }

  const DenseMatrix& gram_;
  std::span<const int> y_;
  const double c_;
  const double tol_;
  const std::size_t n_;
  std::vector<double> alphas_;
  std::vector<double> errors_;  // f(x_i) - y_i
  double bias_ = 0.0;
};

std::vector<double> decision_values(const DenseMatrix& gram,
                                    std::span<const int> y,
                                    const SmoState& state) {
  std::vector<double> f(gram.n, state.bias);
  for (std::size_t j = 0; j < gram.n; ++j) {
    const double coeff = state.alphas[j] * static_cast<double>(y[j]);
    if (coeff == 0.0) continue;
    for (std::size_t i = 0; i < gram.n; ++i) f[i] += coeff * gram.at(i, j);
  }
  return f;
}

// Logistic fit of P(y=+1 | f) = 1 / (1 + exp(a*f + b)) by regularized
// maximum likelihood (Newton with backtracking, Platt-style targets).
std::pair<double, double> fit_sigmoid(std::span<const double> f,
                                      std::span<const int> y) {
  const std::size_t n = f.size();
  double prior1 = 0.0;
  double prior0 = 0.0;
  for (int label : y) (label == 1 ? prior1 : prior0) += 1.0;

  const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo_target = 1.0 / (prior0 + 2.0);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = y[i] == 1 ? hi_target : lo_target;

  constexpr int kMaxIter = 100;
  constexpr double kMinStep = 1e-10;
  constexpr double kSigma = 1e-12;
  double a = 0.0;
  double b = std::log((prior0 + 1.0) / (prior1 + 1.0));

  auto objective = [&](double aa, double bb) {
    double val = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fApB = aa * f[i] + bb;
      if (fApB >= 0.0)
        val += t[i] * fApB + std::log1p(std::exp(-fApB));
      else
        val += (t[i] - 1.0) * fApB + std::log1p(std::exp(fApB));
    }
    return val;
  };

  double fval = objective(a, b);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    double h11 = kSigma;
    double h22 = kSigma;
    double h21 = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fApB = a * f[i] + b;
      double p, q;
      if (fApB >= 0.0) {
        p = std::exp(-fApB) / (1.0 + std::exp(-fApB));
        q = 1.0 / (1.0 + std::exp(-fApB));
      } else {
        p = 1.0 / (1.0 + std::exp(fApB));
        q = std::exp(fApB) / (1.0 + std::exp(fApB));
      }
      const double d2 = p * q;
      h11 += f[i] * f[i] * d2;
      h22 += d2;
      h21 += f[i] * d2;
      const double d1 = t[i] - p;
      g1 += f[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;

    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;

    double step = 1.0;
    while (step >= kMinStep) {
      const double new_a = a + step * da;
      const double new_b = b + step * db;
      const double new_f = objective(new_a, new_b);
      if (new_f < fval + 1e-4 * step * gd) {
        a = new_a;
        b = new_b;
        fval = new_f;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
  return {a, b};
}

double kernel_value(const SvmParams& params, std::span<const double> u,
                    std::span<const double> v) {
  double dot = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) dot += u[j] * v[j];
  if (params.kernel == SvmKernel::kLinear) return dot;
  return std::pow(dot + 1.0, params.degree);
}

void validate_svm_params(const SvmParams& params) {
  if (!(params.c > 0.0)) throw std::invalid_argument("svm: C must be positive");
  if (!(params.tol > 0.0)) throw std::invalid_argument("svm: tol must be positive");
  if (params.kernel == SvmKernel::kPolynomial && params.degree < 1)
    throw std::invalid_argument("svm: polynomial degree must be at least 1");
}

}  // namespace

SmoState smo_solve(const DenseMatrix& gram, std::span<const int> y, double c,
                   double tol) {
  check_inputs(gram, y, c, tol, true);
  SmoSolver solver(gram, y, c, tol);
  return solver.solve();
}

double smo_objective(const DenseMatrix& gram, std::span<const int> y,
                     const SmoState& state) {
  double linear = 0.0;
  double quadratic = 0.0;
  for (std::size_t i = 0; i < gram.n; ++i) {
    linear += state.alphas[i];
    for (std::size_t j = 0; j < gram.n; ++j) {
      quadratic += state.alphas[i] * state.alphas[j] *
                   static_cast<double>(y[i] * y[j]) * gram.at(i, j);
    }
  }
  return linear - 0.5 * quadratic;
}

double max_kkt_violation(const DenseMatrix& gram, std::span<const int> y,
                         double c, const SmoState& state) {
  const std::vector<double> f = decision_values(gram, y, state);
  double worst = 0.0;
  for (std::size_t i = 0; i < gram.n; ++i) {
    const double margin = static_cast<double>(y[i]) * f[i];
    const double a = state.alphas[i];
    double violation;
    if (a <= kAlphaEps)
      violation = std::max(0.0, 1.0 - margin);
    else if (a >= c - kAlphaEps)
      violation = std::max(0.0, margin - 1.0);
    else
      violation = std::abs(margin - 1.0);
    worst = std::max(worst, violation);
  }
  return worst;
}

SvmModel train_svm(const FeatureTable& table, const SvmParams& params) {
  validate_svm_params(params);
  if (table.n_rows() < 2)
    throw std::invalid_argument("train_svm: need at least 2 rows");
  const std::size_t n = table.n_rows();
  const std::size_t m = table.n_attributes();

  SvmModel model;
  model.params = params;
  model.feat_min.assign(m, 0.0);
  model.feat_range.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double lo = table.rows[0].values[j];
    double hi = lo;
    for (const FeatureRow& row : table.rows) {
      lo = std::min(lo, row.values[j]);
      hi = std::max(hi, row.values[j]);
    }
    model.feat_min[j] = lo;
    model.feat_range[j] = hi - lo;
  }

  const auto counts = table.class_counts();
  if (counts[0] == 0 || counts[1] == 0) {
    model.single_class = true;
    model.only_class = counts[1] > 0 ? 1 : 0;
    return model;
  }

  std::vector<std::vector<double>> normalized(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double range = model.feat_range[j];
      normalized[i][j] =
          range > 0.0 ? (table.rows[i].values[j] - model.feat_min[j]) / range : 0.0;
    }

  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = table.rows[i].label == 1 ? 1 : -1;

  DenseMatrix gram(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double k = kernel_value(params, normalized[i], normalized[j]);
      gram.at(i, j) = k;
      gram.at(j, i) = k;
    }

  const SmoState state = smo_solve(gram, y, params.c, params.tol);
  model.bias = state.bias;
  for (std::size_t i = 0; i < n; ++i) {
    if (state.alphas[i] > 0.0) {
      model.support_vectors.push_back(normalized[i]);
      model.sv_coeff.push_back(state.alphas[i] * static_cast<double>(y[i]));
    }
  }

  const std::vector<double> f = decision_values(gram, y, state);
  const auto [a, b] = fit_sigmoid(f, y);
  model.platt_a = a;
  model.platt_b = b;
  return model;
}

double SvmModel::decision_value(std::span<const double> row) const {
  if (row.size() != feat_min.size())
    throw std::invalid_argument("svm: row length mismatch");
  std::vector<double> norm(row.size());
  for (std::size_t j = 0; j < row.size(); ++j)
    norm[j] = feat_range[j] > 0.0 ? (row[j] - feat_min[j]) / feat_range[j] : 0.0;
  double f = bias;
  for (std::size_t k = 0; k < support_vectors.size(); ++k)
    f += sv_coeff[k] * kernel_value(params, support_vectors[k], norm);
  return f;
}

std::array<double, 2> SvmModel::predict_proba(std::span<const double> row) const {
  if (single_class) {
    if (row.size() != feat_min.size())
      throw std::invalid_argument("svm: row length mismatch");
    return only_class == 1 ? std::array<double, 2>{0.0, 1.0}
                           : std::array<double, 2>{1.0, 0.0};
  }
  const double f = decision_value(row);
  const double fApB = platt_a * f + platt_b;
  double p1;
  if (fApB >= 0.0)
    p1 = std::exp(-fApB) / (1.0 + std::exp(-fApB));
  else
    p1 = 1.0 / (1.0 + std::exp(fApB));
  return {1.0 - p1, p1};
}

}  // namespace labmine
