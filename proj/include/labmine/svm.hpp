#ifndef LABMINE_SVM_HPP_
#define LABMINE_SVM_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "labmine/feature_table.hpp"

namespace labmine {

// Row-major square matrix of kernel values.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  explicit DenseMatrix(std::size_t order = 0) : n(order), data(order * order, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return data[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

struct SmoState {
  std::vector<double> alphas;
  double bias = 0.0;  // decision f(x) = sum_i alpha_i y_i K(x_i, x) + bias

  bool operator==(const SmoState&) const = default;
};

// Sequential minimal optimization over a precomputed Gram matrix.
// Labels must be -1/+1 with both present. Terminates once no example
// violates its KKT condition beyond tol. Fully deterministic: working
// pairs are chosen by scanning in index order.
SmoState smo_solve(const DenseMatrix& gram, std::span<const int> y, double C,
                   double tol);

// Dual objective W(alpha) = sum alpha - 1/2 sum_ij a_i a_j y_i y_j K_ij.
double smo_objective(const DenseMatrix& gram, std::span<const int> y,
                     const SmoState& state);

// Largest KKT violation of the state: for alpha at 0 the shortfall of
// y*f below 1, at C the excess above 1, in between the distance from 1.
double max_kkt_violation(const DenseMatrix& gram, std::span<const int> y,
                         double C, const SmoState& state);

enum class SvmKernel { kLinear, kPolynomial };

struct SvmParams {
  SvmKernel kernel = SvmKernel::kLinear;
  int degree = 2;  // polynomial kernel only
  double c = 1.0;
  double tol = 1e-3;

  bool operator==(const SvmParams&) const = default;
};

// Linear (or polynomial) SVM trained by SMO on min-max normalized
// inputs, with a logistic fit on training decision values providing
// probability outputs. Class 1 maps to label +1.
struct SvmModel {
  SvmParams params;
  std::vector<double> feat_min;
  std::vector<double> feat_range;  // zero range marks a constant column
  std::vector<std::vector<double>> support_vectors;  // normalized
  std::vector<double> sv_coeff;                      // alpha * y
  double bias = 0.0;
  double platt_a = 0.0;  // P(class 1 | f) = 1 / (1 + exp(a*f + b))
  double platt_b = 0.0;
  bool single_class = false;
  int only_class = 0;

  double decision_value(std::span<const double> row) const;
  std::array<double, 2> predict_proba(std::span<const double> row) const;
};

SvmModel train_svm(const FeatureTable& table, const SvmParams& params);

}  // namespace labmine

#endif  // LABMINE_SVM_HPP_
