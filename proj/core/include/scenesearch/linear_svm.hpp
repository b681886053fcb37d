// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace scenesearch::svm {

/// Row-major sample matrix in double precision.
class Samples {
 public:
  Samples() = default;
  Samples(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

struct SolverOptions {
  // Stop once the maximal KKT violation drops below this.
  double tolerance = 1e-9;
  std::size_t max_iterations = 10'000'000;
};

struct LinearModel {
  std::vector<double> w;
  double bias = 0.0;
  double objective = 0.0;  // primal objective at (w, bias)
  std::size_t iterations = 0;
  bool converged = false;
};

double dot(std::span<const double> a, std::span<const double> b);

/// Primal hinge objective: 0.5*|w|^2 + C * sum_i max(0, 1 - y_i (w.x_i + bias)).
double hinge_objective(std::span<const double> w, double bias, const Samples& x, std::span<const int> y, double c);

/// Soft-margin linear SVM with an unregularized bias,
///
///   minimize  0.5*|w|^2 + C * sum_i max(0, 1 - y_i (w.x_i + b)),  y_i in {-1, +1},
///
/// solved in the dual by SMO with second-order working-set selection. Kernel
/// rows are computed lazily, so memory grows only with the rows the solver
/// visits. After convergence the bias is re-optimized exactly for the final w
/// (a 1-D piecewise-linear problem). Deterministic: no randomness is used.
LinearModel train_biased_svm(const Samples& x, std::span<const int> y, double c, const SolverOptions& options = {});

/// Bias-free variant used on pairwise difference vectors (every label +1),
///
///   minimize  0.5*|w|^2 + C * sum_i max(0, 1 - w.x_i),
///
/// solved by dual coordinate descent with a fixed cyclic order.
LinearModel train_unbiased_svm(const Samples& x, double c, const SolverOptions& options = {});

}  // namespace scenesearch::svm
