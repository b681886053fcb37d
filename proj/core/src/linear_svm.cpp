// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include "scenesearch/linear_svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "scenesearch/error.hpp"

namespace scenesearch::svm {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Q_ij = y_i y_j <x_i, x_j>, one row at a time.
class KernelRows {
 public:
  KernelRows(const Samples& x, std::span<const int> y) : x_(x), y_(y), rows_(x.rows()), diag_(x.rows()) {
    for (std::size_t i = 0; i < x.rows(); ++i) diag_[i] = dot(x.row(i), x.row(i));
  }

  const std::vector<double>& row(std::size_t i) {
    auto& r = rows_[i];
    if (!r) {
      r.emplace(x_.rows());
      const auto xi = x_.row(i);
      for (std::size_t j = 0; j < x_.rows(); ++j) {
        (*r)[j] = static_cast<double>(y_[i] * y_[j]) * dot(xi, x_.row(j));
      }
    }
    return *r;
  }

  double diag(std::size_t i) const { return diag_[i]; }

 private:
  const Samples& x_;
  std::span<const int> y_;
  std::vector<std::optional<std::vector<double>>> rows_;
  std::vector<double> diag_;
};

// Minimizes sum_i max(0, 1 - y_i (s_i + b)) over b. The function is convex and
// piecewise linear with kinks at b = y_i - s_i, so a minimizer is a kink. Among
// equally good values the one nearest `hint` wins.
double best_bias(std::span<const double> scores, std::span<const int> y, double hint) {
  auto loss = [&](double b) {
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) total += std::max(0.0, 1.0 - y[i] * (scores[i] + b));
    return total;
  };
  double best = hint;
  double best_loss = loss(hint);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double b = y[i] - scores[i];
    const double l = loss(b);
    const double slack = 1e-12 * std::max(1.0, best_loss);
    if (l < best_loss - slack || (std::abs(l - best_loss) <= slack && std::abs(b - hint) < std::abs(best - hint))) {
      best = b;
      best_loss = l;
    }
  }
  return best;
}

void check_inputs(const Samples& x, double c) {
  if (x.rows() == 0) throw Error(Errc::degenerate_training_set, "no training samples");
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(Errc::invalid_config, "SVM C must be > 0");
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double hinge_objective(std::span<const double> w, double bias, const Samples& x, std::span<const int> y, double c) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) loss += std::max(0.0, 1.0 - y[i] * (dot(w, x.row(i)) + bias));
  return 0.5 * dot(w, w) + c * loss;
}

LinearModel train_biased_svm(const Samples& x, std::span<const int> y, double c, const SolverOptions& options) {
  check_inputs(x, c);
  const std::size_t n = x.rows();
  if (y.size() != n) throw Error(Errc::dimension_mismatch, "label count differs from sample count");
  bool has_pos = false, has_neg = false;
  for (int label : y) {
    if (label == 1) has_pos = true;
    else if (label == -1) has_neg = true;
    else throw Error(Errc::single_class, "labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw Error(Errc::single_class, "SVM training needs both classes");

  KernelRows q(x, y);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 0.5 a'Qa - e'a

  auto is_upper = [&](std::size_t t) { return alpha[t] >= c; };
  auto is_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  LinearModel model;
  std::size_t iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    // Working set selection (WSS2, Fan, Chen & Lin 2005).
    double gmax = -kInf;
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == 1) {
        if (!is_upper(t) && -grad[t] >= gmax) {
          gmax = -grad[t];
          i = t;
        }
      } else if (!is_lower(t) && grad[t] >= gmax) {
        gmax = grad[t];
        i = t;
      }
    }
    if (i == n) {
      model.converged = true;
      break;
    }
    const auto& qi = q.row(i);
    double gmax2 = -kInf;
    double obj_min = kInf;
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == 1) {
        if (!is_lower(t)) {
          const double grad_diff = gmax + grad[t];
          gmax2 = std::max(gmax2, grad[t]);
          if (grad_diff > 0.0) {
            double quad = q.diag(i) + q.diag(t) - 2.0 * y[i] * qi[t];
            if (quad <= 0.0) quad = kTau;
            const double obj = -(grad_diff * grad_diff) / quad;
            if (obj <= obj_min) {
              obj_min = obj;
              j = t;
            }
          }
        }
      } else if (!is_upper(t)) {
        const double grad_diff = gmax - grad[t];
        gmax2 = std::max(gmax2, -grad[t]);
        if (grad_diff > 0.0) {
          double quad = q.diag(i) + q.diag(t) + 2.0 * y[i] * qi[t];
          if (quad <= 0.0) quad = kTau;
          const double obj = -(grad_diff * grad_diff) / quad;
          if (obj <= obj_min) {
            obj_min = obj;
            j = t;
          }
        }
      }
    }
    if (gmax + gmax2 < options.tolerance || j == n) {
      model.converged = true;
      break;
    }

    const auto& qj = q.row(j);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = q.diag(i) + q.diag(j) + 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = q.diag(i) + q.diag(j) - 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += qi[t] * dai + qj[t] * daj;
  }
  model.iterations = iter;

  // Bias from the free support vectors, or the midpoint of the feasible range.
  double ub = kInf, lb = -kInf, sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (is_upper(t)) {
      if (y[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (is_lower(t)) {
      if (y[t] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);

  model.w.assign(x.cols(), 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] == 0.0) continue;
    const double coef = alpha[t] * y[t];
    const auto xt = x.row(t);
    for (std::size_t k = 0; k < x.cols(); ++k) model.w[k] += coef * xt[k];
  }
  std::vector<double> scores(n);
  for (std::size_t t = 0; t < n; ++t) scores[t] = dot(model.w, x.row(t));
  model.bias = best_bias(scores, y, -rho);
  model.objective = hinge_objective(model.w, model.bias, x, y, c);
  return model;
}

LinearModel train_unbiased_svm(const Samples& x, double c, const SolverOptions& options) {
  check_inputs(x, c);
  const std::size_t n = x.rows();
  std::vector<double> alpha(n, 0.0);
  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) qd[i] = dot(x.row(i), x.row(i));

  LinearModel model;
  model.w.assign(x.cols(), 0.0);
  std::size_t iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    double pg_max = -kInf, pg_min = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      if (qd[i] <= 0.0) continue;  // zero difference vector: its hinge is constant
      const auto xi = x.row(i);
      const double g = dot(model.w, xi) - 1.0;
      double pg = g;
      if (alpha[i] <= 0.0) pg = std::min(g, 0.0);
      else if (alpha[i] >= c) pg = std::max(g, 0.0);
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (pg != 0.0) {
        const double old = alpha[i];
        alpha[i] = std::clamp(alpha[i] - g / qd[i], 0.0, c);
        const double d = alpha[i] - old;
        for (std::size_t k = 0; k < x.cols(); ++k) model.w[k] += d * xi[k];
      }
    }
    if (pg_max == -kInf || pg_max - pg_min < options.tolerance) {
      model.converged = true;
      ++iter;
      break;
    }
  }
  model.iterations = iter;
  std::vector<int> ones(n, 1);
  model.objective = hinge_objective(model.w, 0.0, x, ones, c);
  return model;
}

}  // namespace scenesearch::svm
