// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include "scenesearch/platt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "scenesearch/error.hpp"

namespace scenesearch {

namespace {

// -log-likelihood term for target t at z = a*s + b, without overflow.
double cross_entropy(double z, double t) {
  return z >= 0.0 ? t * z + std::log1p(std::exp(-z)) : (t - 1.0) * z + std::log1p(std::exp(z));
}

}  // namespace

PlattParams fit_platt(std::span<const double> scores, std::span<const int> labels, const PlattOptions& options) {
  if (scores.size() != labels.size()) throw Error(Errc::dimension_mismatch, "scores and labels differ in length");
  double prior1 = 0.0, prior0 = 0.0;
  for (int y : labels) (y > 0 ? prior1 : prior0) += 1.0;
  if (prior1 == 0.0 || prior0 == 0.0) throw Error(Errc::single_class, "Platt scaling needs both classes");

  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  const std::size_t n = scores.size();
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = labels[i] > 0 ? hi : lo;

  PlattParams p{0.0, std::log((prior0 + 1.0) / (prior1 + 1.0))};
  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) f += cross_entropy(scores[i] * a + b, target[i]);
    return f;
  };
  double fval = objective(p.a, p.b);
  constexpr double kHessianShift = 1e-12;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    double h11 = kHessianShift, h22 = kHessianShift, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = scores[i] * p.a + p.b;
      double prob, comp;  // prob = 1/(1+e^z), comp = 1 - prob
      if (z >= 0.0) {
        const double e = std::exp(-z);
        prob = e / (1.0 + e);
        comp = 1.0 / (1.0 + e);
      } else {
        const double e = std::exp(z);
        prob = 1.0 / (1.0 + e);
        comp = e / (1.0 + e);
      }
      const double d2 = prob * comp;
      h11 += scores[i] * scores[i] * d2;
      h22 += d2;
      h21 += scores[i] * d2;
      const double d1 = target[i] - prob;
      g1 += scores[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < options.gradient_tolerance && std::abs(g2) < options.gradient_tolerance) break;

    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;

    double step = 1.0;
    bool accepted = false;
    while (step >= options.min_step) {
      const double na = p.a + step * da;
      const double nb = p.b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        p = {na, nb};
        fval = nf;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no further decrease representable
  }
  return p;
}

double platt_probability(double score, const PlattParams& params) {
  const double z = params.a * score + params.b;
  double prob;
  if (z >= 0.0) {
    const double e = std::exp(-z);
    prob = e / (1.0 + e);
  } else {
    prob = 1.0 / (1.0 + std::exp(z));
  }
  constexpr double kLow = std::numeric_limits<double>::min();
  const double high = std::nextafter(1.0, 0.0);
  return std::clamp(prob, kLow, high);
}

}  // namespace scenesearch
