// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#pragma once

#include <span>

namespace scenesearch {

// P(y = +1 | s) = 1 / (1 + exp(a*s + b)); a < 0 when larger scores mean positive.
struct PlattParams {
  double a = 0.0;
  double b = 0.0;
};

struct PlattOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-10;
  double min_step = 1e-10;
};

/// Fits (a, b) by minimizing the cross-entropy against Platt's smoothed
/// targets, with the Newton/backtracking scheme of Lin, Lin & Weng (2007).
/// `labels` are +1 / -1; throws Error(single_class) unless both occur.
PlattParams fit_platt(std::span<const double> scores, std::span<const int> labels, const PlattOptions& options = {});

/// Numerically stable sigmoid; the result is clamped into the open interval (0, 1).
double platt_probability(double score, const PlattParams& params);

}  // namespace scenesearch
