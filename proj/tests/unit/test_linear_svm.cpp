// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scenesearch/error.hpp"
#include "scenesearch/linear_svm.hpp"
#include "scenesearch/rng.hpp"

using namespace scenesearch;

namespace {

svm::Samples to_samples(const oracle::Matrix& m) {
  svm::Samples s(m.size(), m.front().size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t k = 0; k < m[i].size(); ++k) s.row(i)[k] = m[i][k];
  }
  return s;
}

oracle::Matrix random_points(Rng& rng, std::size_t n, std::size_t d, double spread) {
  oracle::Matrix m(n, std::vector<double>(d));
  for (auto& row : m) {
    for (auto& v : row) v = spread * rng.normal();
  }
  return m;
}

}  // namespace

TEST(BiasedSvm, MatchesGridOracleOnSmallInstances) {
  Rng rng(101);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 3 + rng.below(6);
    auto x = random_points(rng, n, 2, 1.5);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = (x[i][0] + 0.5 * x[i][1] + 0.8 * rng.normal() > 0) ? 1 : -1;
    y[0] = 1;
    y[1] = -1;
    const double c = rng.uniform(0.2, 5.0);
    const auto model = svm::train_biased_svm(to_samples(x), y, c);
    const double oracle_obj = oracle::grid_biased_svm(x, y, c);
    EXPECT_TRUE(model.converged);
    EXPECT_NEAR(model.objective, oracle_obj, 1e-4 * std::max(1.0, oracle_obj)) << "trial " << trial;
    EXPECT_NEAR(model.objective, oracle::svm_objective(model.w, model.bias, x, y, c), 1e-9);
  }
}

TEST(BiasedSvm, ObjectiveNeverAboveZeroModel) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 4 + rng.below(30), d = 1 + rng.below(10);
    const auto x = random_points(rng, n, d, rng.uniform(0.01, 100.0));
    std::vector<int> y(n);
    for (auto& v : y) v = rng.uniform() < 0.5 ? 1 : -1;
    y[0] = 1;
    y[1] = -1;
    const double c = rng.uniform(0.01, 10.0);
    const auto model = svm::train_biased_svm(to_samples(x), y, c);
    EXPECT_LE(model.objective, c * static_cast<double>(n) + 1e-9);
  }
}

TEST(BiasedSvm, AntipodalSeparable) {
  const oracle::Matrix x{{1, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {-1, 0, 0}};
  const std::vector<int> y{1, 1, -1, -1};
  const auto model = svm::train_biased_svm(to_samples(x), y, 1.0);
  EXPECT_NEAR(model.w[0], 1.0, 1e-9);
  EXPECT_NEAR(model.w[1], 0.0, 1e-12);
  EXPECT_NEAR(model.bias, 0.0, 1e-9);
  EXPECT_NEAR(model.objective, 0.5, 1e-9);
}

TEST(BiasedSvm, Errors) {
  const oracle::Matrix x{{1}, {2}};
  const std::vector<int> same{1, 1}, mixed{1, -1};
  EXPECT_THROW(svm::train_biased_svm(to_samples(x), same, 1.0), Error);
  EXPECT_THROW(svm::train_biased_svm(to_samples(x), mixed, 0.0), Error);
}

TEST(BiasedSvm, Deterministic) {
  Rng rng(9);
  const auto x = random_points(rng, 40, 6, 1.0);
  std::vector<int> y(40);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i][0] > 0 ? 1 : -1;
  const auto a = svm::train_biased_svm(to_samples(x), y, 1.0);
  const auto b = svm::train_biased_svm(to_samples(x), y, 1.0);
  EXPECT_EQ(a.w, b.w);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(UnbiasedSvm, OneDimensionalAnalyticCase) {
  const auto model = svm::train_unbiased_svm(to_samples({{1.0}}), 3.0);
  EXPECT_NEAR(model.w[0], 1.0, 1e-6);
  EXPECT_NEAR(model.objective, 0.5, 1e-6);
}

TEST(UnbiasedSvm, MatchesGridOracle) {
  Rng rng(303);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.below(10);
    oracle::Matrix x = random_points(rng, n, 2, 1.0);
    for (auto& row : x) row[0] += 0.5;
    const double c = rng.uniform(0.1, 5.0);
    const auto model = svm::train_unbiased_svm(to_samples(x), c);
    const double oracle_obj = oracle::grid_unbiased_svm(x, c);
    EXPECT_NEAR(model.objective, oracle_obj, 1e-4 * std::max(1.0, oracle_obj)) << "trial " << trial;
    EXPECT_LE(model.objective, c * static_cast<double>(n) + 1e-12);
  }
}

TEST(UnbiasedSvm, ZeroRowsContributeConstantLoss) {
  const auto model = svm::train_unbiased_svm(to_samples({{0.0, 0.0}, {2.0, 0.0}}), 1.0);
  EXPECT_NEAR(model.w[0], 0.5, 1e-9);
  EXPECT_NEAR(model.objective, 0.125 + 1.0, 1e-9);
}
