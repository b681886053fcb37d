// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "scenesearch/config.hpp"
#include "scenesearch/dataset.hpp"
#include "scenesearch/tensor.hpp"

namespace scenesearch::hypercolumn {

inline constexpr std::size_t kPhiDim = 2 * kBlockCount;

// Per-block mean activation maps of one keyframe, blocks 1..5 in order, each
// at its native resolution.
struct ActivationBundle {
  std::vector<Tensor> block_maps;

  static ActivationBundle load(const std::filesystem::path& keyframe_dir, ShotId shot);
};

struct HypercolumnFeatures {
  std::vector<Tensor> maps;  // Gaussian-weighted, each [S, S]
  Tensor phi;                // [mean_1, std_1, ..., mean_5, std_5]
};

/// Align-corners bilinear resampling of a rank-2 map to [size, size]. An
/// output of the input's own size is a bit-exact copy.
Tensor bilinear_resize(const Tensor& map, std::size_t size);

/// exp(-((r-c)^2 + (q-c)^2) / (2 sigma^2)) with c = (size-1)/2 and
/// sigma = sigma_b * size. The continuous peak is 1, so for odd sizes the
/// center pixel is exactly 1.
Tensor gaussian_center_map(std::size_t size, double sigma_b);

/// Resizes each block map to S x S and weights it by the center Gaussian G.
/// For each block, mean = mean(G * m) and std = the G-weighted population
/// standard deviation of m. Throws Error(incomplete_bundle) unless exactly
/// five maps are present.
HypercolumnFeatures build_hypercolumns(const ActivationBundle& bundle, const EngineConfig& config);

using PhiTable = std::map<ShotId, Tensor>;

/// phi for every shot in the dataset. When `cache_dir` is set, existing
/// `<shot_id>.phi.tnsr` files are reused and missing ones written.
PhiTable compute_phi_table(const Dataset& dataset, const EngineConfig& config, unsigned threads,
                           const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

std::string phi_file_name(ShotId shot);

}  // namespace scenesearch::hypercolumn
