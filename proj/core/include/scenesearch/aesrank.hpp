// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "scenesearch/dataset.hpp"
#include "scenesearch/hypercolumn.hpp"
#include "scenesearch/tensor.hpp"

namespace scenesearch::aesrank {

// Keyframes are identified by their shot (one middle-frame keyframe per shot).
struct PreferencePair {
  VideoId video_id = 0;
  SceneId scene_id = 0;
  ShotId better = 0;
  ShotId worse = 0;

  friend bool operator==(const PreferencePair&, const PreferencePair&) = default;
};

struct SceneVotes {
  VideoId video_id = 0;
  SceneId scene_id = 0;
  std::vector<std::pair<ShotId, int>> votes;  // keyframe -> times selected
};

using VoteSheet = std::vector<SceneVotes>;

VoteSheet group_votes(std::span<const VoteRecord> records);
VoteSheet load_votes(const std::filesystem::path& path, const Dataset& dataset);

/// One (better, worse) pair for every two keyframes of a scene with strictly
/// different vote counts. Equal counts yield nothing.
std::vector<PreferencePair> pairs_from_votes(const VoteSheet& votes);

/// Linear ranking model over standardized phi: score = w . (phi - mean) / std.
struct RankModel {
  Tensor w;
  Tensor feature_mean;
  Tensor feature_std;  // > 0; zero-variance components are stored as 1
  double c = 3.0;
  double objective_value = 0.0;
  std::size_t pairs = 0;
};

/// Standardizes phi over every keyframe the pairs reference, then solves
///   minimize 0.5*|w|^2 + C * sum max(0, 1 - w.(phi_i - phi_j))
/// over the standardized differences. Error(no_pairs) on an empty pair set,
/// Error(missing_features) when a referenced keyframe has no phi.
RankModel train_rank(std::span<const PreferencePair> pairs, const hypercolumn::PhiTable& phi, double c);

double rank_score(const RankModel& model, std::span<const float> phi);

/// 100 * |{(i, j) : score(i) <= score(j)}| / |pairs|. A tie counts as swapped.
double swapped_pairs_pct(std::span<const PreferencePair> pairs, const std::function<double(ShotId)>& score);
double swapped_pairs_pct(const RankModel& model, std::span<const PreferencePair> pairs,
                         const hypercolumn::PhiTable& phi);

struct LeaveOneOutRow {
  VideoId held_out = 0;
  std::string title;
  std::size_t train_pairs = 0;
  std::size_t test_pairs = 0;
  double swapped_pct = 0.0;
};

/// Trains on all videos but one and measures swapped pairs on the held-out
/// video, for every video with test pairs.
std::vector<LeaveOneOutRow> leave_one_out(const Dataset& dataset, const VoteSheet& votes,
                                          const hypercolumn::PhiTable& phi, double c);

void save_model(const std::filesystem::path& path, const RankModel& model);
RankModel load_model(const std::filesystem::path& path);

}  // namespace scenesearch::aesrank
