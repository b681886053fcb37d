// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scenesearch/embedding.hpp"
#include "scenesearch/tensor.hpp"

namespace scenesearch {

using VideoId = std::uint32_t;
using SceneId = std::uint32_t;
// Shot ids are unique across the whole dataset; scene ids only within a video.
using ShotId = std::uint32_t;

inline constexpr std::size_t kFc6Dim = 4096;
inline constexpr std::size_t kBlockCount = 5;

struct Shot {
  ShotId shot_id = 0;
  VideoId video_id = 0;
  double t_start = 0.0;  // seconds
  double t_end = 0.0;

  // Time of the keyframe (the middle frame).
  double t_mid() const noexcept { return 0.5 * (t_start + t_end); }
};

struct Scene {
  SceneId scene_id = 0;
  VideoId video_id = 0;
  ShotId first_shot = 0;  // inclusive span of shot ids
  ShotId last_shot = 0;
};

enum class PartOfSpeech { NN, NNS, NNP, NNPS, FW };

std::optional<PartOfSpeech> parse_pos(std::string_view tag);
std::string_view pos_name(PartOfSpeech pos);

struct TranscriptToken {
  VideoId video_id = 0;
  double t = 0.0;  // seconds
  std::string surface;
  std::string lemma;
  PartOfSpeech pos = PartOfSpeech::NN;
};

struct VideoEntry {
  VideoId video_id = 0;
  std::string title;
  std::filesystem::path transcript_file;
  std::filesystem::path shots_file;
  std::filesystem::path scenes_file;
  std::filesystem::path keyframe_feature_dir;
};

// Paths are stored resolved against the manifest's directory.
struct DatasetManifest {
  std::filesystem::path manifest_path;
  std::vector<VideoEntry> videos;
  std::filesystem::path embedding_file;
  std::filesystem::path embedding_vocab_file;
  std::filesystem::path corpus_dir;
  std::optional<std::filesystem::path> votes_file;
};

// One row of a vote sheet: how many annotators picked this keyframe.
struct VoteRecord {
  VideoId video_id = 0;
  SceneId scene_id = 0;
  ShotId shot_id = 0;
  int votes = 0;
};

struct CorpusEntry {
  std::string category_id;  // subdirectory name
  std::vector<std::string> synset_words;
  Tensor features;  // [n, kFc6Dim]
};

struct Video {
  VideoEntry entry;
  std::vector<Shot> shots;  // sorted by id, which is also time order
  std::vector<Scene> scenes;  // sorted by id
  std::vector<TranscriptToken> tokens;  // sorted by time
  std::vector<Tensor> fc6;  // parallel to shots

  VideoId id() const noexcept { return entry.video_id; }
  double duration() const noexcept { return shots.empty() ? 0.0 : shots.back().t_end; }
  std::optional<std::size_t> shot_index(ShotId id) const;
  std::span<const Shot> shots_of(const Scene& scene) const;
  const Scene* scene_of(ShotId id) const;
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<Video> videos;  // sorted by id
  embed::EmbeddingTable embeddings;
  std::vector<CorpusEntry> corpus;  // sorted by category id
  std::vector<VoteRecord> votes;

  const Video* video(VideoId id) const;
  std::filesystem::path keyframe_file(const Video& video, ShotId shot, std::string_view suffix) const;
};

DatasetManifest load_manifest(const std::filesystem::path& manifest_path);

/// Loads and cross-validates everything the manifest references. Throws
/// DatasetError listing every violation found.
Dataset load_dataset(const std::filesystem::path& manifest_path);

// Per-video summary: title, shot count, scene count, distinct noun lemmas.
struct VideoStats {
  VideoId video_id = 0;
  std::string title;
  std::size_t shots = 0;
  std::size_t scenes = 0;
  std::size_t unigrams = 0;  // distinct lemmas
};

std::vector<VideoStats> dataset_stats(const Dataset& dataset);
// "<title>, <shots>, <scenes>, <unigrams>"
std::string format_stats_line(const VideoStats& stats);

// Keyframe file names inside a video's keyframe_feature_dir.
std::string fc6_file_name(ShotId shot);
std::string block_file_name(ShotId shot, std::size_t block);  // block in 1..5

}  // namespace scenesearch
