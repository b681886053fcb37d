// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scenesearch/aesrank.hpp"
#include "scenesearch/concepts.hpp"
#include "scenesearch/config.hpp"
#include "scenesearch/dataset.hpp"
#include "scenesearch/embedding.hpp"
#include "scenesearch/hypercolumn.hpp"

namespace scenesearch::engine {

struct Posting {
  VideoId video_id = 0;
  SceneId scene_id = 0;
  ShotId shot_id = 0;
  double p = 0.0;  // P(s, u), in (0, 1)

  friend bool operator==(const Posting&, const Posting&) = default;
};

struct SceneShots {
  VideoId video_id = 0;
  SceneId scene_id = 0;
  std::vector<ShotId> shots;

  friend bool operator==(const SceneShots&, const SceneShots&) = default;
};

/// Everything the online stage needs: per-lemma postings of visually confirmed
/// shots, the precomputed aesthetic score of every keyframe, and the scene
/// layout. In memory the values are doubles; the index file stores f32.
struct Index {
  std::map<std::string, std::vector<Posting>, std::less<>> postings;  // sorted by (video, scene, shot)
  std::map<ShotId, double> aesthetic;
  std::vector<SceneShots> scenes;  // sorted by (video, scene)
  Tensor vocabulary_vectors;       // [lemmas, dim], rows in postings key order

  std::vector<std::string> vocabulary() const;
  std::span<const Posting> find(std::string_view lemma) const;
};

struct BuildReport {
  std::size_t tokens = 0;
  std::size_t skipped_unmapped = 0;       // lemma without embedding or category
  std::size_t skipped_no_classifier = 0;  // mapped category was never trained
  std::size_t tokens_without_shots = 0;   // no shot inside the candidate window
  std::size_t postings = 0;
};

std::vector<SceneShots> scene_layout(const Dataset& dataset);

/// Offline stage. Every token occurrence u@t_u is scored against the shots in
/// its candidate window with P(s, u); repeated occurrences of u near the same
/// shot keep the maximum. Every keyframe gets its rank score. The result does
/// not depend on `threads`.
Index build_index(const Dataset& dataset, const std::map<std::string, std::string>& concept_of_lemma,
                  const concepts::ClassifierSet& classifiers, const aesrank::RankModel& model,
                  const hypercolumn::PhiTable& phi, const EngineConfig& config, unsigned threads,
                  BuildReport* report = nullptr);

struct SceneScore {
  double score = 0.0;
  bool matched = false;       // at least one posting for u in the scene
  ShotId best_shot = 0;       // maximizer of the blended score
  ShotId best_aesthetic = 0;  // maximizer of the aesthetic score
};

/// R = max over shots s of (alpha * P(s,u) + (1 - alpha) * aesthetic(s)), with
/// P = 0 for shots lacking a posting. Ties pick the smallest shot id.
SceneScore evaluate_scene(const SceneShots& scene, std::span<const Posting> postings_of_u, const Index& index,
                          double alpha);
double score_scene(const SceneShots& scene, std::string_view u, const Index& index, double alpha);

enum class ThumbnailMode {
  aesthetic,  // best keyframe by aesthetic score over the whole scene
  blended,    // keyframe of the shot maximizing the blended score
};

struct QueryOptions {
  double alpha = 0.5;
  std::size_t k = 10;  // 0 returns every candidate
  bool include_unmatched = false;
  ThumbnailMode thumbnail = ThumbnailMode::aesthetic;
};

struct ResultEntry {
  std::size_t rank = 0;  // 1-based
  VideoId video_id = 0;
  SceneId scene_id = 0;
  ShotId shot_id = 0;  // thumbnail keyframe
  double score = 0.0;
  std::string lemma;

  friend bool operator==(const ResultEntry&, const ResultEntry&) = default;
};

struct QueryResult {
  std::string query;
  std::string lemma;  // matched index lemma
  std::vector<ResultEntry> entries;
};

/// Online stage: embed the query, match it to the closest indexed lemma u,
/// score candidate scenes by R, sort descending with ties broken by
/// ascending (video, scene), and keep the top k. Error(unknown_query) when no
/// query word has an embedding; an empty candidate set is an empty result.
QueryResult query(const Index& index, const embed::EmbeddingTable& table, std::string_view q,
                  const QueryOptions& options);

struct EvaluationBlock {
  std::string query;
  std::optional<std::string> error;
  QueryResult result;
};

std::vector<std::string> load_queries(const std::filesystem::path& path);

std::vector<EvaluationBlock> evaluate_retrieval(const Index& index, const embed::EmbeddingTable& table,
                                                std::span<const std::string> queries, const QueryOptions& options);

// {"rank", "video_id", "scene_id", "shot_id", "score", "concept"} per line.
std::string format_result_lines(const QueryResult& result);
std::string format_result_pretty(const QueryResult& result);
// One JSON object per query; `thumbnail_path` maps a result to its keyframe location.
std::string format_report_line(const EvaluationBlock& block,
                               const std::function<std::string(VideoId, ShotId)>& thumbnail_path);

// Index file: sectioned little-endian binary.
//
//   magic "SCNINDX1" | u32 version | u64 n | n bytes vocabulary JSON
//   postings:  u32 lemmas, then per lemma in vocabulary order
//              u32 count, count x {u32 video, u32 scene, u32 shot, f32 P}
//   aesthetic: u32 count, count x {u32 shot, f32 score}
inline constexpr char kIndexMagic[8] = {'S', 'C', 'N', 'I', 'N', 'D', 'X', '1'};
inline constexpr std::uint32_t kIndexVersion = 1;

std::vector<std::uint8_t> encode_index(const Index& index);
Index decode_index(std::span<const std::uint8_t> bytes);
void save_index(const std::filesystem::path& path, const Index& index);
/// Error(index_missing) when the file does not exist.
Index load_index(const std::filesystem::path& path);

}  // namespace scenesearch::engine
