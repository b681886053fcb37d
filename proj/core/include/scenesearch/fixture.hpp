// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace scenesearch::fixture {

// Pins `word` as the only concept narrated and shown in one scene.
struct ScriptedConcept {
  std::size_t video = 0;  // position, not id
  std::size_t scene = 0;
  std::string word;
};

struct FixtureOptions {
  std::uint64_t seed = 1;
  std::size_t videos = 3;
  std::size_t shots_per_video = 60;
  std::size_t scenes_per_video = 10;
  std::size_t vocabulary = 50;  // one corpus category per word
  std::size_t exemplars_per_category = 8;
  std::size_t embedding_dim = 32;
  std::array<std::size_t, 5> block_sizes = {32, 16, 8, 4, 2};
  std::size_t annotators = 3;
  double vote_noise = 0.0;  // std of the per-annotator perturbation of the hidden score
  std::size_t noise_tokens_per_video = 10;
  std::vector<ScriptedConcept> scripted;
};

struct FixtureSummary {
  std::filesystem::path manifest;
  std::size_t shots = 0;
  std::size_t scenes = 0;
  std::size_t tokens = 0;
  std::vector<std::string> words;
};

/// The first n fixture words; ordinary nature nouns, then "termNN" filler.
std::vector<std::string> fixture_words(std::size_t n);

/// Writes a complete synthetic dataset (manifest, shots, scenes, transcripts,
/// keyframe tensors, embeddings, corpus, votes) under `out_dir`. Everything
/// derives from options.seed, so equal options give byte-identical files.
FixtureSummary generate_fixture(const std::filesystem::path& out_dir, const FixtureOptions& options);

}  // namespace scenesearch::fixture
