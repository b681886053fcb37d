// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include "scenesearch/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "jsonl.hpp"
#include "scenesearch/config.hpp"
#include "scenesearch/dataset.hpp"
#include "scenesearch/embedding.hpp"
#include "scenesearch/error.hpp"
#include "scenesearch/hypercolumn.hpp"
#include "scenesearch/rng.hpp"
#include "scenesearch/tensor_io.hpp"

namespace scenesearch::fixture {

namespace fs = std::filesystem;
using detail::json;

namespace {

constexpr const char* kWords[] = {
    "penguin", "calf",    "ant",     "spider",   "whale",    "seal",     "bear",     "wolf",    "eagle",
    "owl",     "shark",   "dolphin", "elephant", "lion",     "zebra",    "giraffe",  "camel",   "snake",
    "frog",    "turtle",  "crab",    "octopus",  "jellyfish", "coral",   "bat",      "monkey",  "gorilla",
    "tiger",   "leopard", "deer",    "fox",      "rabbit",   "squirrel", "beetle",   "butterfly", "bee",
    "parrot",  "flamingo", "pelican", "albatross", "walrus", "otter",    "beaver",   "salmon",  "eel",
    "lizard",  "crocodile", "hippo",  "rhino",    "buffalo",  "antelope", "caribou",  "moose",   "hare",
    "vulture", "heron",   "swan",    "goose",    "ibex",     "yak"};

constexpr const char* kTitles[] = {"From Pole to Pole", "Mountains",    "Fresh Water",  "Caves",
                                   "Deserts",           "Ice Worlds",   "Great Plains", "Jungles",
                                   "Shallow Seas",      "Seasonal Forests", "Ocean Deep"};

constexpr std::size_t kPrototypeActive = 256;

std::string padded(std::size_t value, std::size_t width) {
  std::string digits = std::to_string(value);
  return std::string(digits.size() < width ? width - digits.size() : 0, '0') + digits;
}

std::string category_id(std::size_t i) { return "n" + padded(1000 + i, 8); }

std::vector<float> prototype(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> p(kFc6Dim, 0.0f);
  for (auto d : rng.sample_without_replacement(kFc6Dim, kPrototypeActive)) {
    p[d] = static_cast<float>(rng.uniform(1.0, 3.0));
  }
  return p;
}

// Background activation: small non-negative noise on every unit.
void add_background(std::vector<float>& x, Rng& rng, double scale) {
  for (auto& v : x) v += static_cast<float>(scale * std::abs(rng.normal()));
}

Tensor block_map(std::size_t n, Rng& rng) {
  const double amp = rng.uniform(0.5, 2.0);
  const double cr = rng.uniform() * static_cast<double>(n - 1);
  const double cc = rng.uniform() * static_cast<double>(n - 1);
  const double width = rng.uniform(0.15, 0.6) * static_cast<double>(n);
  const double offset = rng.uniform(0.0, 0.5);
  std::vector<float> data(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double d2 = (r - cr) * (r - cr) + (c - cc) * (c - cc);
      data[r * n + c] =
          static_cast<float>(offset + amp * std::exp(-d2 / (2.0 * width * width)) + 0.05 * rng.uniform());
    }
  }
  return Tensor({n, n}, std::move(data));
}

// Sizes summing to total, each >= 1 and within about a third of the mean.
std::vector<std::size_t> split(std::size_t total, std::size_t parts, Rng& rng) {
  std::vector<std::size_t> sizes(parts, total / parts);
  for (std::size_t i = 0; i < total % parts; ++i) ++sizes[i];
  for (std::size_t i = 0; i + 1 < parts; ++i) {
    const std::size_t j = std::min(sizes[i], sizes[i + 1]) / 3;
    const auto shift = static_cast<std::size_t>(rng.below(2 * j + 1));
    sizes[i] = sizes[i] + shift - j;
    sizes[i + 1] = sizes[i + 1] + j - shift;
  }
  return sizes;
}

}  // namespace

std::vector<std::string> fixture_words(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < std::size(kWords)) {
      out.emplace_back(kWords[i]);
    } else {
      out.push_back("term" + padded(i, 2));
    }
  }
  return out;
}

FixtureSummary generate_fixture(const fs::path& out_dir, const FixtureOptions& options) {
  if (options.videos == 0 || options.scenes_per_video == 0 || options.shots_per_video < options.scenes_per_video) {
    throw Error(Errc::invalid_config, "fixture needs videos >= 1 and shots_per_video >= scenes_per_video >= 1");
  }
  if (options.vocabulary < 2 || options.exemplars_per_category < 2 || options.embedding_dim == 0) {
    throw Error(Errc::invalid_config, "fixture needs vocabulary >= 2, exemplars_per_category >= 2, embedding_dim >= 1");
  }
  for (auto n : options.block_sizes) {
    if (n < 2) throw Error(Errc::invalid_config, "fixture block sizes must be >= 2");
  }
  const auto words = fixture_words(options.vocabulary);
  std::set<std::string> scripted_words;
  for (const auto& s : options.scripted) {
    if (s.video >= options.videos || s.scene >= options.scenes_per_video) {
      throw Error(Errc::invalid_config, "scripted concept \"" + s.word + "\" is outside the fixture");
    }
    if (std::find(words.begin(), words.end(), s.word) == words.end()) {
      throw Error(Errc::invalid_config, "scripted concept \"" + s.word + "\" is not a fixture word");
    }
    scripted_words.insert(s.word);
  }
  std::vector<std::size_t> free_words;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!scripted_words.count(words[i])) free_words.push_back(i);
  }
  if (free_words.empty()) throw Error(Errc::invalid_config, "every fixture word is scripted");
  auto word_index = [&](const std::string& w) {
    return static_cast<std::size_t>(std::find(words.begin(), words.end(), w) - words.begin());
  };

  fs::create_directories(out_dir);
  const std::uint64_t seed = options.seed;

  // Embeddings: independent Gaussian directions, one per word.
  {
    Rng rng(derive_seed(seed, "embeddings"));
    std::vector<float> data(words.size() * options.embedding_dim);
    for (auto& v : data) v = static_cast<float>(rng.normal());
    embed::EmbeddingTable table(words, Tensor({words.size(), options.embedding_dim}, std::move(data)));
    table.save(out_dir / "embeddings.tnsr", out_dir / "embeddings.vocab.jsonl");
  }

  std::vector<std::vector<float>> prototypes;
  for (std::size_t i = 0; i < words.size(); ++i) {
    prototypes.push_back(prototype(derive_seed(seed, "prototype/" + words[i])));
  }

  for (std::size_t i = 0; i < words.size(); ++i) {
    const fs::path dir = out_dir / "corpus" / category_id(i);
    fs::create_directories(dir);
    detail::write_text_file(dir / "synset.json", json{{"words", {words[i]}}}.dump() + "\n");
    Rng rng(derive_seed(seed, "corpus/" + words[i]));
    std::vector<float> rows;
    for (std::size_t e = 0; e < options.exemplars_per_category; ++e) {
      std::vector<float> x(kFc6Dim);
      const double gain = rng.uniform(0.8, 1.2);
      for (std::size_t d = 0; d < kFc6Dim; ++d) x[d] = static_cast<float>(gain * prototypes[i][d]);
      add_background(x, rng, 0.3);
      rows.insert(rows.end(), x.begin(), x.end());
    }
    save_tensor(dir / "features.tnsr", Tensor({options.exemplars_per_category, kFc6Dim}, std::move(rows)));
  }

  // Hidden aesthetic preference used to cast the votes.
  std::vector<double> hidden(hypercolumn::kPhiDim);
  {
    Rng rng(derive_seed(seed, "hidden-aesthetic"));
    for (auto& v : hidden) v = rng.normal();
  }
  const EngineConfig phi_config;

  FixtureSummary summary;
  summary.words = words;
  json manifest_videos = json::array();
  std::vector<json> vote_rows;
  ShotId next_shot = 1;

  for (std::size_t v = 0; v < options.videos; ++v) {
    const VideoId video_id = static_cast<VideoId>(v + 1);
    const std::string vdir = "video_" + std::to_string(video_id);
    const fs::path keyframes = out_dir / vdir / "keyframes";
    fs::create_directories(keyframes);
    Rng rng(derive_seed(seed, "video/" + std::to_string(video_id)));

    const auto scene_sizes = split(options.shots_per_video, options.scenes_per_video, rng);
    std::vector<std::size_t> topic(options.scenes_per_video);
    for (auto& t : topic) t = free_words[rng.below(free_words.size())];
    for (const auto& s : options.scripted) {
      if (s.video == v) topic[s.scene] = word_index(s.word);
    }

    std::vector<json> shot_rows, scene_rows, token_rows;
    std::vector<std::pair<double, double>> scene_times;
    double t = 0.0;
    std::size_t first_index = 0;
    std::vector<ShotId> shot_ids;
    std::vector<std::vector<double>> scene_scores(options.scenes_per_video);

    for (std::size_t sc = 0; sc < options.scenes_per_video; ++sc) {
      const SceneId scene_id = static_cast<SceneId>(sc + 1);
      const ShotId first = next_shot;
      const double scene_start = t;
      // At least one shot of every scene shows the topic.
      const std::size_t guaranteed = static_cast<std::size_t>(rng.below(scene_sizes[sc]));
      for (std::size_t k = 0; k < scene_sizes[sc]; ++k) {
        const ShotId shot_id = next_shot++;
        const double duration = rng.uniform(2.0, 8.0);
        shot_rows.push_back({{"shot_id", shot_id}, {"video_id", video_id}, {"t_start", t}, {"t_end", t + duration}});
        t += duration;
        shot_ids.push_back(shot_id);

        std::vector<float> x(kFc6Dim, 0.0f);
        if (k == guaranteed || rng.uniform() < 0.7) {
          const double gain = rng.uniform(0.8, 1.2);
          for (std::size_t d = 0; d < kFc6Dim; ++d) x[d] += static_cast<float>(gain * prototypes[topic[sc]][d]);
        }
        add_background(x, rng, 0.3);
        save_tensor(keyframes / fc6_file_name(shot_id), Tensor::vector(std::move(x)));

        hypercolumn::ActivationBundle bundle;
        for (std::size_t b = 0; b < kBlockCount; ++b) {
          bundle.block_maps.push_back(block_map(options.block_sizes[b], rng));
          save_tensor(keyframes / block_file_name(shot_id, b + 1), bundle.block_maps.back());
        }
        const auto phi = hypercolumn::build_hypercolumns(bundle, phi_config).phi;
        double score = 0.0;
        for (std::size_t d = 0; d < hidden.size(); ++d) score += hidden[d] * phi[d];
        scene_scores[sc].push_back(score);
      }
      scene_rows.push_back({{"scene_id", scene_id}, {"video_id", video_id}, {"shot_span", {first, next_shot - 1}}});
      scene_times.emplace_back(scene_start, t);
      first_index += scene_sizes[sc];
    }

    auto add_token = [&](double when, std::size_t w) {
      const bool plural = rng.uniform() < 0.3;
      token_rows.push_back({{"video_id", video_id},
                            {"t", when},
                            {"surface", plural ? words[w] + "s" : words[w]},
                            {"lemma", words[w]},
                            {"pos", plural ? "NNS" : "NN"}});
    };
    for (std::size_t sc = 0; sc < options.scenes_per_video; ++sc) {
      const auto [a, b] = scene_times[sc];
      const bool is_scripted = scripted_words.count(words[topic[sc]]) > 0;
      const std::size_t mentions = is_scripted ? 2 : 1 + rng.below(3);
      for (std::size_t m = 0; m < mentions; ++m) {
        // Scripted mentions sit mid-scene so their window stays inside it.
        const double when = is_scripted ? a + (b - a) * (0.45 + 0.1 * static_cast<double>(m)) : rng.uniform(a, b);
        add_token(when, topic[sc]);
      }
    }
    for (std::size_t n = 0; n < options.noise_tokens_per_video; ++n) {
      add_token(rng.uniform(0.0, t), free_words[rng.below(free_words.size())]);
    }
    if (options.noise_tokens_per_video > 0) {
      // A narrated noun with no embedding.
      token_rows.push_back({{"video_id", video_id}, {"t", rng.uniform(0.0, t)}, {"surface", "planet"},
                            {"lemma", "planet"}, {"pos", "NN"}});
    }
    std::stable_sort(token_rows.begin(), token_rows.end(),
                     [](const json& x, const json& y) { return x["t"].get<double>() < y["t"].get<double>(); });

    std::size_t offset = 0;
    for (std::size_t sc = 0; sc < options.scenes_per_video; ++sc) {
      const auto& scores = scene_scores[sc];
      std::vector<int> votes(scores.size(), 0);
      if (scores.size() >= 2) {
        for (std::size_t a = 0; a < options.annotators; ++a) {
          std::size_t best = 0;
          double best_value = 0.0;
          for (std::size_t k = 0; k < scores.size(); ++k) {
            const double value = scores[k] + options.vote_noise * rng.normal();
            if (k == 0 || value > best_value) {
              best = k;
              best_value = value;
            }
          }
          ++votes[best];
        }
        for (std::size_t k = 0; k < scores.size(); ++k) {
          vote_rows.push_back({{"video_id", video_id},
                               {"scene_id", sc + 1},
                               {"shot_id", shot_ids[offset + k]},
                               {"votes", votes[k]}});
        }
      }
      offset += scores.size();
    }

    detail::write_jsonl(out_dir / vdir / "shots.jsonl", shot_rows);
    detail::write_jsonl(out_dir / vdir / "scenes.jsonl", scene_rows);
    detail::write_jsonl(out_dir / vdir / "transcript.jsonl", token_rows);
    manifest_videos.push_back({{"video_id", video_id},
                               {"title", kTitles[v % std::size(kTitles)]},
                               {"transcript_file", vdir + "/transcript.jsonl"},
                               {"shots_file", vdir + "/shots.jsonl"},
                               {"scenes_file", vdir + "/scenes.jsonl"},
                               {"keyframe_feature_dir", vdir + "/keyframes"}});
    summary.shots += shot_rows.size();
    summary.scenes += scene_rows.size();
    summary.tokens += token_rows.size();
  }

  detail::write_jsonl(out_dir / "votes.jsonl", vote_rows);
  const json manifest = {{"videos", std::move(manifest_videos)},
                         {"embedding_file", "embeddings.tnsr"},
                         {"embedding_vocab_file", "embeddings.vocab.jsonl"},
                         {"corpus_dir", "corpus"},
                         {"votes_file", "votes.jsonl"}};
  summary.manifest = out_dir / "manifest.json";
  detail::write_text_file(summary.manifest, manifest.dump(2) + "\n");
  return summary;
}

}  // namespace scenesearch::fixture
