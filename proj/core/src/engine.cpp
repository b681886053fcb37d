// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include "scenesearch/engine.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <tuple>

#include "jsonl.hpp"
#include "scenesearch/error.hpp"
#include "scenesearch/parallel.hpp"

namespace scenesearch::engine {

using detail::json;

namespace {

// Values are rounded to f32 at build time so a saved and reloaded index ranks identically.
double quantize(double v) { return static_cast<double>(static_cast<float>(v)); }

}  // namespace

std::vector<std::string> Index::vocabulary() const {
  std::vector<std::string> out;
  out.reserve(postings.size());
  for (const auto& [lemma, list] : postings) out.push_back(lemma);
  return out;
}

std::span<const Posting> Index::find(std::string_view lemma) const {
  auto it = postings.find(lemma);
  if (it == postings.end()) return {};
  return it->second;
}

std::vector<SceneShots> scene_layout(const Dataset& dataset) {
  std::vector<SceneShots> out;
  for (const auto& video : dataset.videos) {
    for (const auto& scene : video.scenes) {
      SceneShots s{video.id(), scene.scene_id, {}};
      for (const auto& shot : video.shots_of(scene)) s.shots.push_back(shot.shot_id);
      out.push_back(std::move(s));
    }
  }
  std::sort(out.begin(), out.end(), [](const SceneShots& a, const SceneShots& b) {
    return std::tie(a.video_id, a.scene_id) < std::tie(b.video_id, b.scene_id);
  });
  return out;
}

Index build_index(const Dataset& dataset, const std::map<std::string, std::string>& concept_of_lemma,
                  const concepts::ClassifierSet& classifiers, const aesrank::RankModel& model,
                  const hypercolumn::PhiTable& phi, const EngineConfig& config, unsigned threads,
                  BuildReport* report) {
  config.validate();
  BuildReport local;
  Index index;
  index.scenes = scene_layout(dataset);

  // Scene owning each shot, per video, by shot position.
  std::vector<std::vector<SceneId>> scene_of(dataset.videos.size());
  for (std::size_t v = 0; v < dataset.videos.size(); ++v) {
    const auto& video = dataset.videos[v];
    scene_of[v].assign(video.shots.size(), 0);
    for (const auto& scene : video.scenes) {
      const auto first = video.shot_index(scene.first_shot);
      const auto last = video.shot_index(scene.last_shot);
      if (!first || !last) continue;
      for (std::size_t i = *first; i <= *last; ++i) scene_of[v][i] = scene.scene_id;
    }
  }

  struct Job {
    std::size_t video;
    const TranscriptToken* token;
    const concepts::ConceptClassifier* clf;
  };
  std::vector<Job> jobs;
  for (std::size_t v = 0; v < dataset.videos.size(); ++v) {
    for (const auto& tok : dataset.videos[v].tokens) {
      ++local.tokens;
      auto mapped = concept_of_lemma.find(tok.lemma);
      if (mapped == concept_of_lemma.end()) {
        ++local.skipped_unmapped;
        continue;
      }
      auto clf = classifiers.find(mapped->second);
      if (clf == classifiers.end()) {
        ++local.skipped_no_classifier;
        continue;
      }
      jobs.push_back({v, &tok, &clf->second});
    }
  }

  // (shot position, P) per job, merged below in job order.
  std::vector<std::vector<std::pair<std::size_t, double>>> hits(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    const auto& job = jobs[j];
    const auto& video = dataset.videos[job.video];
    const auto window = concepts::candidate_shots(job.token->t, video.shots, config);
    const auto offset = static_cast<std::size_t>(window.data() - video.shots.data());
    for (std::size_t k = 0; k < window.size(); ++k) {
      const std::size_t pos = offset + k;
      const double p = concepts::visual_confirmation(*job.clf, video.shots[pos], video.fc6[pos].data(),
                                                     job.token->t, config);
      hits[j].emplace_back(pos, p);
    }
  });

  using Key = std::tuple<VideoId, SceneId, ShotId>;
  std::map<std::string, std::map<Key, double>, std::less<>> merged;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (hits[j].empty()) {
      ++local.tokens_without_shots;
      continue;
    }
    const auto& video = dataset.videos[jobs[j].video];
    auto& lemma_postings = merged[jobs[j].token->lemma];
    for (const auto& [pos, p] : hits[j]) {
      const Key key{video.id(), scene_of[jobs[j].video][pos], video.shots[pos].shot_id};
      const double q = quantize(p);
      auto [it, inserted] = lemma_postings.emplace(key, q);
      if (!inserted) it->second = std::max(it->second, q);
    }
  }

  std::vector<float> vectors;
  for (auto& [lemma, entries] : merged) {
    auto& list = index.postings[lemma];
    for (const auto& [key, p] : entries) {
      list.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), p});
    }
    local.postings += list.size();
    const auto v = dataset.embeddings.find(lemma);
    vectors.insert(vectors.end(), v.begin(), v.end());
  }
  if (!index.postings.empty()) {
    index.vocabulary_vectors = Tensor({index.postings.size(), dataset.embeddings.dim()}, std::move(vectors));
  }

  for (const auto& video : dataset.videos) {
    for (const auto& shot : video.shots) {
      auto it = phi.find(shot.shot_id);
      if (it == phi.end()) {
        throw Error(Errc::missing_features, "no phi for keyframe of shot " + std::to_string(shot.shot_id));
      }
      index.aesthetic.emplace(shot.shot_id, quantize(aesrank::rank_score(model, it->second.data())));
    }
  }

  if (report) *report = local;
  return index;
}

SceneScore evaluate_scene(const SceneShots& scene, std::span<const Posting> postings_of_u, const Index& index,
                          double alpha) {
  auto lower = std::lower_bound(postings_of_u.begin(), postings_of_u.end(), scene, [](const Posting& p, const SceneShots& s) {
    return std::tie(p.video_id, p.scene_id) < std::tie(s.video_id, s.scene_id);
  });
  auto upper = lower;
  while (upper != postings_of_u.end() && upper->video_id == scene.video_id && upper->scene_id == scene.scene_id) {
    ++upper;
  }

  SceneScore out;
  out.matched = lower != upper;
  bool first = true;
  double best_aesthetic = 0.0;
  for (ShotId shot : scene.shots) {
    auto a_it = index.aesthetic.find(shot);
    if (a_it == index.aesthetic.end()) {
      throw Error(Errc::missing_features, "index has no aesthetic score for shot " + std::to_string(shot));
    }
    const double a = a_it->second;
    double p = 0.0;
    for (auto it = lower; it != upper; ++it) {
      if (it->shot_id == shot) p = it->p;
    }
    const double blended = alpha * p + (1.0 - alpha) * a;
    if (first || blended > out.score) {
      out.score = blended;
      out.best_shot = shot;
    }
    if (first || a > best_aesthetic) {
      best_aesthetic = a;
      out.best_aesthetic = shot;
    }
    first = false;
  }
  return out;
}

double score_scene(const SceneShots& scene, std::string_view u, const Index& index, double alpha) {
  return evaluate_scene(scene, index.find(u), index, alpha).score;
}

QueryResult query(const Index& index, const embed::EmbeddingTable& table, std::string_view q,
                  const QueryOptions& options) {
  if (!(options.alpha >= 0.0 && options.alpha <= 1.0)) throw Error(Errc::invalid_config, "alpha must lie in [0, 1]");
  const auto words = embed::tokenize_query(q);
  if (words.empty()) throw Error(Errc::unknown_query, "query is empty");
  const auto qv = embed::embed_query(words, table);
  const auto lemmas = index.vocabulary();
  const auto& u = lemmas[embed::match_query_to_concept(qv, lemmas, index.vocabulary_vectors)];

  QueryResult result;
  result.query = std::string(q);
  result.lemma = u;
  const auto postings = index.find(u);

  struct Candidate {
    const SceneShots* scene;
    SceneScore score;
  };
  std::vector<Candidate> candidates;
  for (const auto& scene : index.scenes) {
    auto s = evaluate_scene(scene, postings, index, options.alpha);
    if (s.matched || options.include_unmatched) candidates.push_back({&scene, s});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score.score != b.score.score) return a.score.score > b.score.score;
    return std::tie(a.scene->video_id, a.scene->scene_id) < std::tie(b.scene->video_id, b.scene->scene_id);
  });
  const std::size_t k = options.k == 0 ? candidates.size() : std::min(options.k, candidates.size());
  for (std::size_t i = 0; i < k; ++i) {
    const auto& c = candidates[i];
    const ShotId thumb = options.thumbnail == ThumbnailMode::aesthetic ? c.score.best_aesthetic : c.score.best_shot;
    result.entries.push_back({i + 1, c.scene->video_id, c.scene->scene_id, thumb, c.score.score, u});
  }
  return result;
}

std::vector<std::string> load_queries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_file, "cannot open queries file " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(line.substr(first));
  }
  return out;
}

std::vector<EvaluationBlock> evaluate_retrieval(const Index& index, const embed::EmbeddingTable& table,
                                                std::span<const std::string> queries, const QueryOptions& options) {
  std::vector<EvaluationBlock> out;
  for (const auto& q : queries) {
    EvaluationBlock block;
    block.query = q;
    try {
      block.result = query(index, table, q, options);
    } catch (const Error& e) {
      block.error = e.what();
      block.result.query = q;
    }
    out.push_back(std::move(block));
  }
  return out;
}

namespace {

json entry_json(const ResultEntry& e) {
  return {{"rank", e.rank},         {"video_id", e.video_id}, {"scene_id", e.scene_id},
          {"shot_id", e.shot_id},   {"score", e.score},       {"concept", e.lemma}};
}

}  // namespace

std::string format_result_lines(const QueryResult& result) {
  std::string out;
  for (const auto& e : result.entries) {
    out += entry_json(e).dump();
    out += '\n';
  }
  return out;
}

std::string format_result_pretty(const QueryResult& result) {
  std::ostringstream out;
  out << "query \"" << result.query << "\" -> concept \"" << result.lemma << "\"\n";
  if (result.entries.empty()) out << "  (no matching scenes)\n";
  for (const auto& e : result.entries) {
    out << "  #" << e.rank << "  video " << e.video_id << "  scene " << e.scene_id << "  thumbnail shot "
        << e.shot_id << "  R=" << std::fixed << std::setprecision(4) << e.score << '\n';
  }
  return out.str();
}

std::string format_report_line(const EvaluationBlock& block,
                               const std::function<std::string(VideoId, ShotId)>& thumbnail_path) {
  json results = json::array();
  for (const auto& e : block.result.entries) {
    auto j = entry_json(e);
    if (thumbnail_path) j["thumbnail"] = thumbnail_path(e.video_id, e.shot_id);
    results.push_back(std::move(j));
  }
  json doc = {{"query", block.query}, {"concept", block.result.lemma}, {"results", std::move(results)}};
  if (block.error) doc["error"] = *block.error;
  return doc.dump();
}

}  // namespace scenesearch::engine
