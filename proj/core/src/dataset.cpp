// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include "scenesearch/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "jsonl.hpp"
#include "scenesearch/error.hpp"
#include "scenesearch/tensor_io.hpp"

namespace scenesearch {

namespace fs = std::filesystem;
using detail::field;
using detail::json;

std::optional<PartOfSpeech> parse_pos(std::string_view tag) {
  if (tag == "NN") return PartOfSpeech::NN;
  if (tag == "NNS") return PartOfSpeech::NNS;
  if (tag == "NNP") return PartOfSpeech::NNP;
  if (tag == "NNPS") return PartOfSpeech::NNPS;
  if (tag == "FW") return PartOfSpeech::FW;
  return std::nullopt;
}

std::string_view pos_name(PartOfSpeech pos) {
  switch (pos) {
    case PartOfSpeech::NN: return "NN";
    case PartOfSpeech::NNS: return "NNS";
    case PartOfSpeech::NNP: return "NNP";
    case PartOfSpeech::NNPS: return "NNPS";
    case PartOfSpeech::FW: return "FW";
  }
  return "NN";
}

std::string fc6_file_name(ShotId shot) { return std::to_string(shot) + ".fc6.tnsr"; }

std::string block_file_name(ShotId shot, std::size_t block) {
  return std::to_string(shot) + ".block" + std::to_string(block) + ".tnsr";
}

std::optional<std::size_t> Video::shot_index(ShotId id) const {
  auto it = std::lower_bound(shots.begin(), shots.end(), id,
                             [](const Shot& s, ShotId v) { return s.shot_id < v; });
  if (it == shots.end() || it->shot_id != id) return std::nullopt;
  return static_cast<std::size_t>(it - shots.begin());
}

std::span<const Shot> Video::shots_of(const Scene& scene) const {
  const auto first = shot_index(scene.first_shot);
  const auto last = shot_index(scene.last_shot);
  if (!first || !last || *last < *first) return {};
  return std::span<const Shot>(shots).subspan(*first, *last - *first + 1);
}

const Scene* Video::scene_of(ShotId id) const {
  for (const auto& scene : scenes) {
    if (scene.first_shot <= id && id <= scene.last_shot) return &scene;
  }
  return nullptr;
}

const Video* Dataset::video(VideoId id) const {
  auto it = std::lower_bound(videos.begin(), videos.end(), id,
                             [](const Video& v, VideoId x) { return v.id() < x; });
  if (it == videos.end() || it->id() != id) return nullptr;
  return &*it;
}

fs::path Dataset::keyframe_file(const Video& video, ShotId shot, std::string_view suffix) const {
  return video.entry.keyframe_feature_dir / (std::to_string(shot) + std::string(suffix));
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

class Collector {
 public:
  void add(Errc code, std::string message) { violations_.push_back({code, std::move(message)}); }
  bool empty() const { return violations_.empty(); }
  std::vector<Violation> take() { return std::move(violations_); }

  // Runs fn, turning a thrown Error into a violation. Returns false on failure.
  template <typename Fn>
  bool guard(const std::string& where, Fn&& fn) {
    try {
      fn();
      return true;
    } catch (const Error& e) {
      add(e.code(), where + ": " + e.detail());
    } catch (const std::invalid_argument& e) {
      add(Errc::parse, where + ": " + e.what());
    } catch (const json::exception& e) {
      add(Errc::parse, where + ": " + e.what());
    }
    return false;
  }

 private:
  std::vector<Violation> violations_;
};

std::string where(const fs::path& file, std::size_t line) { return file.string() + ":" + std::to_string(line); }

bool is_lowercase(const std::string& s) {
  return std::none_of(s.begin(), s.end(), [](unsigned char c) { return std::isupper(c) != 0; });
}

void load_shots(Video& video, Collector& errors) {
  const auto& file = video.entry.shots_file;
  std::vector<detail::JsonLine> rows;
  if (!errors.guard(file.string(), [&] { rows = detail::read_jsonl(file); })) return;
  for (const auto& row : rows) {
    errors.guard(where(file, row.line_number), [&] {
      Shot s;
      s.shot_id = field<ShotId>(row.value, "shot_id");
      s.video_id = field<VideoId>(row.value, "video_id");
      s.t_start = field<double>(row.value, "t_start");
      s.t_end = field<double>(row.value, "t_end");
      if (s.video_id != video.id()) {
        throw Error(Errc::bad_reference, "shot " + std::to_string(s.shot_id) + " claims video " +
                                             std::to_string(s.video_id));
      }
      if (!std::isfinite(s.t_start) || !std::isfinite(s.t_end) || s.t_start < 0 || !(s.t_start < s.t_end)) {
        throw Error(Errc::parse, "shot " + std::to_string(s.shot_id) + " needs 0 <= t_start < t_end");
      }
      video.shots.push_back(s);
    });
  }
  std::sort(video.shots.begin(), video.shots.end(),
            [](const Shot& a, const Shot& b) { return a.shot_id < b.shot_id; });
  for (std::size_t i = 1; i < video.shots.size(); ++i) {
    const auto& prev = video.shots[i - 1];
    const auto& cur = video.shots[i];
    if (prev.shot_id == cur.shot_id) {
      errors.add(Errc::duplicate_id, file.string() + ": shot id " + std::to_string(cur.shot_id) + " repeated");
    } else if (cur.t_start < prev.t_end) {
      errors.add(Errc::bad_partition, file.string() + ": shot " + std::to_string(cur.shot_id) +
                                          " overlaps or precedes shot " + std::to_string(prev.shot_id));
    }
  }
}

void load_scenes(Video& video, Collector& errors) {
  const auto& file = video.entry.scenes_file;
  std::vector<detail::JsonLine> rows;
  if (!errors.guard(file.string(), [&] { rows = detail::read_jsonl(file); })) return;
  for (const auto& row : rows) {
    errors.guard(where(file, row.line_number), [&] {
      Scene s;
      s.scene_id = field<SceneId>(row.value, "scene_id");
      s.video_id = field<VideoId>(row.value, "video_id");
      const auto span = field<std::vector<ShotId>>(row.value, "shot_span");
      if (span.size() != 2) throw std::invalid_argument("\"shot_span\" must be [first, last]");
      s.first_shot = span[0];
      s.last_shot = span[1];
      if (s.video_id != video.id()) {
        throw Error(Errc::bad_reference, "scene " + std::to_string(s.scene_id) + " claims video " +
                                             std::to_string(s.video_id));
      }
      video.scenes.push_back(s);
    });
  }
  std::sort(video.scenes.begin(), video.scenes.end(),
            [](const Scene& a, const Scene& b) { return a.scene_id < b.scene_id; });

  // Spans must be non-empty, reference existing shots, and tile the shot list.
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t i = 0; i < video.scenes.size(); ++i) {
    const auto& s = video.scenes[i];
    if (i > 0 && video.scenes[i - 1].scene_id == s.scene_id) {
      errors.add(Errc::duplicate_id, file.string() + ": scene id " + std::to_string(s.scene_id) + " repeated");
      continue;
    }
    const auto first = video.shot_index(s.first_shot);
    const auto last = video.shot_index(s.last_shot);
    if (!first || !last) {
      errors.add(Errc::bad_reference, file.string() + ": scene " + std::to_string(s.scene_id) +
                                          " references an unknown shot");
      continue;
    }
    if (*last < *first) {
      errors.add(Errc::bad_partition, file.string() + ": scene " + std::to_string(s.scene_id) + " has an empty span");
      continue;
    }
    spans.emplace_back(*first, *last);
  }
  std::sort(spans.begin(), spans.end());
  std::size_t expected = 0;
  for (const auto& [first, last] : spans) {
    if (first < expected) {
      errors.add(Errc::bad_partition, file.string() + ": scene spans overlap at shot " +
                                          std::to_string(video.shots[first].shot_id));
    } else if (first > expected) {
      errors.add(Errc::bad_partition, file.string() + ": shot " + std::to_string(video.shots[expected].shot_id) +
                                          " belongs to no scene");
    }
    expected = std::max(expected, last + 1);
  }
  if (!video.shots.empty() && expected < video.shots.size() && !spans.empty()) {
    errors.add(Errc::bad_partition, file.string() + ": shot " + std::to_string(video.shots[expected].shot_id) +
                                        " belongs to no scene");
  }
  if (video.scenes.empty() && !video.shots.empty()) {
    errors.add(Errc::bad_partition, file.string() + ": video has shots but no scenes");
  }
}

void load_tokens(Video& video, Collector& errors) {
  const auto& file = video.entry.transcript_file;
  std::vector<detail::JsonLine> rows;
  if (!errors.guard(file.string(), [&] { rows = detail::read_jsonl(file); })) return;
  const double duration = video.duration();
  for (const auto& row : rows) {
    errors.guard(where(file, row.line_number), [&] {
      TranscriptToken tok;
      tok.video_id = field<VideoId>(row.value, "video_id");
      tok.t = field<double>(row.value, "t");
      tok.surface = field<std::string>(row.value, "surface");
      tok.lemma = field<std::string>(row.value, "lemma");
      const auto pos = parse_pos(field<std::string>(row.value, "pos"));
      if (!pos) throw std::invalid_argument("\"pos\" must be one of NN, NNS, NNP, NNPS, FW");
      tok.pos = *pos;
      if (tok.video_id != video.id()) {
        throw Error(Errc::bad_reference, "token claims video " + std::to_string(tok.video_id));
      }
      if (tok.lemma.empty() || !is_lowercase(tok.lemma)) {
        throw std::invalid_argument("lemma must be non-empty and lowercase");
      }
      if (!std::isfinite(tok.t) || tok.t < 0.0 || tok.t > duration) {
        throw Error(Errc::bad_reference, "token time " + std::to_string(tok.t) + " outside [0, " +
                                             std::to_string(duration) + "]");
      }
      video.tokens.push_back(std::move(tok));
    });
  }
  std::stable_sort(video.tokens.begin(), video.tokens.end(),
                   [](const TranscriptToken& a, const TranscriptToken& b) { return a.t < b.t; });
}

void load_keyframes(Video& video, Collector& errors) {
  const auto& dir = video.entry.keyframe_feature_dir;
  if (!fs::is_directory(dir)) {
    errors.add(Errc::missing_file, dir.string() + ": keyframe feature directory not found");
    return;
  }
  video.fc6.resize(video.shots.size());
  for (std::size_t i = 0; i < video.shots.size(); ++i) {
    const auto id = video.shots[i].shot_id;
    const auto fc6 = dir / fc6_file_name(id);
    errors.guard(fc6.string(), [&] {
      if (!fs::exists(fc6)) throw Error(Errc::missing_file, "fc6 features missing");
      Tensor t = load_tensor(fc6);
      if (t.dims() != Tensor::Dims{kFc6Dim}) {
        throw Error(Errc::bad_dims, "fc6 tensor must have dims [" + std::to_string(kFc6Dim) + "]");
      }
      video.fc6[i] = std::move(t);
    });
    for (std::size_t b = 1; b <= kBlockCount; ++b) {
      const auto block = dir / block_file_name(id, b);
      errors.guard(block.string(), [&] {
        if (!fs::exists(block)) throw Error(Errc::missing_file, "block map missing");
        if (load_tensor(block).rank() != 2) throw Error(Errc::bad_dims, "block map must be rank 2");
      });
    }
  }
}

void load_corpus(Dataset& ds, Collector& errors) {
  const auto& dir = ds.manifest.corpus_dir;
  if (!fs::is_directory(dir)) {
    errors.add(Errc::missing_file, dir.string() + ": corpus directory not found");
    return;
  }
  std::vector<fs::path> categories;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) categories.push_back(entry.path());
  }
  std::sort(categories.begin(), categories.end());
  for (const auto& cat : categories) {
    errors.guard(cat.string(), [&] {
      CorpusEntry e;
      e.category_id = cat.filename().string();
      const auto meta = detail::read_json_file(cat / "synset.json");
      e.synset_words = field<std::vector<std::string>>(meta, "words");
      e.features = load_tensor(cat / "features.tnsr");
      if (e.features.rank() != 2 || e.features.cols() != kFc6Dim) {
        throw Error(Errc::bad_dims, "features.tnsr must be [n, " + std::to_string(kFc6Dim) + "]");
      }
      ds.corpus.push_back(std::move(e));
    });
  }
}

void load_votes(Dataset& ds, const fs::path& file, Collector& errors) {
  std::vector<detail::JsonLine> rows;
  if (!errors.guard(file.string(), [&] { rows = detail::read_jsonl(file); })) return;
  std::map<ShotId, const Video*> owner;
  for (const auto& v : ds.videos) {
    for (const auto& s : v.shots) owner[s.shot_id] = &v;
  }
  std::set<ShotId> seen;
  for (const auto& row : rows) {
    errors.guard(where(file, row.line_number), [&] {
      VoteRecord r;
      r.scene_id = field<SceneId>(row.value, "scene_id");
      r.shot_id = field<ShotId>(row.value, "shot_id");
      r.votes = field<int>(row.value, "votes");
      if (r.votes < 0) throw std::invalid_argument("votes must be >= 0");
      auto it = owner.find(r.shot_id);
      if (it == owner.end()) throw Error(Errc::bad_reference, "unknown shot " + std::to_string(r.shot_id));
      r.video_id = it->second->id();
      if (row.value.contains("video_id") && field<VideoId>(row.value, "video_id") != r.video_id) {
        throw Error(Errc::bad_reference, "shot " + std::to_string(r.shot_id) + " is not in the stated video");
      }
      const Scene* scene = it->second->scene_of(r.shot_id);
      if (scene == nullptr || scene->scene_id != r.scene_id) {
        throw Error(Errc::bad_reference, "shot " + std::to_string(r.shot_id) + " is not in scene " +
                                             std::to_string(r.scene_id));
      }
      if (!seen.insert(r.shot_id).second) {
        throw Error(Errc::duplicate_id, "shot " + std::to_string(r.shot_id) + " voted twice");
      }
      ds.votes.push_back(r);
    });
  }
  std::sort(ds.votes.begin(), ds.votes.end(), [](const VoteRecord& a, const VoteRecord& b) {
    return std::tie(a.video_id, a.scene_id, a.shot_id) < std::tie(b.video_id, b.scene_id, b.shot_id);
  });
}

}  // namespace

DatasetManifest load_manifest(const fs::path& manifest_path) {
  if (!fs::exists(manifest_path)) throw Error(Errc::missing_file, manifest_path.string() + " not found");
  const json doc = detail::read_json_file(manifest_path);
  const fs::path base = manifest_path.parent_path();
  DatasetManifest m;
  m.manifest_path = manifest_path;
  try {
    for (const auto& v : field<json>(doc, "videos")) {
      VideoEntry e;
      e.video_id = field<VideoId>(v, "video_id");
      e.title = v.value("title", "video " + std::to_string(e.video_id));
      e.transcript_file = resolve(base, field<std::string>(v, "transcript_file"));
      e.shots_file = resolve(base, field<std::string>(v, "shots_file"));
      e.scenes_file = resolve(base, field<std::string>(v, "scenes_file"));
      e.keyframe_feature_dir = resolve(base, field<std::string>(v, "keyframe_feature_dir"));
      m.videos.push_back(std::move(e));
    }
    m.embedding_file = resolve(base, field<std::string>(doc, "embedding_file"));
    m.embedding_vocab_file = resolve(base, field<std::string>(doc, "embedding_vocab_file"));
    m.corpus_dir = resolve(base, field<std::string>(doc, "corpus_dir"));
    if (doc.contains("votes_file") && !doc["votes_file"].is_null()) {
      m.votes_file = resolve(base, field<std::string>(doc, "votes_file"));
    }
  } catch (const std::invalid_argument& e) {
    throw Error(Errc::parse, manifest_path.string() + ": " + e.what());
  }
  std::sort(m.videos.begin(), m.videos.end(),
            [](const VideoEntry& a, const VideoEntry& b) { return a.video_id < b.video_id; });
  return m;
}

Dataset load_dataset(const fs::path& manifest_path) {
  Dataset ds;
  ds.manifest = load_manifest(manifest_path);
  Collector errors;

  for (std::size_t i = 1; i < ds.manifest.videos.size(); ++i) {
    if (ds.manifest.videos[i].video_id == ds.manifest.videos[i - 1].video_id) {
      errors.add(Errc::duplicate_id, "video id " + std::to_string(ds.manifest.videos[i].video_id) + " repeated");
    }
  }

  std::map<ShotId, VideoId> shot_owner;
  for (const auto& entry : ds.manifest.videos) {
    Video video;
    video.entry = entry;
    load_shots(video, errors);
    for (const auto& s : video.shots) {
      auto [it, inserted] = shot_owner.emplace(s.shot_id, video.id());
      if (!inserted && it->second != video.id()) {
        errors.add(Errc::duplicate_id, "shot id " + std::to_string(s.shot_id) + " used by videos " +
                                           std::to_string(it->second) + " and " + std::to_string(video.id()));
      }
    }
    load_scenes(video, errors);
    load_tokens(video, errors);
    load_keyframes(video, errors);
    ds.videos.push_back(std::move(video));
  }

  errors.guard(ds.manifest.embedding_file.string(), [&] {
    for (const auto& p : {ds.manifest.embedding_file, ds.manifest.embedding_vocab_file}) {
      if (!fs::exists(p)) throw Error(Errc::missing_file, p.string() + " not found");
    }
    ds.embeddings = embed::EmbeddingTable::load(ds.manifest.embedding_file, ds.manifest.embedding_vocab_file);
  });
  load_corpus(ds, errors);
  if (ds.manifest.votes_file) load_votes(ds, *ds.manifest.votes_file, errors);

  if (!errors.empty()) throw DatasetError(errors.take());
  return ds;
}

std::vector<VideoStats> dataset_stats(const Dataset& dataset) {
  std::vector<VideoStats> out;
  for (const auto& v : dataset.videos) {
    std::set<std::string> lemmas;
    for (const auto& t : v.tokens) lemmas.insert(t.lemma);
    out.push_back({v.id(), v.entry.title, v.shots.size(), v.scenes.size(), lemmas.size()});
  }
  return out;
}

std::string format_stats_line(const VideoStats& s) {
  return s.title + ", " + std::to_string(s.shots) + ", " + std::to_string(s.scenes) + ", " +
         std::to_string(s.unigrams);
}

}  // namespace scenesearch
