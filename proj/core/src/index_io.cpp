// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "jsonl.hpp"
#include "scenesearch/engine.hpp"
#include "scenesearch/error.hpp"
#include "scenesearch/tensor_io.hpp"

namespace scenesearch::engine {

using detail::json;

namespace {

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(Errc::truncated, std::string("index ends inside ") + what + " at byte " + std::to_string(pos_));
    }
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    const auto v = le::get_u32(bytes_.data() + pos_);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    const auto v = le::get_u64(bytes_.data() + pos_);
    pos_ += 8;
    return v;
  }
  double f32(const char* what) {
    need(4, what);
    const float v = le::get_f32(bytes_.data() + pos_);
    if (!std::isfinite(v)) {
      throw Error(Errc::non_finite, std::string("non-finite ") + what + " at byte " + std::to_string(pos_));
    }
    pos_ += 4;
    return v;
  }
  std::string text(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_index(const Index& index) {
  json lemmas = json::array();
  for (const auto& [lemma, list] : index.postings) lemmas.push_back(lemma);
  json scenes = json::array();
  for (const auto& s : index.scenes) {
    scenes.push_back({{"video_id", s.video_id}, {"scene_id", s.scene_id}, {"shots", s.shots}});
  }
  json doc = {{"format", "scenesearch-index"},
              {"version", kIndexVersion},
              {"lemmas", std::move(lemmas)},
              {"vectors", index.vocabulary_vectors.empty() ? json(nullptr)
                                                           : json(detail::tensor_to_base64(index.vocabulary_vectors))},
              {"scenes", std::move(scenes)}};
  const std::string text = doc.dump();

  std::vector<std::uint8_t> out(kIndexMagic, kIndexMagic + sizeof(kIndexMagic));
  le::put_u32(out, kIndexVersion);
  le::put_u64(out, text.size());
  out.insert(out.end(), text.begin(), text.end());

  le::put_u32(out, static_cast<std::uint32_t>(index.postings.size()));
  for (const auto& [lemma, list] : index.postings) {
    le::put_u32(out, static_cast<std::uint32_t>(list.size()));
    for (const auto& p : list) {
      le::put_u32(out, p.video_id);
      le::put_u32(out, p.scene_id);
      le::put_u32(out, p.shot_id);
      le::put_f32(out, static_cast<float>(p.p));
    }
  }
  le::put_u32(out, static_cast<std::uint32_t>(index.aesthetic.size()));
  for (const auto& [shot, score] : index.aesthetic) {
    le::put_u32(out, shot);
    le::put_f32(out, static_cast<float>(score));
  }
  return out;
}

Index decode_index(std::span<const std::uint8_t> bytes) {
  const std::size_t probe = std::min(bytes.size(), sizeof(kIndexMagic));
  if (probe > 0 && std::memcmp(bytes.data(), kIndexMagic, probe) != 0) {
    throw Error(Errc::bad_magic, "not an index file (byte 0)");
  }
  if (bytes.size() < sizeof(kIndexMagic)) {
    throw Error(Errc::truncated, "index ends inside the magic at byte offset " + std::to_string(bytes.size()));
  }
  Reader r(bytes.subspan(sizeof(kIndexMagic)));
  const auto version = r.u32("version");
  if (version != kIndexVersion) {
    throw Error(Errc::parse, "unsupported index version " + std::to_string(version));
  }
  const auto n = r.u64("header length");
  if (n > r.remaining()) throw Error(Errc::truncated, "index header is cut short");
  const std::string text = r.text(static_cast<std::size_t>(n), "header");

  Index index;
  std::vector<std::string> lemmas;
  try {
    const auto doc = json::parse(text);
    lemmas = detail::field<std::vector<std::string>>(doc, "lemmas");
    if (doc.contains("vectors") && !doc.at("vectors").is_null()) {
      index.vocabulary_vectors = detail::tensor_from_base64(detail::field<std::string>(doc, "vectors"));
    }
    for (const auto& s : detail::field<json>(doc, "scenes")) {
      index.scenes.push_back({detail::field<VideoId>(s, "video_id"), detail::field<SceneId>(s, "scene_id"),
                              detail::field<std::vector<ShotId>>(s, "shots")});
    }
  } catch (const json::exception& e) {
    throw Error(Errc::parse, std::string("index header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(Errc::parse, std::string("index header: ") + e.what());
  }
  if (!index.vocabulary_vectors.empty() &&
      (index.vocabulary_vectors.rank() != 2 || index.vocabulary_vectors.rows() != lemmas.size())) {
    throw Error(Errc::dimension_mismatch, "index vectors do not match its lemma list");
  }

  const auto lemma_count = r.u32("postings");
  if (lemma_count != lemmas.size()) {
    throw Error(Errc::parse, "postings block has " + std::to_string(lemma_count) + " lemmas, header has " +
                                 std::to_string(lemmas.size()));
  }
  for (const auto& lemma : lemmas) {
    auto& list = index.postings[lemma];
    const auto count = r.u32("posting count");
    r.need(static_cast<std::size_t>(count) * 16, "postings");
    list.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      Posting p;
      p.video_id = r.u32("posting");
      p.scene_id = r.u32("posting");
      p.shot_id = r.u32("posting");
      p.p = r.f32("posting probability");
      list.push_back(p);
    }
  }
  const auto aesthetic_count = r.u32("aesthetic count");
  r.need(static_cast<std::size_t>(aesthetic_count) * 8, "aesthetic block");
  for (std::uint32_t i = 0; i < aesthetic_count; ++i) {
    const auto shot = r.u32("aesthetic shot");
    index.aesthetic[shot] = r.f32("aesthetic score");
  }
  if (r.remaining() != 0) {
    throw Error(Errc::trailing_bytes,
                std::to_string(r.remaining()) + " bytes after the index at byte " +
                    std::to_string(r.pos() + sizeof(kIndexMagic)));
  }
  return index;
}

void save_index(const std::filesystem::path& path, const Index& index) {
  write_file_bytes(path, encode_index(index));
}

Index load_index(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(Errc::index_missing, "no index at " + path.string() + "; run build-index first");
  }
  return decode_index(read_file_bytes(path));
}

}  // namespace scenesearch::engine
