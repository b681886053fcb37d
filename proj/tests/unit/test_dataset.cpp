// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include <gtest/gtest.h>

#include <fstream>
#include <json.hpp>

#include "pipeline.hpp"
#include "scenesearch/dataset.hpp"
#include "scenesearch/error.hpp"
#include "scenesearch/fixture.hpp"
#include "scenesearch/tensor_io.hpp"

using namespace scenesearch;
using testing_support::TempDir;

namespace {

fixture::FixtureOptions small_options() {
  fixture::FixtureOptions o;
  o.videos = 2;
  o.shots_per_video = 12;
  o.scenes_per_video = 3;
  o.vocabulary = 6;
  o.exemplars_per_category = 3;
  return o;
}

DatasetError load_error(const std::filesystem::path& manifest) {
  try {
    load_dataset(manifest);
  } catch (const DatasetError& e) {
    return e;
  }
  ADD_FAILURE() << "dataset loaded despite a broken reference";
  return DatasetError({});
}

void rewrite_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::trunc);
  for (const auto& l : lines) out << l << '\n';
}

}  // namespace

TEST(Dataset, GeneratedFixtureLoads) {
  TempDir dir("dataset");
  const auto summary = fixture::generate_fixture(dir.path(), small_options());
  const auto ds = load_dataset(summary.manifest);
  ASSERT_EQ(ds.videos.size(), 2u);
  EXPECT_EQ(ds.videos[0].shots.size(), 12u);
  EXPECT_EQ(ds.videos[0].scenes.size(), 3u);
  EXPECT_EQ(ds.videos[0].fc6.size(), 12u);
  EXPECT_EQ(ds.videos[0].fc6[0].dims(), Tensor::Dims{kFc6Dim});
  EXPECT_EQ(ds.corpus.size(), 6u);
  EXPECT_FALSE(ds.votes.empty());
  for (const auto& v : ds.videos) {
    for (std::size_t i = 1; i < v.shots.size(); ++i) EXPECT_LT(v.shots[i - 1].shot_id, v.shots[i].shot_id);
    for (std::size_t i = 1; i < v.tokens.size(); ++i) EXPECT_LE(v.tokens[i - 1].t, v.tokens[i].t);
  }
}

TEST(Dataset, StatsLineForFullSizeVideo) {
  TempDir dir("stats");
  auto o = small_options();
  o.videos = 1;
  o.shots_per_video = 450;
  o.scenes_per_video = 66;
  const auto ds = load_dataset(fixture::generate_fixture(dir.path(), o).manifest);
  const auto stats = dataset_stats(ds);
  ASSERT_EQ(stats.size(), 1u);
  const auto line = format_stats_line(stats[0]);
  EXPECT_EQ(line.rfind("From Pole to Pole, 450, 66, ", 0), 0u) << line;
}

TEST(Dataset, LoadIsDeterministic) {
  TempDir dir("determinism");
  const auto manifest = fixture::generate_fixture(dir.path(), small_options()).manifest;
  const auto a = load_dataset(manifest);
  const auto b = load_dataset(manifest);
  ASSERT_EQ(a.videos.size(), b.videos.size());
  for (std::size_t v = 0; v < a.videos.size(); ++v) {
    ASSERT_EQ(a.videos[v].shots.size(), b.videos[v].shots.size());
    for (std::size_t s = 0; s < a.videos[v].shots.size(); ++s) {
      EXPECT_EQ(a.videos[v].shots[s].shot_id, b.videos[v].shots[s].shot_id);
      EXPECT_EQ(a.videos[v].fc6[s], b.videos[v].fc6[s]);
    }
  }
}

TEST(Dataset, MissingTensorFile) {
  TempDir dir("missing");
  const auto summary = fixture::generate_fixture(dir.path(), small_options());
  std::filesystem::remove(dir.path() / "video_1/keyframes" / fc6_file_name(3));
  const auto e = load_error(summary.manifest);
  EXPECT_TRUE(e.has(Errc::missing_file));
}

TEST(Dataset, OverlappingSceneSpans) {
  TempDir dir("overlap");
  const auto summary = fixture::generate_fixture(dir.path(), small_options());
  rewrite_lines(dir.path() / "video_1/scenes.jsonl",
                {R"({"scene_id":1,"video_id":1,"shot_span":[1,6]})", R"({"scene_id":2,"video_id":1,"shot_span":[5,12]})"});
  const auto e = load_error(summary.manifest);
  EXPECT_TRUE(e.has(Errc::bad_partition));
}

TEST(Dataset, EveryViolationIsReported) {
  TempDir dir("many");
  const auto summary = fixture::generate_fixture(dir.path(), small_options());
  std::filesystem::remove(dir.path() / "video_2/keyframes" / block_file_name(14, 3));
  rewrite_lines(dir.path() / "video_1/scenes.jsonl",
                {R"({"scene_id":1,"video_id":1,"shot_span":[1,6]})", R"({"scene_id":2,"video_id":1,"shot_span":[8,12]})"});
  rewrite_lines(dir.path() / "video_1/transcript.jsonl",
                {R"({"video_id":1,"t":1.0,"surface":"Penguin","lemma":"Penguin","pos":"NN"})",
                 R"({"video_id":1,"t":2.0,"surface":"ant","lemma":"ant","pos":"VB"})"});
  const auto e = load_error(summary.manifest);
  EXPECT_TRUE(e.has(Errc::missing_file));
  EXPECT_TRUE(e.has(Errc::bad_partition));
  EXPECT_TRUE(e.has(Errc::parse));
  EXPECT_GE(e.violations().size(), 4u);
}

TEST(Dataset, DuplicateShotIdAcrossVideos) {
  TempDir dir("dupe");
  const auto summary = fixture::generate_fixture(dir.path(), small_options());
  std::ifstream in(dir.path() / "video_2/shots.jsonl");
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  auto first = nlohmann::json::parse(lines[0]);
  first["shot_id"] = 1;
  lines[0] = first.dump();
  in.close();
  rewrite_lines(dir.path() / "video_2/shots.jsonl", lines);
  const auto e = load_error(summary.manifest);
  EXPECT_TRUE(e.has(Errc::duplicate_id));
}

TEST(Dataset, WrongFc6Dimension) {
  TempDir dir("dims");
  const auto summary = fixture::generate_fixture(dir.path(), small_options());
  save_tensor(dir.path() / "video_1/keyframes" / fc6_file_name(2), Tensor({16}, std::vector<float>(16, 1.0f)));
  const auto e = load_error(summary.manifest);
  EXPECT_TRUE(e.has(Errc::bad_dims));
}

TEST(Dataset, ManifestPathsResolveRelativeToManifest) {
  TempDir dir("manifest");
  const auto summary = fixture::generate_fixture(dir.path(), small_options());
  const auto m = load_manifest(summary.manifest);
  EXPECT_EQ(m.corpus_dir, dir.path() / "corpus");
  ASSERT_TRUE(m.votes_file.has_value());
  EXPECT_TRUE(std::filesystem::exists(*m.votes_file));
}

TEST(Dataset, PartOfSpeechTags) {
  for (const char* tag : {"NN", "NNS", "NNP", "NNPS", "FW"}) {
    const auto pos = parse_pos(tag);
    ASSERT_TRUE(pos.has_value());
    EXPECT_EQ(pos_name(*pos), tag);
  }
  EXPECT_FALSE(parse_pos("VB").has_value());
}
