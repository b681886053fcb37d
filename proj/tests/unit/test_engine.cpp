// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"
#include "scenesearch/engine.hpp"
#include "scenesearch/error.hpp"
#include "scenesearch/rng.hpp"

using namespace scenesearch;
using namespace scenesearch::engine;
using testing_support::TempDir;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::usage;
}

// Two lemmas with orthogonal embeddings over one video of two scenes.
struct Toy {
  Index index;
  embed::EmbeddingTable table;
};

Toy toy(std::vector<Posting> ant, std::vector<Posting> spider, std::map<ShotId, double> aesthetic) {
  Toy t;
  t.index.scenes = {{1, 1, {1, 2, 3}}, {1, 2, {4, 5}}};
  t.index.aesthetic = std::move(aesthetic);
  t.index.postings["ant"] = std::move(ant);
  t.index.postings["spider"] = std::move(spider);
  t.index.vocabulary_vectors = Tensor({2, 2}, {1.0f, 0.0f, 0.0f, 1.0f});
  t.table = embed::EmbeddingTable({"ant", "spider"}, Tensor({2, 2}, {1.0f, 0.0f, 0.0f, 1.0f}));
  return t;
}

fixture::FixtureOptions small_options() {
  fixture::FixtureOptions o;
  o.videos = 2;
  o.shots_per_video = 24;
  o.scenes_per_video = 4;
  o.vocabulary = 10;
  o.exemplars_per_category = 4;
  return o;
}

}  // namespace

TEST(ScoreScene, BlendExample) {
  Index index;
  const SceneShots scene{1, 1, {1, 2}};
  index.scenes = {scene};
  index.aesthetic = {{1, 0.2}, {2, 0.5}};
  index.postings["u"] = {{1, 1, 1, 0.4}, {1, 1, 2, 0.7}};
  EXPECT_EQ(score_scene(scene, "u", index, 0.5), 0.6);
  EXPECT_EQ(evaluate_scene(scene, index.find("u"), index, 0.5).best_shot, 2u);
}

TEST(ScoreScene, DegenerateBlends) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    Index index;
    SceneShots scene{1, 1, {}};
    std::vector<Posting> postings;
    double p_max = 0.0, a_max = -1e300;
    const auto n = 1 + rng.below(6);
    for (ShotId s = 1; s <= n; ++s) {
      scene.shots.push_back(s);
      const double a = rng.normal();
      index.aesthetic[s] = a;
      a_max = std::max(a_max, a);
      if (rng.uniform() < 0.5) {
        const double p = rng.uniform();
        postings.push_back({1, 1, s, p});
        p_max = std::max(p_max, p);
      }
    }
    index.postings["u"] = postings;
    EXPECT_EQ(score_scene(scene, "u", index, 1.0), p_max);
    EXPECT_EQ(score_scene(scene, "u", index, 0.0), a_max);
    // R is the upper envelope of lines in alpha, hence convex.
    const double r0 = score_scene(scene, "u", index, 0.2), r1 = score_scene(scene, "u", index, 0.8);
    EXPECT_LE(score_scene(scene, "u", index, 0.5), 0.5 * (r0 + r1) + 1e-12);
  }
}

TEST(ScoreScene, TieGoesToSmallestShot) {
  Index index;
  const SceneShots scene{1, 1, {3, 4, 5}};
  index.aesthetic = {{3, 0.1}, {4, 0.7}, {5, 0.7}};
  const auto s = evaluate_scene(scene, {}, index, 0.5);
  EXPECT_FALSE(s.matched);
  EXPECT_EQ(s.best_shot, 4u);
  EXPECT_EQ(s.best_aesthetic, 4u);
}

TEST(ScoreScene, MissingAestheticIsAnError) {
  Index index;
  const SceneShots scene{1, 1, {1}};
  EXPECT_EQ(code_of([&] { evaluate_scene(scene, {}, index, 0.5); }), Errc::missing_features);
}

TEST(Query, LemmaInOneSceneGivesOneResult) {
  const auto t = toy({{1, 2, 4, 0.8}}, {{1, 1, 2, 0.5}}, {{1, 0.1}, {2, 0.2}, {3, 0.3}, {4, 0.0}, {5, 0.4}});
  const auto r = query(t.index, t.table, "ant", {});
  EXPECT_EQ(r.lemma, "ant");
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].scene_id, 2u);
  EXPECT_EQ(r.entries[0].rank, 1u);
  EXPECT_EQ(r.entries[0].shot_id, 5u);
  EXPECT_DOUBLE_EQ(r.entries[0].score, 0.5 * 0.8 + 0.5 * 0.0);

  QueryOptions all;
  all.include_unmatched = true;
  EXPECT_EQ(query(t.index, t.table, "ant", all).entries.size(), 2u);
}

TEST(Query, BlendedThumbnailsFollowTheConcept) {
  const auto t = toy({{1, 1, 1, 0.9}}, {{1, 1, 3, 0.9}}, {{1, 0.1}, {2, 0.3}, {3, 0.1}, {4, 0.0}, {5, 0.0}});
  QueryOptions blended;
  blended.thumbnail = ThumbnailMode::blended;
  const auto ant = query(t.index, t.table, "ant", blended);
  const auto spider = query(t.index, t.table, "spider", blended);
  ASSERT_EQ(ant.entries.size(), 1u);
  ASSERT_EQ(spider.entries.size(), 1u);
  EXPECT_EQ(ant.entries[0].scene_id, spider.entries[0].scene_id);
  EXPECT_EQ(ant.entries[0].shot_id, 1u);
  EXPECT_EQ(spider.entries[0].shot_id, 3u);

  const auto plain_ant = query(t.index, t.table, "ant", {});
  const auto plain_spider = query(t.index, t.table, "spider", {});
  EXPECT_EQ(plain_ant.entries[0].shot_id, 2u);
  EXPECT_EQ(plain_spider.entries[0].shot_id, 2u);
}

TEST(Query, Errors) {
  const auto t = toy({{1, 1, 1, 0.9}}, {}, {{1, 0.1}, {2, 0.3}, {3, 0.1}, {4, 0.0}, {5, 0.0}});
  QueryOptions bad;
  bad.alpha = 1.5;
  EXPECT_EQ(code_of([&] { query(t.index, t.table, "ant", bad); }), Errc::invalid_config);
  EXPECT_EQ(code_of([&] { query(t.index, t.table, "  ", {}); }), Errc::unknown_query);
  EXPECT_EQ(code_of([&] { query(t.index, t.table, "zebra", {}); }), Errc::unknown_query);
  EXPECT_EQ(code_of([&] { query(Index{}, t.table, "ant", {}); }), Errc::empty_index);
}

TEST(Query, KTruncatesAndRanksAreDense) {
  const auto t = toy({{1, 1, 1, 0.2}, {1, 2, 4, 0.9}}, {}, {{1, 0.1}, {2, 0.3}, {3, 0.1}, {4, 0.0}, {5, 0.0}});
  QueryOptions o;
  o.k = 1;
  const auto top = query(t.index, t.table, "ant", o);
  ASSERT_EQ(top.entries.size(), 1u);
  EXPECT_EQ(top.entries[0].scene_id, 2u);
  o.k = 0;
  const auto all = query(t.index, t.table, "ant", o);
  ASSERT_EQ(all.entries.size(), 2u);
  EXPECT_EQ(all.entries[1].rank, 2u);
  EXPECT_GE(all.entries[0].score, all.entries[1].score);
}

TEST(BuildIndex, EmptyTranscriptKeepsAestheticTable) {
  TempDir dir("empty-transcript");
  auto p = testing_support::run_pipeline(dir.path(), small_options());
  for (auto& v : p.dataset.videos) v.tokens.clear();
  BuildReport report;
  const auto index = build_index(p.dataset, p.concept_map, p.classifiers, p.model, p.phi, p.config, 1, &report);
  EXPECT_TRUE(index.postings.empty());
  EXPECT_EQ(index.aesthetic.size(), 48u);
  EXPECT_EQ(report.tokens, 0u);
  EXPECT_EQ(code_of([&] { query(index, p.dataset.embeddings, "penguin", {}); }), Errc::empty_index);
  EXPECT_NO_THROW(decode_index(encode_index(index)));
}

TEST(BuildIndex, RepeatedOccurrencesKeepTheMaximum) {
  TempDir dir("max-aggregation");
  auto p = testing_support::run_pipeline(dir.path(), small_options());
  auto& video = p.dataset.videos[0];
  ASSERT_FALSE(video.tokens.empty());
  const auto original = video.tokens;

  // A second mention of the same lemma a few seconds later.
  auto extra = original.front();
  extra.t = std::min(extra.t + 4.0, video.duration());
  auto build = [&](std::vector<TranscriptToken> tokens) {
    std::sort(tokens.begin(), tokens.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    video.tokens = std::move(tokens);
    return build_index(p.dataset, p.concept_map, p.classifiers, p.model, p.phi, p.config, 1);
  };
  const auto only_first = build({original.front()});
  const auto only_extra = build({extra});
  const auto both = build({original.front(), extra});
  const auto& lemma = extra.lemma;

  std::map<ShotId, double> expected;
  for (const auto& q : only_first.find(lemma)) expected[q.shot_id] = q.p;
  for (const auto& q : only_extra.find(lemma)) expected[q.shot_id] = std::max(expected[q.shot_id], q.p);
  ASSERT_FALSE(expected.empty());
  const auto merged = both.find(lemma);
  ASSERT_EQ(merged.size(), expected.size());
  for (const auto& q : merged) EXPECT_EQ(q.p, expected.at(q.shot_id));

  // An exact duplicate changes nothing.
  const auto dup = build({original.front(), original.front()});
  EXPECT_EQ(encode_index(dup), encode_index(only_first));
}

TEST(BuildIndex, IndependentOfThreadCount) {
  TempDir dir("threads");
  const auto p = testing_support::run_pipeline(dir.path(), small_options());
  const auto four = build_index(p.dataset, p.concept_map, p.classifiers, p.model, p.phi, p.config, 4);
  EXPECT_EQ(encode_index(four), encode_index(p.index));
}

TEST(BuildIndex, MatchesFullScan) {
  TempDir dir("scan");
  const auto p = testing_support::run_pipeline(dir.path(), small_options());
  const oracle::FullScan scan(p.dataset, p.classifiers, p.concept_map, p.model, p.phi, p.config);

  std::set<std::string> expected(scan.detected().begin(), scan.detected().end());
  const auto vocab = p.index.vocabulary();
  EXPECT_EQ(std::set<std::string>(vocab.begin(), vocab.end()), expected);

  for (const auto& [lemma, postings] : p.index.postings) {
    for (const auto& q : postings) {
      const auto& video = *std::find_if(p.dataset.videos.begin(), p.dataset.videos.end(),
                                        [&](const Video& v) { return v.id() == q.video_id; });
      const auto pos = *video.shot_index(q.shot_id);
      EXPECT_EQ(q.p, scan.confirmation(static_cast<std::size_t>(&video - p.dataset.videos.data()), pos, lemma));
      EXPECT_EQ(video.scene_of(q.shot_id)->scene_id, q.scene_id);
    }
  }
  for (const auto& [shot, a] : p.index.aesthetic) EXPECT_EQ(a, scan.aesthetic(shot));
}

TEST(Query, ThumbnailBelongsToScene) {
  TempDir dir("thumbs");
  const auto p = testing_support::run_pipeline(dir.path(), small_options());
  for (auto mode : {ThumbnailMode::aesthetic, ThumbnailMode::blended}) {
    QueryOptions o;
    o.k = 0;
    o.include_unmatched = true;
    o.thumbnail = mode;
    const auto r = query(p.index, p.dataset.embeddings, "penguin", o);
    EXPECT_EQ(r.entries.size(), p.index.scenes.size());
    for (const auto& e : r.entries) {
      const auto& scene = *std::find_if(p.index.scenes.begin(), p.index.scenes.end(), [&](const SceneShots& s) {
        return s.video_id == e.video_id && s.scene_id == e.scene_id;
      });
      EXPECT_NE(std::find(scene.shots.begin(), scene.shots.end(), e.shot_id), scene.shots.end());
    }
  }
}

TEST(IndexFile, RoundTrip) {
  TempDir dir("index-file");
  const auto p = testing_support::run_pipeline(dir.path(), small_options());
  save_index(dir / "index.bin", p.index);
  const auto back = load_index(dir / "index.bin");
  EXPECT_EQ(back.postings, p.index.postings);
  EXPECT_EQ(back.aesthetic, p.index.aesthetic);
  EXPECT_EQ(back.scenes, p.index.scenes);
  EXPECT_EQ(back.vocabulary_vectors, p.index.vocabulary_vectors);
  EXPECT_EQ(encode_index(back), encode_index(p.index));

  for (const char* q : {"penguin", "whale seal", "calf"}) {
    QueryOptions o;
    o.k = 0;
    const auto a = query(p.index, p.dataset.embeddings, q, o);
    const auto b = query(back, p.dataset.embeddings, q, o);
    EXPECT_EQ(a.entries, b.entries);
  }
}

TEST(IndexFile, RejectsCorruption) {
  TempDir dir("index-bad");
  const auto p = testing_support::run_pipeline(dir.path(), small_options());
  const auto bytes = encode_index(p.index);

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(code_of([&] { decode_index(bad_magic); }), Errc::bad_magic);

  for (std::size_t cut : {std::size_t{4}, std::size_t{14}, bytes.size() / 2, bytes.size() - 1}) {
    const std::vector<std::uint8_t> truncated(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut));
    EXPECT_EQ(code_of([&] { decode_index(truncated); }), Errc::truncated) << "cut at " << cut;
  }

  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_EQ(code_of([&] { decode_index(trailing); }), Errc::trailing_bytes);

  EXPECT_EQ(code_of([&] { load_index(dir / "nowhere.bin"); }), Errc::index_missing);
}

TEST(Retrieval, ScriptedConceptsLandInTheirScenes) {
  TempDir dir("scripted");
  auto o = small_options();
  o.videos = 1;
  o.shots_per_video = 60;
  o.noise_tokens_per_video = 0;
  o.scripted = {{0, 1, "penguin"}, {0, 3, "calf"}};
  const auto p = testing_support::run_pipeline(dir.path(), o);
  const auto penguin = query(p.index, p.dataset.embeddings, "penguin", {});
  const auto calf = query(p.index, p.dataset.embeddings, "calf", {});
  ASSERT_FALSE(penguin.entries.empty());
  ASSERT_FALSE(calf.entries.empty());
  EXPECT_EQ(penguin.entries[0].video_id, calf.entries[0].video_id);
  EXPECT_EQ(penguin.entries[0].scene_id, p.dataset.videos[0].scenes[1].scene_id);
  EXPECT_EQ(calf.entries[0].scene_id, p.dataset.videos[0].scenes[3].scene_id);
}

TEST(Evaluate, OneBlockPerQuery) {
  TempDir dir("evaluate");
  const auto p = testing_support::run_pipeline(dir.path(), small_options());
  const auto words = fixture::fixture_words(10);
  std::vector<std::string> queries;
  for (int i = 0; i < 20; ++i) queries.push_back(words[static_cast<std::size_t>(i) % words.size()]);
  queries[7] = "zzzz";
  const auto blocks = evaluate_retrieval(p.index, p.dataset.embeddings, queries, {});
  ASSERT_EQ(blocks.size(), 20u);
  EXPECT_TRUE(blocks[7].error.has_value());
  EXPECT_FALSE(blocks[0].error.has_value());

  std::ofstream(dir / "empty.txt").close();
  EXPECT_TRUE(evaluate_retrieval(p.index, p.dataset.embeddings, load_queries(dir / "empty.txt"), {}).empty());

  std::ofstream(dir / "q.txt") << "# comment\npenguin\n\n  calf  \n";
  EXPECT_EQ(load_queries(dir / "q.txt").size(), 2u);

  const auto line = format_report_line(blocks[0], [](VideoId v, ShotId s) {
    return "v" + std::to_string(v) + "/" + std::to_string(s);
  });
  const auto doc = nlohmann::json::parse(line);
  EXPECT_EQ(doc["query"], queries[0]);
  EXPECT_TRUE(doc.contains("results"));
}

TEST(Format, ResultLines) {
  QueryResult r;
  r.query = "ant";
  r.lemma = "ant";
  r.entries = {{1, 2, 3, 4, 0.5, "ant"}, {2, 2, 5, 9, 0.25, "ant"}};
  const auto text = format_result_lines(r);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  const auto first = nlohmann::json::parse(text.substr(0, text.find('\n')));
  EXPECT_EQ(first["rank"], 1);
  EXPECT_EQ(first["video_id"], 2);
  EXPECT_EQ(first["scene_id"], 3);
  EXPECT_EQ(first["shot_id"], 4);
  EXPECT_EQ(first["score"], 0.5);
  EXPECT_EQ(first["concept"], "ant");
  EXPECT_NE(format_result_pretty(r).find("ant"), std::string::npos);
}
