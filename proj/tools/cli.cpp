// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include "cli.hpp"

#include <CLI11.hpp>

#include <set>
#include <sstream>

#include "jsonl.hpp"
#include "scenesearch/aesrank.hpp"
#include "scenesearch/concepts.hpp"
#include "scenesearch/dataset.hpp"
#include "scenesearch/error.hpp"
#include "scenesearch/hypercolumn.hpp"

namespace scenesearch::cli {

namespace fs = std::filesystem;
using detail::json;

namespace {

struct Overrides {
  std::optional<fs::path> config_file;
  std::optional<double> sigma_a, sigma_b, svm_c_rank, svm_c_concept, alpha, window, neg_ratio;
  std::optional<std::size_t> map_size;
};

void add_engine_flags(CLI::App& sub, Overrides& o) {
  sub.add_option("--config", o.config_file, "JSON file of engine parameters, applied before flags");
  sub.add_option("--sigma-a", o.sigma_a, "temporal Gaussian width in seconds (default 5)");
  sub.add_option("--sigma-b", o.sigma_b, "center-weighting width relative to the map side (default 4.5)");
  sub.add_option("--svm-c-rank", o.svm_c_rank, "ranking SVM trade-off C (default 3)");
  sub.add_option("--svm-c-concept", o.svm_c_concept, "concept SVM trade-off C (default 1)");
  sub.add_option("--window", o.window, "candidate window in seconds (default 3 * sigma-a)");
  sub.add_option("--map-size", o.map_size, "hypercolumn map side S (default 56)");
  sub.add_option("--neg-ratio", o.neg_ratio, "negatives per positive for concept training (default 1)");
}

void add_common_flags(CLI::App& sub, Command& c, bool needs_manifest) {
  auto* m = sub.add_option("--manifest", c.manifest, "dataset manifest (JSON)");
  if (needs_manifest) m->required();
  sub.add_option("--out", c.out, "output directory for every artifact")->capture_default_str();
  sub.add_option("--seed", c.seed, "seed for all randomness")->capture_default_str();
  sub.add_option("--threads", c.threads, "worker threads, 0 = all cores")->capture_default_str();
  sub.add_flag("--pretty", c.pretty, "human-readable output instead of JSON lines");
}

void apply_overrides(Command& c, const Overrides& o) {
  if (o.config_file) c.config = load_config(*o.config_file);
  if (o.sigma_a) c.config.sigma_a = *o.sigma_a;
  if (o.sigma_b) c.config.sigma_b = *o.sigma_b;
  if (o.svm_c_rank) c.config.svm_c_rank = *o.svm_c_rank;
  if (o.svm_c_concept) c.config.svm_c_concept = *o.svm_c_concept;
  if (o.alpha) c.config.alpha = *o.alpha;
  if (o.window) c.config.candidate_window = *o.window;
  if (o.neg_ratio) c.config.neg_ratio = *o.neg_ratio;
  if (o.map_size) c.config.map_size = *o.map_size;
  c.config.validate();
}

fs::path classifiers_path(const Command& c) { return c.out / "classifiers.jsonl"; }
fs::path concept_map_path(const Command& c) { return c.out / "concept_map.jsonl"; }
fs::path rank_model_path(const Command& c) { return c.out / "rank_model.json"; }
fs::path index_path(const Command& c) { return c.out / "index.bin"; }

void require_artifact(const fs::path& path, const char* producer) {
  if (!fs::exists(path)) {
    throw Error(Errc::missing_file, path.string() + " not found; run " + producer + " first");
  }
}

void print_json(std::ostream& out, const json& j) { out << j.dump() << '\n'; }

int cmd_validate(const Command& c, std::ostream& out) {
  const auto ds = load_dataset(c.manifest);
  for (const auto& s : dataset_stats(ds)) {
    if (c.pretty) {
      out << format_stats_line(s) << '\n';
    } else {
      print_json(out, {{"video_id", s.video_id}, {"title", s.title}, {"shots", s.shots}, {"scenes", s.scenes},
                       {"unigrams", s.unigrams}});
    }
  }
  return 0;
}

int cmd_train_concepts(const Command& c, std::ostream& out, std::ostream& err) {
  const auto ds = load_dataset(c.manifest);
  std::vector<std::string> excluded, unmapped;
  const auto categories = concepts::build_categories(ds, &excluded);
  for (const auto& id : excluded) err << "warning: category " << id << " has no embedded synset word; excluded\n";
  const auto concept_map = concepts::map_transcript_concepts(ds, categories, &unmapped);
  for (const auto& lemma : unmapped) err << "warning: lemma \"" << lemma << "\" has no embedding; skipped\n";

  std::set<std::string> wanted_set;
  std::vector<json> rows;
  for (const auto& [lemma, category] : concept_map) {
    wanted_set.insert(category);
    rows.push_back({{"lemma", lemma}, {"category_id", category}});
  }
  const std::vector<std::string> wanted(wanted_set.begin(), wanted_set.end());
  const auto classifiers = concepts::train_classifiers(categories, wanted, c.config, c.seed, c.threads);
  concepts::save_classifiers(classifiers_path(c), classifiers);
  detail::write_jsonl(concept_map_path(c), rows);

  if (c.pretty) {
    out << "mapped " << concept_map.size() << " lemmas onto " << wanted.size() << " categories; trained "
        << classifiers.size() << " classifiers -> " << classifiers_path(c).string() << '\n';
  } else {
    print_json(out, {{"lemmas", concept_map.size()},
                     {"unmapped", unmapped.size()},
                     {"classifiers", classifiers.size()},
                     {"output", classifiers_path(c).string()}});
  }
  return 0;
}

int cmd_train_ranker(const Command& c, std::ostream& out) {
  const auto ds = load_dataset(c.manifest);
  if (!ds.manifest.votes_file) throw Error(Errc::missing_file, "manifest has no votes_file");
  const auto phi = hypercolumn::compute_phi_table(ds, c.config, c.threads, c.out / "phi");
  const auto votes = aesrank::group_votes(ds.votes);
  const auto pairs = aesrank::pairs_from_votes(votes);
  const auto model = aesrank::train_rank(pairs, phi, c.config.svm_c_rank);
  aesrank::save_model(rank_model_path(c), model);
  const double swapped = aesrank::swapped_pairs_pct(model, pairs, phi);

  if (c.pretty) {
    out << "trained on " << pairs.size() << " pairs; objective " << model.objective_value << "; training swapped "
        << swapped << "%\n";
  } else {
    print_json(out, {{"pairs", pairs.size()},
                     {"objective", model.objective_value},
                     {"train_swapped_pct", swapped},
                     {"output", rank_model_path(c).string()}});
  }

  if (c.leave_one_out) {
    const auto rows = aesrank::leave_one_out(ds, votes, phi, c.config.svm_c_rank);
    std::vector<json> lines;
    double total = 0.0;
    for (const auto& r : rows) {
      lines.push_back({{"held_out", r.held_out},
                       {"title", r.title},
                       {"train_pairs", r.train_pairs},
                       {"test_pairs", r.test_pairs},
                       {"swapped_pct", r.swapped_pct}});
      total += r.swapped_pct;
      if (c.pretty) out << r.title << ": " << r.swapped_pct << "% swapped (" << r.test_pairs << " pairs)\n";
    }
    detail::write_jsonl(c.out / "leave_one_out.jsonl", lines);
    const double mean = rows.empty() ? 0.0 : total / static_cast<double>(rows.size());
    if (c.pretty) {
      out << "average: " << mean << "% swapped\n";
    } else {
      for (const auto& l : lines) print_json(out, l);
      print_json(out, {{"average_swapped_pct", mean}, {"videos", rows.size()}});
    }
  }
  return 0;
}

int cmd_build_index(const Command& c, std::ostream& out, std::ostream& err) {
  require_artifact(classifiers_path(c), "train-concepts");
  require_artifact(rank_model_path(c), "train-ranker");
  const auto ds = load_dataset(c.manifest);
  const auto classifiers = concepts::load_classifiers(classifiers_path(c));
  const auto model = aesrank::load_model(rank_model_path(c));
  const auto categories = concepts::build_categories(ds);
  const auto concept_map = concepts::map_transcript_concepts(ds, categories);
  const auto phi = hypercolumn::compute_phi_table(ds, c.config, c.threads, c.out / "phi");

  engine::BuildReport report;
  const auto index = engine::build_index(ds, concept_map, classifiers, model, phi, c.config, c.threads, &report);
  engine::save_index(index_path(c), index);
  if (report.skipped_no_classifier > 0) {
    err << "warning: " << report.skipped_no_classifier << " tokens skipped: concept has no classifier\n";
  }
  if (report.skipped_unmapped > 0) {
    err << "warning: " << report.skipped_unmapped << " tokens skipped: lemma has no embedding\n";
  }
  if (c.pretty) {
    out << "indexed " << index.postings.size() << " lemmas, " << report.postings << " postings, "
        << index.aesthetic.size() << " keyframes -> " << index_path(c).string() << '\n';
  } else {
    print_json(out, {{"tokens", report.tokens},
                     {"skipped_unmapped", report.skipped_unmapped},
                     {"skipped_no_classifier", report.skipped_no_classifier},
                     {"tokens_without_shots", report.tokens_without_shots},
                     {"lemmas", index.postings.size()},
                     {"postings", report.postings},
                     {"keyframes", index.aesthetic.size()},
                     {"output", index_path(c).string()}});
  }
  return 0;
}

engine::QueryOptions query_options(const Command& c) {
  engine::QueryOptions o;
  o.alpha = c.config.alpha;
  o.k = c.k;
  o.include_unmatched = c.include_unmatched;
  o.thumbnail = c.thumbnail;
  return o;
}

int cmd_query(const Command& c, std::ostream& out) {
  const auto index = engine::load_index(index_path(c));
  const auto manifest = load_manifest(c.manifest);
  const auto table = embed::EmbeddingTable::load(manifest.embedding_file, manifest.embedding_vocab_file);
  const auto result = engine::query(index, table, c.q, query_options(c));
  out << (c.pretty ? engine::format_result_pretty(result) : engine::format_result_lines(result));
  return 0;
}

int cmd_evaluate(const Command& c, std::ostream& out) {
  const auto index = engine::load_index(index_path(c));
  const auto manifest = load_manifest(c.manifest);
  const auto table = embed::EmbeddingTable::load(manifest.embedding_file, manifest.embedding_vocab_file);
  const auto queries = engine::load_queries(c.queries);
  const auto blocks = engine::evaluate_retrieval(index, table, queries, query_options(c));

  std::map<VideoId, fs::path> keyframe_dirs;
  for (const auto& v : manifest.videos) keyframe_dirs[v.video_id] = v.keyframe_feature_dir;
  auto thumbnail = [&](VideoId video, ShotId shot) {
    auto it = keyframe_dirs.find(video);
    return it == keyframe_dirs.end() ? fc6_file_name(shot) : (it->second / fc6_file_name(shot)).string();
  };
  std::string report;
  for (const auto& b : blocks) report += engine::format_report_line(b, thumbnail) + "\n";
  detail::write_text_file(c.out / "report.jsonl", report);
  if (c.pretty) {
    for (const auto& b : blocks) {
      if (b.error) {
        out << "query \"" << b.query << "\": " << *b.error << '\n';
      } else {
        out << engine::format_result_pretty(b.result);
      }
    }
  } else {
    out << report;
  }
  return 0;
}

int cmd_gen_fixture(const Command& c, std::ostream& out) {
  auto options = c.fixture;
  options.seed = c.seed;
  const auto summary = fixture::generate_fixture(c.out, options);
  if (c.pretty) {
    out << "wrote " << summary.shots << " shots in " << summary.scenes << " scenes, " << summary.tokens
        << " transcript tokens -> " << summary.manifest.string() << '\n';
  } else {
    print_json(out, {{"manifest", summary.manifest.string()},
                     {"shots", summary.shots},
                     {"scenes", summary.scenes},
                     {"tokens", summary.tokens}});
  }
  return 0;
}

}  // namespace

Command parse_args(const std::vector<std::string>& args, std::ostream& out) {
  Command c;
  Overrides o;
  CLI::App app{"Scene-level video retrieval with query-dependent thumbnails", "scenesearch"};
  app.require_subcommand(1, 1);

  auto* validate = app.add_subcommand("validate", "check a dataset and print per-video statistics");
  add_common_flags(*validate, c, true);
  add_engine_flags(*validate, o);

  auto* train_concepts = app.add_subcommand("train-concepts", "map transcript lemmas to categories and train classifiers");
  add_common_flags(*train_concepts, c, true);
  add_engine_flags(*train_concepts, o);

  auto* train_ranker = app.add_subcommand("train-ranker", "train the keyframe ranking model from vote sheets");
  add_common_flags(*train_ranker, c, true);
  add_engine_flags(*train_ranker, o);
  train_ranker->add_flag("--leave-one-out", c.leave_one_out, "also report swapped pairs with each video held out");

  auto* build_index = app.add_subcommand("build-index", "compute postings and keyframe scores");
  add_common_flags(*build_index, c, true);
  add_engine_flags(*build_index, o);

  auto add_query_flags = [&](CLI::App& sub) {
    sub.add_option("--config", o.config_file, "JSON file of engine parameters, applied before flags");
    sub.add_option("--alpha", o.alpha, "semantic weight in [0, 1] (default 0.5)");
    sub.add_option("--k", c.k, "results to return, 0 = all")->capture_default_str();
    sub.add_flag("--include-unmatched", c.include_unmatched, "also score scenes without a posting for the concept");
    std::map<std::string, engine::ThumbnailMode> modes{{"aesthetic", engine::ThumbnailMode::aesthetic},
                                                       {"blended", engine::ThumbnailMode::blended}};
    sub.add_option("--thumbnail", c.thumbnail, "thumbnail rule: aesthetic or blended")
        ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  };

  auto* query = app.add_subcommand("query", "retrieve scenes for a text query");
  add_common_flags(*query, c, true);
  add_query_flags(*query);
  query->add_option("--q", c.q, "query text")->required();

  auto* evaluate = app.add_subcommand("evaluate", "run a file of queries and write report.jsonl");
  add_common_flags(*evaluate, c, true);
  add_query_flags(*evaluate);
  evaluate->add_option("--queries", c.queries, "file with one query per line")->required();

  auto* gen = app.add_subcommand("gen-fixture", "write a synthetic dataset");
  add_common_flags(*gen, c, false);
  gen->add_option("--videos", c.fixture.videos, "videos")->capture_default_str();
  gen->add_option("--shots", c.fixture.shots_per_video, "shots per video")->capture_default_str();
  gen->add_option("--scenes", c.fixture.scenes_per_video, "scenes per video")->capture_default_str();
  gen->add_option("--vocabulary", c.fixture.vocabulary, "distinct concept words")->capture_default_str();
  gen->add_option("--exemplars", c.fixture.exemplars_per_category, "corpus images per category")
      ->capture_default_str();
  gen->add_option("--vote-noise", c.fixture.vote_noise, "annotator noise on the hidden aesthetic score")
      ->capture_default_str();
  gen->add_option("--noise-tokens", c.fixture.noise_tokens_per_video, "off-topic transcript tokens per video")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    c.exit_now = 0;
    return c;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    c.exit_now = 0;
    return c;
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    if (message.empty()) message = e.get_name();
    throw Error(Errc::usage, message);
  }
  for (auto* sub : app.get_subcommands()) c.subcommand = sub->get_name();
  apply_overrides(c, o);
  return c;
}

int run(const Command& c, std::ostream& out, std::ostream& err) {
  if (c.exit_now) return *c.exit_now;
  if (c.subcommand == "validate") return cmd_validate(c, out);
  if (c.subcommand == "train-concepts") return cmd_train_concepts(c, out, err);
  if (c.subcommand == "train-ranker") return cmd_train_ranker(c, out);
  if (c.subcommand == "build-index") return cmd_build_index(c, out, err);
  if (c.subcommand == "query") return cmd_query(c, out);
  if (c.subcommand == "evaluate") return cmd_evaluate(c, out);
  if (c.subcommand == "gen-fixture") return cmd_gen_fixture(c, out);
  throw Error(Errc::usage, "unknown subcommand \"" + c.subcommand + "\"");
}

int exit_code(const Error& e) {
  if (e.code() == Errc::usage) return kExitUsage;
  return kExitErrorBase + static_cast<int>(e.code());
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run(parse_args(args, out), out, err);
  } catch (const DatasetError& e) {
    for (const auto& v : e.violations()) err << "error: " << errc_name(v.code) << ": " << v.message << '\n';
    const auto& first = e.violations();
    return first.empty() ? exit_code(e) : kExitErrorBase + static_cast<int>(first.front().code);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (e.code() == Errc::usage) err << "run with --help for usage\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace scenesearch::cli
