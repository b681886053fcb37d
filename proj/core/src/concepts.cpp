// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include "scenesearch/concepts.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "jsonl.hpp"
#include "scenesearch/error.hpp"
#include "scenesearch/linear_svm.hpp"
#include "scenesearch/parallel.hpp"
#include "scenesearch/rng.hpp"

namespace scenesearch::concepts {

using detail::json;

double ConceptClassifier::decision_value(std::span<const float> x) const {
  if (x.size() != w.size()) {
    throw Error(Errc::dimension_mismatch, "classifier " + category_id + " expects " + std::to_string(w.size()) +
                                              " features, got " + std::to_string(x.size()));
  }
  double s = b;
  const auto wd = w.data();
  for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<double>(wd[i]) * x[i];
  return s;
}

ConceptClassifier train_concept_classifier(const std::string& category_id, const Tensor& positives,
                                           std::span<const std::span<const float>> negative_pool,
                                           const EngineConfig& config, std::uint64_t seed) {
  if (positives.rank() != 2 || positives.rows() < 2) {
    throw Error(Errc::degenerate_training_set, category_id + ": need at least 2 positive exemplars");
  }
  const std::size_t n_pos = positives.rows();
  const std::size_t dim = positives.cols();
  const auto n_neg = static_cast<std::size_t>(std::ceil(config.neg_ratio * static_cast<double>(n_pos)));
  if (negative_pool.size() < n_neg) {
    throw Error(Errc::degenerate_training_set, category_id + ": negative pool has " +
                                                   std::to_string(negative_pool.size()) + " rows, need " +
                                                   std::to_string(n_neg));
  }

  Rng rng(seed);
  const auto picks = rng.sample_without_replacement(negative_pool.size(), n_neg);

  svm::Samples x(n_pos + n_neg, dim);
  std::vector<int> y(n_pos + n_neg);
  for (std::size_t i = 0; i < n_pos; ++i) {
    const auto src = positives.row(i);
    std::copy(src.begin(), src.end(), x.row(i).begin());
    y[i] = 1;
  }
  for (std::size_t k = 0; k < n_neg; ++k) {
    const auto src = negative_pool[picks[k]];
    if (src.size() != dim) throw Error(Errc::dimension_mismatch, category_id + ": negative has wrong dimension");
    std::copy(src.begin(), src.end(), x.row(n_pos + k).begin());
    y[n_pos + k] = -1;
  }

  bool varied = false;
  for (std::size_t i = 1; i < x.rows() && !varied; ++i) {
    varied = !std::equal(x.row(i).begin(), x.row(i).end(), x.row(0).begin());
  }
  if (!varied) throw Error(Errc::degenerate_training_set, category_id + ": all training features are identical");

  const auto model = svm::train_biased_svm(x, y, config.svm_c_concept);

  ConceptClassifier clf;
  clf.category_id = category_id;
  clf.train_seed = seed;
  clf.positives = n_pos;
  clf.negatives = n_neg;
  std::vector<float> wf(model.w.begin(), model.w.end());
  clf.w = Tensor::vector(std::move(wf));
  clf.b = model.bias;

  // Calibrate and report the objective on the stored f32 weights, which is
  // what every later consumer evaluates.
  std::vector<double> wq(clf.w.data().begin(), clf.w.data().end());
  clf.objective = svm::hinge_objective(wq, clf.b, x, y, config.svm_c_concept);
  std::vector<double> scores(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) scores[i] = svm::dot(wq, x.row(i)) + clf.b;
  clf.platt = fit_platt(scores, y);
  return clf;
}

ClassifierSet train_classifiers(std::span<const embed::CorpusCategory> categories,
                                const std::vector<std::string>& wanted, const EngineConfig& config,
                                std::uint64_t seed, unsigned threads) {
  std::vector<std::string> ids(wanted.begin(), wanted.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<ConceptClassifier> trained(ids.size());
  parallel_for(ids.size(), threads, [&](std::size_t k) {
    const embed::CorpusCategory* target = nullptr;
    std::vector<std::span<const float>> pool;
    for (const auto& c : categories) {
      if (c.category_id == ids[k]) {
        target = &c;
        continue;
      }
      for (std::size_t r = 0; r < c.exemplar_features.rows(); ++r) pool.push_back(c.exemplar_features.row(r));
    }
    if (target == nullptr) throw Error(Errc::bad_reference, "no corpus category \"" + ids[k] + "\"");
    trained[k] = train_concept_classifier(ids[k], target->exemplar_features, pool, config,
                                          derive_seed(seed, ids[k]));
  });

  ClassifierSet out;
  for (auto& clf : trained) {
    auto id = clf.category_id;
    out.emplace(std::move(id), std::move(clf));
  }
  return out;
}

double classifier_probability(const ConceptClassifier& clf, std::span<const float> x) {
  return platt_probability(clf.decision_value(x), clf.platt);
}

double temporal_weight(double t_u, double t_s, double sigma_a) {
  const double d = t_u - t_s;
  return std::exp(-(d * d) / (2.0 * sigma_a * sigma_a));
}

std::span<const Shot> candidate_shots(double t_u, std::span<const Shot> shots, const EngineConfig& config) {
  const double window = config.window();
  auto first = std::partition_point(shots.begin(), shots.end(),
                                    [&](const Shot& s) { return s.t_mid() - t_u < -window; });
  auto last = std::partition_point(first, shots.end(), [&](const Shot& s) { return s.t_mid() - t_u <= window; });
  return shots.subspan(static_cast<std::size_t>(first - shots.begin()), static_cast<std::size_t>(last - first));
}

double visual_confirmation(const ConceptClassifier& clf, const Shot& shot, std::span<const float> keyframe_fc6,
                           double t_u, const EngineConfig& config) {
  if (keyframe_fc6.empty()) {
    throw Error(Errc::missing_features, "shot " + std::to_string(shot.shot_id) + " has no keyframe features");
  }
  return classifier_probability(clf, keyframe_fc6) * temporal_weight(t_u, shot.t_mid(), config.sigma_a);
}

std::vector<embed::CorpusCategory> build_categories(const Dataset& dataset, std::vector<std::string>* excluded) {
  std::vector<embed::CorpusCategory> out;
  for (const auto& entry : dataset.corpus) {
    try {
      embed::CorpusCategory c;
      c.category_id = entry.category_id;
      c.synset_words = entry.synset_words;
      c.exemplar_features = entry.features;
      c.synset_vector = embed::synset_vector(entry.synset_words, dataset.embeddings);
      out.push_back(std::move(c));
    } catch (const Error& e) {
      if (e.code() != Errc::unmapped_synset) throw;
      if (excluded) excluded->push_back(entry.category_id);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const embed::CorpusCategory& a, const embed::CorpusCategory& b) { return a.category_id < b.category_id; });
  return out;
}

std::map<std::string, std::string> map_transcript_concepts(const Dataset& dataset,
                                                           std::span<const embed::CorpusCategory> categories,
                                                           std::vector<std::string>* unmapped) {
  std::set<std::string> lemmas;
  for (const auto& v : dataset.videos) {
    for (const auto& t : v.tokens) lemmas.insert(t.lemma);
  }
  std::map<std::string, std::string> out;
  for (const auto& lemma : lemmas) {
    if (!dataset.embeddings.contains(lemma) || categories.empty()) {
      if (unmapped) unmapped->push_back(lemma);
      continue;
    }
    out.emplace(lemma, embed::map_concept(lemma, dataset.embeddings, categories).category_id);
  }
  return out;
}

void save_classifiers(const std::filesystem::path& path, const ClassifierSet& classifiers) {
  std::vector<json> rows;
  for (const auto& [id, clf] : classifiers) {
    rows.push_back({
        {"category_id", clf.category_id},
        {"w", detail::tensor_to_base64(clf.w)},
        {"b", clf.b},
        {"platt_A", clf.platt.a},
        {"platt_B", clf.platt.b},
        {"train_seed", clf.train_seed},
        {"objective", clf.objective},
        {"positives", clf.positives},
        {"negatives", clf.negatives},
    });
  }
  detail::write_jsonl(path, rows);
}

ClassifierSet load_classifiers(const std::filesystem::path& path) {
  ClassifierSet out;
  for (const auto& row : detail::read_jsonl(path)) {
    try {
      ConceptClassifier clf;
      clf.category_id = detail::field<std::string>(row.value, "category_id");
      clf.w = detail::tensor_from_base64(detail::field<std::string>(row.value, "w"));
      clf.b = detail::field<double>(row.value, "b");
      clf.platt.a = detail::field<double>(row.value, "platt_A");
      clf.platt.b = detail::field<double>(row.value, "platt_B");
      clf.train_seed = detail::field<std::uint64_t>(row.value, "train_seed");
      clf.objective = row.value.value("objective", 0.0);
      clf.positives = row.value.value("positives", std::size_t{0});
      clf.negatives = row.value.value("negatives", std::size_t{0});
      if (clf.w.rank() != 1 || !std::isfinite(clf.b) || !std::isfinite(clf.platt.a) ||
          !std::isfinite(clf.platt.b)) {
        throw std::invalid_argument("classifier parameters must be finite and w rank 1");
      }
      auto id = clf.category_id;
      out.emplace(std::move(id), std::move(clf));
    } catch (const std::invalid_argument& e) {
      throw Error(Errc::parse, path.string() + ":" + std::to_string(row.line_number) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(row.line_number) + ": " + e.detail());
    }
  }
  return out;
}

}  // namespace scenesearch::concepts
