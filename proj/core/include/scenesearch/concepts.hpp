// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "scenesearch/config.hpp"
#include "scenesearch/dataset.hpp"
#include "scenesearch/embedding.hpp"
#include "scenesearch/platt.hpp"
#include "scenesearch/tensor.hpp"

namespace scenesearch::concepts {

/// Linear probabilistic classifier for one corpus category: the presence
/// probability of the concept in a keyframe is
/// 1 / (1 + exp(platt.a * (w.x + b) + platt.b)).
struct ConceptClassifier {
  std::string category_id;
  Tensor w;  // [feature_dim]
  double b = 0.0;
  PlattParams platt;
  std::uint64_t train_seed = 0;
  double objective = 0.0;  // SVM primal objective at (w, b)
  std::size_t positives = 0;
  std::size_t negatives = 0;

  double decision_value(std::span<const float> x) const;
};

using ClassifierSet = std::map<std::string, ConceptClassifier, std::less<>>;

/// Trains one concept: `positives` is [n, d]; negatives are drawn without
/// replacement from `negative_pool` (rows belonging to other categories) with
/// a PRNG seeded by `seed`. Identical inputs give a bit-identical classifier.
ConceptClassifier train_concept_classifier(const std::string& category_id, const Tensor& positives,
                                           std::span<const std::span<const float>> negative_pool,
                                           const EngineConfig& config, std::uint64_t seed);

/// Trains a classifier for every category in `wanted`, drawing negatives from
/// all other categories. Each category's seed derives from `seed` and its id,
/// so the result does not depend on `threads`.
ClassifierSet train_classifiers(std::span<const embed::CorpusCategory> categories,
                                const std::vector<std::string>& wanted, const EngineConfig& config,
                                std::uint64_t seed, unsigned threads);

/// f_M(u)(s): calibrated presence probability, strictly inside (0, 1).
double classifier_probability(const ConceptClassifier& clf, std::span<const float> x);

/// exp(-(t_u - t_s)^2 / (2 sigma_a^2)).
double temporal_weight(double t_u, double t_s, double sigma_a);

/// Shots whose keyframe time lies within config.window() of t_u. `shots`
/// must be in time order; found by binary search.
std::span<const Shot> candidate_shots(double t_u, std::span<const Shot> shots, const EngineConfig& config);

/// P(s, u) = f_M(u)(keyframe of s) * temporal_weight(t_u, t_mid(s)).
/// Throws Error(missing_features) when `keyframe_fc6` is empty.
double visual_confirmation(const ConceptClassifier& clf, const Shot& shot, std::span<const float> keyframe_fc6,
                           double t_u, const EngineConfig& config);

/// Lemma -> category id for every distinct transcript lemma that has an
/// embedding, via map_concept. Lemmas without a vector are reported in `unmapped`.
std::map<std::string, std::string> map_transcript_concepts(const Dataset& dataset,
                                                           std::span<const embed::CorpusCategory> categories,
                                                           std::vector<std::string>* unmapped = nullptr);

/// Categories with a usable synset vector, sorted by id. Categories whose
/// synset words are all missing from the table are listed in `excluded`.
std::vector<embed::CorpusCategory> build_categories(const Dataset& dataset,
                                                    std::vector<std::string>* excluded = nullptr);

// Classifier store: JSON lines, one classifier per line, w as base64 of the tensor format.
void save_classifiers(const std::filesystem::path& path, const ClassifierSet& classifiers);
ClassifierSet load_classifiers(const std::filesystem::path& path);

}  // namespace scenesearch::concepts
