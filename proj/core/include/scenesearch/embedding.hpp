// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scenesearch/tensor.hpp"

namespace scenesearch::embed {

/// Word vectors exported by the extractor: one `vocab x dim` tensor plus a
/// JSON-lines vocabulary file giving the term of each row.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  // Throws on duplicate terms, row-count mismatch or all-zero rows.
  EmbeddingTable(std::vector<std::string> terms, Tensor vectors);

  static EmbeddingTable load(const std::filesystem::path& tensor_file,
                             const std::filesystem::path& vocab_file);
  void save(const std::filesystem::path& tensor_file, const std::filesystem::path& vocab_file) const;

  std::size_t dim() const noexcept { return vectors_.rank() == 2 ? vectors_.dims()[1] : 0; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool contains(std::string_view term) const { return index_.find(term) != index_.end(); }

  // Empty span when the term is unknown.
  std::span<const float> find(std::string_view term) const;

  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const Tensor& vectors() const noexcept { return vectors_; }

 private:
  std::vector<std::string> terms_;
  Tensor vectors_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

using Vector = std::vector<double>;

/// a.b / (|a||b|). Throws Error(degenerate_vector) on a zero input and
/// Error(dimension_mismatch) when lengths differ.
double cosine(std::span<const double> a, std::span<const double> b);
double cosine(std::span<const float> a, std::span<const float> b);
double cosine(std::span<const double> a, std::span<const float> b);

/// L2-normalized mean of the vectors of `words` found in `table`; absent
/// words are skipped. Throws Error(unmapped_synset) when none is found.
Vector synset_vector(std::span<const std::string> words, const EmbeddingTable& table);

/// Same averaging rule for a tokenized query; Error(unknown_query) when no
/// query word is known.
Vector embed_query(std::span<const std::string> words, const EmbeddingTable& table);

// Lowercases and splits on anything that is not a letter, digit, '_' or '-'.
std::vector<std::string> tokenize_query(std::string_view text);

struct CorpusCategory {
  std::string category_id;
  std::vector<std::string> synset_words;
  Tensor exemplar_features;  // [n, fc6_dim]
  Vector synset_vector;      // unit norm
};

/// Concept mapping M(u): the category whose synset vector is most similar to
/// `u`. Ties go to the lexicographically smallest category id.
const CorpusCategory& map_concept(std::span<const float> u, std::span<const CorpusCategory> categories);

/// Lemma form of map_concept; Error(unmapped_term) when `lemma` has no vector.
const CorpusCategory& map_concept(std::string_view lemma, const EmbeddingTable& table,
                                  std::span<const CorpusCategory> categories);

/// Index of the row of `vectors` ([n, dim]) most similar to `query`, with the
/// same lexicographic tie rule over `lemmas`. Error(empty_index) when n == 0.
std::size_t match_query_to_concept(std::span<const double> query, std::span<const std::string> lemmas,
                                   const Tensor& vectors);

}  // namespace scenesearch::embed
