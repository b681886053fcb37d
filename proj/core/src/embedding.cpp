// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include "scenesearch/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "jsonl.hpp"
#include "scenesearch/error.hpp"
#include "scenesearch/tensor_io.hpp"

namespace scenesearch::embed {

EmbeddingTable::EmbeddingTable(std::vector<std::string> terms, Tensor vectors)
    : terms_(std::move(terms)), vectors_(std::move(vectors)) {
  if (vectors_.rank() != 2) throw Error(Errc::bad_dims, "embedding tensor must be [vocab, dim]");
  if (vectors_.rows() != terms_.size()) {
    throw Error(Errc::bad_dims, "embedding tensor has " + std::to_string(vectors_.rows()) +
                                    " rows but vocabulary lists " + std::to_string(terms_.size()) + " terms");
  }
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], i).second) {
      throw Error(Errc::duplicate_id, "embedding term \"" + terms_[i] + "\" appears twice");
    }
    bool nonzero = false;
    for (float v : vectors_.row(i)) nonzero = nonzero || v != 0.0f;
    if (!nonzero) throw Error(Errc::degenerate_vector, "embedding of \"" + terms_[i] + "\" is all zeros");
  }
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& tensor_file,
                                    const std::filesystem::path& vocab_file) {
  Tensor vectors = load_tensor(tensor_file);
  std::vector<std::string> terms;
  for (const auto& row : detail::read_jsonl(vocab_file)) {
    if (row.value.is_string()) {
      terms.push_back(row.value.get<std::string>());
    } else if (row.value.is_object() && row.value.contains("term") && row.value["term"].is_string()) {
      terms.push_back(row.value["term"].get<std::string>());
    } else {
      throw Error(Errc::parse, vocab_file.string() + ":" + std::to_string(row.line_number) +
                                   ": expected a JSON string or {\"term\": ...}");
    }
  }
  return EmbeddingTable(std::move(terms), std::move(vectors));
}

void EmbeddingTable::save(const std::filesystem::path& tensor_file,
                          const std::filesystem::path& vocab_file) const {
  save_tensor(tensor_file, vectors_);
  std::vector<detail::json> rows(terms_.begin(), terms_.end());
  detail::write_jsonl(vocab_file, rows);
}

std::span<const float> EmbeddingTable::find(std::string_view term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return {};
  return vectors_.row(it->second);
}

namespace {

template <typename A, typename B>
double cosine_impl(std::span<const A> a, std::span<const B> b) {
  if (a.size() != b.size()) {
    throw Error(Errc::dimension_mismatch,
                "cosine of vectors of length " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na == 0.0 || nb == 0.0) throw Error(Errc::degenerate_vector, "cosine of a zero vector");
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

Vector normalized_mean(std::span<const std::string> words, const EmbeddingTable& table, std::size_t* found) {
  Vector mean(table.dim(), 0.0);
  *found = 0;
  for (const auto& w : words) {
    const auto v = table.find(w);
    if (v.empty()) continue;
    for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i];
    ++*found;
  }
  if (*found == 0) return {};
  double norm = 0.0;
  for (auto& x : mean) {
    x /= static_cast<double>(*found);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) throw Error(Errc::degenerate_vector, "word vectors average to zero");
  for (auto& x : mean) x /= norm;
  return mean;
}

}  // namespace

double cosine(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }
double cosine(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }
double cosine(std::span<const double> a, std::span<const float> b) { return cosine_impl(a, b); }

Vector synset_vector(std::span<const std::string> words, const EmbeddingTable& table) {
  std::size_t found = 0;
  auto v = normalized_mean(words, table, &found);
  if (found == 0) throw Error(Errc::unmapped_synset, "no synset word is in the embedding table");
  return v;
}

Vector embed_query(std::span<const std::string> words, const EmbeddingTable& table) {
  std::size_t found = 0;
  auto v = normalized_mean(words, table, &found);
  if (found == 0) throw Error(Errc::unknown_query, "no query word is in the embedding table");
  return v;
}

std::vector<std::string> tokenize_query(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '_' || c == '-' || c >= 0x80) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

const CorpusCategory& map_concept(std::span<const float> u, std::span<const CorpusCategory> categories) {
  if (categories.empty()) throw Error(Errc::unmapped_term, "no corpus category to map onto");
  const CorpusCategory* best = nullptr;
  double best_sim = -2.0;
  for (const auto& c : categories) {
    const double sim = cosine(std::span<const double>(c.synset_vector), u);
    if (best == nullptr || sim > best_sim || (sim == best_sim && c.category_id < best->category_id)) {
      best = &c;
      best_sim = sim;
    }
  }
  return *best;
}

const CorpusCategory& map_concept(std::string_view lemma, const EmbeddingTable& table,
                                  std::span<const CorpusCategory> categories) {
  const auto u = table.find(lemma);
  if (u.empty()) throw Error(Errc::unmapped_term, "\"" + std::string(lemma) + "\" has no embedding");
  return map_concept(u, categories);
}

std::size_t match_query_to_concept(std::span<const double> query, std::span<const std::string> lemmas,
                                   const Tensor& vectors) {
  if (lemmas.empty()) throw Error(Errc::empty_index, "index vocabulary is empty");
  if (vectors.rank() != 2 || vectors.rows() != lemmas.size()) {
    throw Error(Errc::dimension_mismatch, "vocabulary vectors do not match the lemma list");
  }
  std::size_t best = 0;
  double best_sim = -2.0;
  for (std::size_t i = 0; i < lemmas.size(); ++i) {
    const double sim = cosine(query, vectors.row(i));
    if (i == 0 || sim > best_sim || (sim == best_sim && lemmas[i] < lemmas[best])) {
      best = i;
      best_sim = sim;
    }
  }
  return best;
}

}  // namespace scenesearch::embed
