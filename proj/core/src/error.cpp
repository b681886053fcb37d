// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include "scenesearch/error.hpp"

#include <algorithm>

namespace scenesearch {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::bad_magic: return "bad-magic";
    case Errc::truncated: return "truncated";
    case Errc::non_finite: return "non-finite";
    case Errc::bad_rank: return "bad-rank";
    case Errc::bad_dims: return "bad-dims";
    case Errc::trailing_bytes: return "trailing-bytes";
    case Errc::io: return "io";
    case Errc::parse: return "parse";
    case Errc::missing_file: return "missing-file";
    case Errc::bad_partition: return "bad-partition";
    case Errc::duplicate_id: return "duplicate-id";
    case Errc::bad_reference: return "bad-reference";
    case Errc::degenerate_vector: return "degenerate-vector";
    case Errc::unmapped_synset: return "unmapped-synset";
    case Errc::unmapped_term: return "unmapped-term";
    case Errc::unknown_query: return "unknown-query";
    case Errc::empty_index: return "empty-index";
    case Errc::degenerate_training_set: return "degenerate-training-set";
    case Errc::single_class: return "single-class";
    case Errc::no_pairs: return "no-pairs";
    case Errc::incomplete_bundle: return "incomplete-bundle";
    case Errc::missing_features: return "missing-features";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::invalid_config: return "invalid-config";
    case Errc::index_missing: return "index-missing";
    case Errc::usage: return "usage";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code), detail_(message) {}

namespace {

std::string join_violations(const std::vector<Violation>& violations) {
  std::string out = std::to_string(violations.size()) + " dataset violation(s)";
  for (const auto& v : violations) {
    out += "\n  [";
    out += errc_name(v.code);
    out += "] ";
    out += v.message;
  }
  return out;
}

}  // namespace

DatasetError::DatasetError(std::vector<Violation> violations)
    : Error(violations.empty() ? Errc::parse : violations.front().code,
            join_violations(violations)),
      violations_(std::move(violations)) {}

bool DatasetError::has(Errc code) const noexcept {
  return std::any_of(violations_.begin(), violations_.end(),
                     [code](const Violation& v) { return v.code == code; });
}

}  // namespace scenesearch
