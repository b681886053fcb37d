// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scenesearch {

// Every failure the engine can report. The CLI maps each code to a distinct
// exit status, so append new codes at the end.
enum class Errc {
  bad_magic = 1,
  truncated,
  non_finite,
  bad_rank,
  bad_dims,
  trailing_bytes,
  io,
  parse,
  missing_file,
  bad_partition,
  duplicate_id,
  bad_reference,
  degenerate_vector,
  unmapped_synset,
  unmapped_term,
  unknown_query,
  empty_index,
  degenerate_training_set,
  single_class,
  no_pairs,
  incomplete_bundle,
  missing_features,
  dimension_mismatch,
  invalid_config,
  index_missing,
  usage,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }
  // Message without the "<code>: " prefix that what() carries.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

struct Violation {
  Errc code;
  std::string message;
};

// Raised by dataset loading; carries every violation found, not only the first.
class DatasetError : public Error {
 public:
  explicit DatasetError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const noexcept { return violations_; }
  bool has(Errc code) const noexcept;

 private:
  std::vector<Violation> violations_;
};

}  // namespace scenesearch
