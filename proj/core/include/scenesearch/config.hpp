// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

namespace scenesearch {

struct EngineConfig {
  double sigma_a = 5.0;        // temporal Gaussian width, seconds
  double sigma_b = 4.5;        // center-weighting width, in units of the map side
  double svm_c_rank = 3.0;     // ranking SVM trade-off
  double svm_c_concept = 1.0;  // concept SVM trade-off
  double alpha = 0.5;          // semantic vs aesthetic blend
  std::optional<double> candidate_window;  // seconds; unset means 3 * sigma_a
  std::size_t map_size = 56;   // hypercolumn side S
  double neg_ratio = 1.0;      // negatives per positive for concept training

  double window() const noexcept { return candidate_window.value_or(3.0 * sigma_a); }

  // Throws Error(invalid_config) naming the first offending field.
  void validate() const;
};

// Overrides the fields present in a JSON object; unknown keys are rejected.
void apply_config_json(EngineConfig& config, const std::string& json_text);
EngineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const EngineConfig& config);

}  // namespace scenesearch
