// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "scenesearch/config.hpp"
#include "scenesearch/error.hpp"
#include "scenesearch/engine.hpp"
#include "scenesearch/fixture.hpp"

namespace scenesearch::cli {

inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 1;
// Module errors exit with kExitErrorBase + the numeric error code.
inline constexpr int kExitErrorBase = 10;

struct Command {
  std::string subcommand;  // validate, train-concepts, train-ranker, build-index, query, evaluate, gen-fixture
  std::filesystem::path manifest;
  std::filesystem::path out = "scenesearch-out";
  EngineConfig config;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 = hardware concurrency
  bool pretty = false;

  std::string q;
  std::size_t k = 10;
  bool include_unmatched = false;
  engine::ThumbnailMode thumbnail = engine::ThumbnailMode::aesthetic;
  std::filesystem::path queries;
  bool leave_one_out = false;
  fixture::FixtureOptions fixture;

  // Set when parsing already produced the full answer (--help).
  std::optional<int> exit_now;
};

/// Strict parsing: unknown flags, a missing subcommand or a missing
/// --manifest throw Error(usage); out-of-range values throw
/// Error(invalid_config). Defaults equal the EngineConfig defaults. A config
/// file given with --config is applied first and flags override it.
Command parse_args(const std::vector<std::string>& args, std::ostream& out);

/// Runs one subcommand; results go to `out`, diagnostics to `err`.
int run(const Command& command, std::ostream& out, std::ostream& err);

int exit_code(const Error& e);

/// parse_args + run with every error mapped to its exit code.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scenesearch::cli
