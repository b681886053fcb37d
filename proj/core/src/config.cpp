// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include "scenesearch/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "jsonl.hpp"
#include "scenesearch/error.hpp"

namespace scenesearch {

using detail::json;

void EngineConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::invalid_config, what); };
  if (!(sigma_a > 0.0) || !std::isfinite(sigma_a)) fail("sigma_a must be > 0");
  if (!(sigma_b > 0.0) || !std::isfinite(sigma_b)) fail("sigma_b must be > 0");
  if (!(svm_c_rank > 0.0) || !std::isfinite(svm_c_rank)) fail("svm_c_rank must be > 0");
  if (!(svm_c_concept > 0.0) || !std::isfinite(svm_c_concept)) fail("svm_c_concept must be > 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0, 1]");
  if (candidate_window && !(*candidate_window >= 0.0)) fail("candidate_window must be >= 0");
  if (map_size < 2) fail("map_size must be >= 2");
  if (!(neg_ratio > 0.0) || !std::isfinite(neg_ratio)) fail("neg_ratio must be > 0");
}

void apply_config_json(EngineConfig& c, const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::invalid_config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::invalid_config, "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "sigma_a") c.sigma_a = value.get<double>();
      else if (key == "sigma_b") c.sigma_b = value.get<double>();
      else if (key == "svm_c_rank") c.svm_c_rank = value.get<double>();
      else if (key == "svm_c_concept") c.svm_c_concept = value.get<double>();
      else if (key == "alpha") c.alpha = value.get<double>();
      else if (key == "candidate_window") {
        c.candidate_window = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
      } else if (key == "map_size") c.map_size = value.get<std::size_t>();
      else if (key == "neg_ratio") c.neg_ratio = value.get<double>();
      else throw Error(Errc::invalid_config, "unknown config key \"" + key + "\"");
    } catch (const json::exception&) {
      throw Error(Errc::invalid_config, "config key \"" + key + "\" has the wrong type");
    }
  }
  c.validate();
}

EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_file, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  EngineConfig c;
  apply_config_json(c, buffer.str());
  return c;
}

std::string config_to_json(const EngineConfig& c) {
  json doc = {
      {"sigma_a", c.sigma_a},
      {"sigma_b", c.sigma_b},
      {"svm_c_rank", c.svm_c_rank},
      {"svm_c_concept", c.svm_c_concept},
      {"alpha", c.alpha},
      {"candidate_window", c.window()},
      {"map_size", c.map_size},
      {"neg_ratio", c.neg_ratio},
  };
  return doc.dump();
}

}  // namespace scenesearch
