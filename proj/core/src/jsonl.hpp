// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenesearch/tensor.hpp"

namespace scenesearch::detail {

using json = nlohmann::json;

struct JsonLine {
  std::size_t line_number;
  json value;
};

// Blank lines are skipped; a malformed line throws Error(parse) naming file and line.
std::vector<JsonLine> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::string tensor_to_base64(const Tensor& t);
Tensor tensor_from_base64(const std::string& text);

// Typed field access with errors that name the field.
template <typename T>
T field(const json& obj, const char* name) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw std::invalid_argument(std::string("missing field \"") + name + "\"");
  }
  try {
    return obj.at(name).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("field \"") + name + "\" has the wrong type");
  }
}

}  // namespace scenesearch::detail
