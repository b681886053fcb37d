// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include "jsonl.hpp"

#include <fstream>
#include <sstream>

#include "scenesearch/base64.hpp"
#include "scenesearch/error.hpp"
#include "scenesearch/tensor_io.hpp"

namespace scenesearch::detail {

std::vector<JsonLine> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_file, "cannot open " + path.string());
  std::vector<JsonLine> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back({number, json::parse(line)});
    } catch (const json::parse_error& e) {
      throw Error(Errc::parse, path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows) {
  std::string text;
  for (const auto& row : rows) {
    text += row.dump();
    text += '\n';
  }
  write_text_file(path, text);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_file, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string tensor_to_base64(const Tensor& t) { return base64_encode(write_tensor(t)); }

Tensor tensor_from_base64(const std::string& text) { return read_tensor(base64_decode(text)); }

}  // namespace scenesearch::detail
