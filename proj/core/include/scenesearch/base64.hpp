// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scenesearch {

// RFC 4648 standard alphabet with '=' padding.
std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace scenesearch
