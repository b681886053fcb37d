// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "scenesearch/tensor.hpp"

namespace scenesearch {

// On-disk layout, all integers little-endian:
//
//   magic  "SCNTNSR1"           8 bytes
//   rank   u32                  4 bytes, 1..8
//   dims   rank x u64           8*rank bytes, each >= 1
//   data   prod(dims) x f32     row-major
inline constexpr char kTensorMagic[8] = {'S', 'C', 'N', 'T', 'N', 'S', 'R', '1'};
inline constexpr std::uint32_t kMaxTensorRank = 8;

std::size_t encoded_tensor_size(const Tensor::Dims& dims);

/// Serializes `t`; throws Error(non_finite) rather than writing NaN/Inf.
std::vector<std::uint8_t> write_tensor(const Tensor& t);

/// Inverse of write_tensor. Errors name the violation and its byte offset.
Tensor read_tensor(std::span<const std::uint8_t> bytes);

void save_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor load_tensor(const std::filesystem::path& path);

// Little-endian primitives shared by the other binary formats.
namespace le {
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v);
void put_f32(std::vector<std::uint8_t>& out, float v);
std::uint32_t get_u32(const std::uint8_t* p) noexcept;
std::uint64_t get_u64(const std::uint8_t* p) noexcept;
float get_f32(const std::uint8_t* p) noexcept;
}  // namespace le

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace scenesearch
