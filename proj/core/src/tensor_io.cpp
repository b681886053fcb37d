// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include "scenesearch/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "scenesearch/error.hpp"

namespace scenesearch {

namespace le {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::uint32_t get_u32(const std::uint8_t* p) noexcept {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) noexcept {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

float get_f32(const std::uint8_t* p) noexcept { return std::bit_cast<float>(get_u32(p)); }

}  // namespace le

std::size_t encoded_tensor_size(const Tensor::Dims& dims) {
  return sizeof(kTensorMagic) + 4 + 8 * dims.size() + 4 * element_count(dims);
}

std::vector<std::uint8_t> write_tensor(const Tensor& t) {
  if (t.rank() == 0 || t.rank() > kMaxTensorRank) {
    throw Error(Errc::bad_rank, "cannot write tensor of rank " + std::to_string(t.rank()));
  }
  const auto data = t.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw Error(Errc::non_finite, "refusing to write non-finite value at element " + std::to_string(i));
    }
  }
  std::vector<std::uint8_t> out;
  out.reserve(encoded_tensor_size(t.dims()));
  out.insert(out.end(), std::begin(kTensorMagic), std::end(kTensorMagic));
  le::put_u32(out, static_cast<std::uint32_t>(t.rank()));
  for (auto d : t.dims()) le::put_u64(out, d);
  for (float v : data) le::put_f32(out, v);
  return out;
}

Tensor read_tensor(std::span<const std::uint8_t> bytes) {
  const std::size_t n = bytes.size();
  const std::size_t magic_len = sizeof(kTensorMagic);
  const std::size_t probe = std::min(n, magic_len);
  if (std::memcmp(bytes.data(), kTensorMagic, probe) != 0) {
    throw Error(Errc::bad_magic, "expected \"SCNTNSR1\" at byte offset 0");
  }
  if (n < magic_len + 4) {
    throw Error(Errc::truncated, "header ends at byte offset " + std::to_string(n));
  }
  const std::uint32_t rank = le::get_u32(bytes.data() + magic_len);
  if (rank == 0 || rank > kMaxTensorRank) {
    throw Error(Errc::bad_rank, "rank " + std::to_string(rank) + " at byte offset 8 (allowed 1..8)");
  }
  std::size_t off = magic_len + 4;
  if (n < off + 8 * std::size_t{rank}) {
    throw Error(Errc::truncated, "dims end at byte offset " + std::to_string(n));
  }
  Tensor::Dims dims(rank);
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i, off += 8) {
    dims[i] = le::get_u64(bytes.data() + off);
    if (dims[i] == 0) {
      throw Error(Errc::bad_dims, "zero dimension at byte offset " + std::to_string(off));
    }
    if (count > std::numeric_limits<std::uint64_t>::max() / 4 / dims[i]) {
      throw Error(Errc::bad_dims, "element count overflows at byte offset " + std::to_string(off));
    }
    count *= dims[i];
  }
  const std::uint64_t payload = 4 * count;
  const std::uint64_t available = n - off;
  if (available < payload) {
    throw Error(Errc::truncated, "payload needs " + std::to_string(payload) + " bytes after offset " +
                                     std::to_string(off) + ", found " + std::to_string(available));
  }
  if (available > payload) {
    throw Error(Errc::trailing_bytes, "unexpected data at byte offset " + std::to_string(off + payload));
  }
  std::vector<float> data(count);
  for (std::uint64_t i = 0; i < count; ++i, off += 4) {
    data[i] = le::get_f32(bytes.data() + off);
    if (!std::isfinite(data[i])) {
      throw Error(Errc::non_finite, "non-finite value at byte offset " + std::to_string(off));
    }
  }
  return Tensor(std::move(dims), std::move(data));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::missing_file, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> bytes(size);
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size))) {
    throw Error(Errc::io, "short read from " + path.string());
  }
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io, "write failed for " + path.string());
}

void save_tensor(const std::filesystem::path& path, const Tensor& t) {
  write_file_bytes(path, write_tensor(t));
}

Tensor load_tensor(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return read_tensor(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

}  // namespace scenesearch
