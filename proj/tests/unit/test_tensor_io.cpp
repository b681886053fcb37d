// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "pipeline.hpp"
#include "scenesearch/error.hpp"
#include "scenesearch/rng.hpp"
#include "scenesearch/tensor_io.hpp"

using namespace scenesearch;

namespace {

Errc read_error(const std::vector<std::uint8_t>& bytes) {
  try {
    read_tensor(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "read_tensor accepted malformed input";
  return Errc::usage;
}

}  // namespace

TEST(TensorIo, SingleElementIsTwentyFourBytes) {
  EXPECT_EQ(write_tensor(Tensor({1}, {0.0f})).size(), 24u);
}

TEST(TensorIo, RoundTripSmallMatrix) {
  const Tensor t({2, 2}, {0.0f, 1.0f, 2.0f, 3.0f});
  EXPECT_EQ(read_tensor(write_tensor(t)), t);
}

TEST(TensorIo, SizeFormulaRankThree) {
  Rng rng(11);
  std::vector<float> data(60);
  for (auto& v : data) v = static_cast<float>(rng.normal());
  const auto bytes = write_tensor(Tensor({3, 4, 5}, data));
  EXPECT_EQ(bytes.size(), 8u + 4u + 24u + 240u);
  EXPECT_EQ(bytes.size(), encoded_tensor_size({3, 4, 5}));
}

TEST(TensorIo, LittleEndianLayout) {
  const auto bytes = write_tensor(Tensor({1}, {1.0f}));
  const std::vector<std::uint8_t> expected = {'S', 'C', 'N', 'T', 'N', 'S', 'R', '1', 1, 0, 0, 0,
                                              1,   0,   0,   0,   0,   0,   0,   0,   0, 0, 0x80, 0x3f};
  EXPECT_EQ(bytes, expected);
}

TEST(TensorIo, RoundTripPreservesNegativeZeroAndSubnormals) {
  const Tensor t({4}, {-0.0f, std::numeric_limits<float>::denorm_min(), std::numeric_limits<float>::max(),
                       -std::numeric_limits<float>::min()});
  EXPECT_EQ(read_tensor(write_tensor(t)), t);
}

TEST(TensorIo, BadMagic) {
  auto bytes = write_tensor(Tensor({2}, {1.0f, 2.0f}));
  for (int i = 0; i < 8; ++i) bytes[i] = 'X';
  EXPECT_EQ(read_error(bytes), Errc::bad_magic);
}

TEST(TensorIo, TruncatedByOneByte) {
  auto bytes = write_tensor(Tensor({2, 3}, std::vector<float>(6, 1.5f)));
  bytes.pop_back();
  EXPECT_EQ(read_error(bytes), Errc::truncated);
}

TEST(TensorIo, TruncatedHeader) {
  auto bytes = write_tensor(Tensor({2, 3}, std::vector<float>(6, 1.5f)));
  bytes.resize(14);
  EXPECT_EQ(read_error(bytes), Errc::truncated);
}

TEST(TensorIo, NanPayloadRejected) {
  auto bytes = write_tensor(Tensor({2}, {1.0f, 2.0f}));
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::vector<std::uint8_t> tail;
  le::put_f32(tail, nan);
  std::copy(tail.begin(), tail.end(), bytes.end() - 4);
  EXPECT_EQ(read_error(bytes), Errc::non_finite);
}

TEST(TensorIo, ErrorNamesByteOffset) {
  auto bytes = write_tensor(Tensor({2}, {1.0f, 2.0f}));
  std::vector<std::uint8_t> tail;
  le::put_f32(tail, std::numeric_limits<float>::infinity());
  std::copy(tail.begin(), tail.end(), bytes.end() - 4);
  try {
    read_tensor(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("24"), std::string::npos) << e.what();
  }
}

TEST(TensorIo, WriteRefusesNonFinite) {
  EXPECT_THROW(write_tensor(Tensor({1}, {std::numeric_limits<float>::infinity()})), Error);
}

TEST(TensorIo, BadRankAndDims) {
  std::vector<std::uint8_t> zero_rank(kTensorMagic, kTensorMagic + 8);
  le::put_u32(zero_rank, 0);
  EXPECT_EQ(read_error(zero_rank), Errc::bad_rank);

  std::vector<std::uint8_t> big_rank(kTensorMagic, kTensorMagic + 8);
  le::put_u32(big_rank, 9);
  EXPECT_EQ(read_error(big_rank), Errc::bad_rank);

  std::vector<std::uint8_t> zero_dim(kTensorMagic, kTensorMagic + 8);
  le::put_u32(zero_dim, 1);
  le::put_u64(zero_dim, 0);
  EXPECT_EQ(read_error(zero_dim), Errc::bad_dims);
}

TEST(TensorIo, TrailingBytes) {
  auto bytes = write_tensor(Tensor({1}, {1.0f}));
  bytes.push_back(0);
  EXPECT_EQ(read_error(bytes), Errc::trailing_bytes);
}

TEST(TensorIo, ConstructorEnforcesShape) {
  EXPECT_THROW(Tensor({2, 2}, {1.0f, 2.0f, 3.0f}), Error);
  EXPECT_THROW(Tensor({0}, {}), Error);
}

TEST(TensorIo, RandomRoundTripProperty) {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto rank = 1 + rng.below(4);
    Tensor::Dims dims;
    for (std::size_t r = 0; r < rank; ++r) dims.push_back(1 + rng.below(6));
    std::vector<float> data(element_count(dims));
    for (auto& v : data) v = static_cast<float>(rng.normal() * std::pow(10.0, rng.uniform(-20, 20)));
    const Tensor t(dims, data);
    const auto bytes = write_tensor(t);
    ASSERT_EQ(bytes.size(), encoded_tensor_size(dims));
    ASSERT_EQ(read_tensor(bytes), t);
    ASSERT_EQ(write_tensor(read_tensor(bytes)), bytes);
  }
}

TEST(TensorIo, FileRoundTripAndMissingFile) {
  testing_support::TempDir dir("tensorio");
  const Tensor t({3}, {1.0f, -2.0f, 3.5f});
  save_tensor(dir / "a/b/t.tnsr", t);
  EXPECT_EQ(load_tensor(dir / "a/b/t.tnsr"), t);
  try {
    load_tensor(dir / "absent.tnsr");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::missing_file);
  }
}
