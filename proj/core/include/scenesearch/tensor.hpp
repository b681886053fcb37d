// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace scenesearch {

/// Dense row-major f32 array. The universal payload exchanged with the
/// feature extractor: activation maps, fc6 vectors, embedding tables.
///
/// A default-constructed Tensor is empty (rank 0) and is only a placeholder;
/// every other constructor enforces `size() == product(dims)` and `dims >= 1`.
class Tensor {
 public:
  using Dims = std::vector<std::uint64_t>;

  Tensor() = default;
  Tensor(Dims dims, std::vector<float> data);

  static Tensor zeros(Dims dims);
  static Tensor vector(std::vector<float> data);

  std::size_t rank() const noexcept { return dims_.size(); }
  const Dims& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  float operator[](std::size_t i) const { return data_[i]; }
  float& operator[](std::size_t i) { return data_[i]; }

  // Rank-2 accessors.
  std::size_t rows() const;
  std::size_t cols() const;
  float operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  float& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  std::span<const float> row(std::size_t r) const;

  bool all_finite() const noexcept;

  // Bitwise comparison of the payload: 0.0f and -0.0f are different tensors.
  friend bool operator==(const Tensor& a, const Tensor& b) noexcept;

 private:
  Dims dims_;
  std::vector<float> data_;
};

std::uint64_t element_count(const Tensor::Dims& dims);

}  // namespace scenesearch
