// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include "scenesearch/tensor.hpp"

#include <cmath>
#include <cstring>

#include "scenesearch/error.hpp"

namespace scenesearch {

std::uint64_t element_count(const Tensor::Dims& dims) {
  std::uint64_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

Tensor::Tensor(Dims dims, std::vector<float> data) : dims_(std::move(dims)), data_(std::move(data)) {
  if (dims_.empty()) throw Error(Errc::bad_rank, "tensor must have rank >= 1");
  for (auto d : dims_) {
    if (d == 0) throw Error(Errc::bad_dims, "tensor dimensions must be >= 1");
  }
  if (element_count(dims_) != data_.size()) {
    throw Error(Errc::bad_dims, "tensor data length " + std::to_string(data_.size()) +
                                    " does not match product of dims " +
                                    std::to_string(element_count(dims_)));
  }
}

Tensor Tensor::zeros(Dims dims) {
  auto n = element_count(dims);
  return Tensor(std::move(dims), std::vector<float>(n, 0.0f));
}

Tensor Tensor::vector(std::vector<float> data) {
  Dims dims{data.size()};
  return Tensor(std::move(dims), std::move(data));
}

std::size_t Tensor::rows() const {
  if (rank() != 2) throw Error(Errc::dimension_mismatch, "rows() requires a rank-2 tensor");
  return dims_[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw Error(Errc::dimension_mismatch, "cols() requires a rank-2 tensor");
  return dims_[1];
}

std::span<const float> Tensor::row(std::size_t r) const {
  const auto c = cols();
  return std::span<const float>(data_).subspan(r * c, c);
}

bool Tensor::all_finite() const noexcept {
  for (float v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool operator==(const Tensor& a, const Tensor& b) noexcept {
  if (a.dims_ != b.dims_) return false;
  if (a.data_.size() != b.data_.size()) return false;
  return a.data_.empty() ||
         std::memcmp(a.data_.data(), b.data_.data(), a.data_.size() * sizeof(float)) == 0;
}

}  // namespace scenesearch
