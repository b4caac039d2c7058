// Copyright 2026 The semood Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEMOOD_TENSOR_HPP
#define SEMOOD_TENSOR_HPP

#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semood/error.hpp"

namespace semood {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_to_string(const Shape& shape);

/// Dense row-major n-dimensional array. `Tensor` (float) is the storage type
/// used everywhere; the double instantiation exists for gradient checking.
template <class T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;

  explicit BasicTensor(Shape shape)
      : shape_(std::move(shape)), data_(shape_size(shape_), T{}) {}

  BasicTensor(Shape shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    require(shape_size(shape_) == data_.size(), ErrorCode::kShapeMismatch,
            "tensor data length " + std::to_string(data_.size()) +
                " does not match shape " + shape_to_string(shape_));
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  std::vector<T>& storage() noexcept { return data_; }
  const std::vector<T>& storage() const noexcept { return data_; }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  /// Number of elements in one slice along axis 0.
  std::size_t item_size() const noexcept {
    std::size_t n = 1;
    for (std::size_t a = 1; a < shape_.size(); ++a) n *= shape_[a];
    return n;
  }

  /// Contiguous view of item `i` along axis 0.
  std::span<T> item(std::size_t i) {
    const std::size_t n = item_size();
    return std::span<T>(data_).subspan(i * n, n);
  }
  std::span<const T> item(std::size_t i) const {
    const std::size_t n = item_size();
    return std::span<const T>(data_).subspan(i * n, n);
  }

  /// Copies item `i` along axis 0 into a tensor of the remaining shape.
  BasicTensor slice(std::size_t i) const {
    Shape inner(shape_.begin() + 1, shape_.end());
    auto view = item(i);
    return BasicTensor(std::move(inner), std::vector<T>(view.begin(), view.end()));
  }

  BasicTensor reshaped(Shape shape) const {
    return BasicTensor(std::move(shape), data_);
  }

  bool operator==(const BasicTensor& other) const = default;

 private:
  Shape shape_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;

/// Row-major double matrix used for feature tables and model parameters.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

  std::span<double> row(std::size_t r) {
    return std::span<double>(values).subspan(r * cols, cols);
  }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values).subspan(r * cols, cols);
  }

  bool operator==(const Matrix& other) const = default;
};

/// Interprets a rank-2 tensor (N×d) as a matrix; rank-1 tensors become N×1.
Matrix to_matrix(const Tensor& t);
Tensor to_tensor(const Matrix& m);

}  // namespace semood

#endif  // SEMOOD_TENSOR_HPP
