// Copyright 2026 The tdc Authors
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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tdc/matrix.hpp"

namespace tdc {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Storage precision recorded when a tensor is written to disk. Arithmetic is
/// always carried out in double.
enum class DType : unsigned char { f32 = 0, f64 = 1 };

/// N-way dense tensor, row-major (last mode varies fastest).
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(Shape shape, double fill = 0.0);
  DenseTensor(Shape shape, std::vector<double> values, DType dtype = DType::f64);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t ndim() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t mode) const { return shape_.at(mode); }
  std::size_t size() const noexcept { return data_.size(); }
  DType dtype() const noexcept { return dtype_; }
  void set_dtype(DType d) noexcept { dtype_ = d; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  /// Multi-index access; the index count must equal ndim().
  double& at(std::initializer_list<std::size_t> index);
  double at(std::initializer_list<std::size_t> index) const;
  std::size_t offset(std::span<const std::size_t> index) const;

  /// Same values, new shape with identical element count.
  DenseTensor reshaped(Shape shape) const;

  bool operator==(const DenseTensor& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

 private:
  Shape shape_;
  std::vector<double> data_;
  DType dtype_ = DType::f64;
};

DenseTensor operator-(const DenseTensor& a, const DenseTensor& b);
DenseTensor operator*(double alpha, const DenseTensor& t);

double frobenius_norm(const DenseTensor& t);

/// Mode-n unfolding: rows indexed by mode `mode`, columns enumerate the
/// remaining modes in ascending order with the highest mode varying fastest.
Matrix unfold(const DenseTensor& t, std::size_t mode);

/// Inverse of unfold for a target shape.
DenseTensor fold(const Matrix& m, std::size_t mode, const Shape& shape);

/// n-mode product: contracts mode `mode` of `t` with the columns of `m`;
/// the result has shape[mode] replaced by m.rows().
DenseTensor mode_n_product(const DenseTensor& t, const Matrix& m, std::size_t mode);

}  // namespace tdc
