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

#include "tdc/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tdc {

std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  return os.str();
}

namespace {

void validate_shape(const Shape& shape) {
  if (shape.empty()) throw std::invalid_argument("DenseTensor: shape must have at least one mode");
  for (auto s : shape) {
    if (s == 0) throw std::invalid_argument("DenseTensor: mode sizes must be >= 1");
  }
}

// Splits shape around `mode` into (outer, mode size, inner) extents.
struct ModeSplit {
  std::size_t outer = 1;
  std::size_t mid = 1;
  std::size_t inner = 1;
};

ModeSplit split_at(const Shape& shape, std::size_t mode) {
  ModeSplit s;
  for (std::size_t i = 0; i < mode; ++i) s.outer *= shape[i];
  s.mid = shape[mode];
  for (std::size_t i = mode + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

}  // namespace

DenseTensor::DenseTensor(Shape shape, double fill) : shape_(std::move(shape)) {
  validate_shape(shape_);
  data_.assign(element_count(shape_), fill);
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> values, DType dtype)
    : shape_(std::move(shape)), data_(std::move(values)), dtype_(dtype) {
  validate_shape(shape_);
  if (element_count(shape_) != data_.size()) {
    throw std::invalid_argument("DenseTensor: product(shape) = " +
                                std::to_string(element_count(shape_)) + " but " +
                                std::to_string(data_.size()) + " values given");
  }
}

std::size_t DenseTensor::offset(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) throw std::out_of_range("DenseTensor: index rank mismatch");
  std::size_t off = 0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= shape_[i]) throw std::out_of_range("DenseTensor: index out of range");
    off = off * shape_[i] + index[i];
  }
  return off;
}

double& DenseTensor::at(std::initializer_list<std::size_t> index) {
  return data_[offset(std::span<const std::size_t>(index.begin(), index.size()))];
}

double DenseTensor::at(std::initializer_list<std::size_t> index) const {
  return data_[offset(std::span<const std::size_t>(index.begin(), index.size()))];
}

DenseTensor DenseTensor::reshaped(Shape shape) const {
  return DenseTensor(std::move(shape), data_, dtype_);
}

DenseTensor operator-(const DenseTensor& a, const DenseTensor& b) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument("tensor subtraction: shape mismatch " + shape_string(a.shape()) +
                                " vs " + shape_string(b.shape()));
  }
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
  return DenseTensor(a.shape(), std::move(v));
}

DenseTensor operator*(double alpha, const DenseTensor& t) {
  std::vector<double> v(t.values());
  for (auto& x : v) x *= alpha;
  return DenseTensor(t.shape(), std::move(v), t.dtype());
}

double frobenius_norm(const DenseTensor& t) {
  double s = 0.0;
  for (double v : t.data()) s += v * v;
  return std::sqrt(s);
}

Matrix unfold(const DenseTensor& t, std::size_t mode) {
  if (mode >= t.ndim()) {
    throw std::out_of_range("unfold: mode " + std::to_string(mode) + " out of range for " +
                            std::to_string(t.ndim()) + "-way tensor");
  }
  const auto s = split_at(t.shape(), mode);
  Matrix m(s.mid, s.outer * s.inner);
  const auto src = t.data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t k = 0; k < s.mid; ++k) {
      const double* from = src.data() + (o * s.mid + k) * s.inner;
      double* to = m.data().data() + k * m.cols() + o * s.inner;
      for (std::size_t i = 0; i < s.inner; ++i) to[i] = from[i];
    }
  return m;
}

DenseTensor fold(const Matrix& m, std::size_t mode, const Shape& shape) {
  if (mode >= shape.size()) throw std::out_of_range("fold: mode out of range");
  const auto s = split_at(shape, mode);
  if (m.rows() != s.mid || m.cols() != s.outer * s.inner) {
    throw std::invalid_argument("fold: matrix shape does not match target tensor shape");
  }
  DenseTensor t(shape);
  auto dst = t.data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t k = 0; k < s.mid; ++k) {
      const double* from = m.data().data() + k * m.cols() + o * s.inner;
      double* to = dst.data() + (o * s.mid + k) * s.inner;
      for (std::size_t i = 0; i < s.inner; ++i) to[i] = from[i];
    }
  return t;
}

DenseTensor mode_n_product(const DenseTensor& t, const Matrix& m, std::size_t mode) {
  if (mode >= t.ndim()) throw std::out_of_range("mode_n_product: mode out of range");
  if (m.cols() != t.dim(mode)) {
    throw std::invalid_argument("mode_n_product: matrix has " + std::to_string(m.cols()) +
                                " columns but mode " + std::to_string(mode) + " has size " +
                                std::to_string(t.dim(mode)));
  }
  const auto s = split_at(t.shape(), mode);
  Shape out_shape = t.shape();
  out_shape[mode] = m.rows();
  DenseTensor out(out_shape);
  const auto src = t.data();
  auto dst = out.data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t y = 0; y < m.rows(); ++y) {
      double* to = dst.data() + (o * m.rows() + y) * s.inner;
      for (std::size_t k = 0; k < s.mid; ++k) {
        const double w = m(y, k);
        if (w == 0.0) continue;
        const double* from = src.data() + (o * s.mid + k) * s.inner;
        for (std::size_t i = 0; i < s.inner; ++i) to[i] += w * from[i];
      }
    }
  return out;
}

}  // namespace tdc
