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
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tdc/tensor.hpp"

namespace tdc {

/// Labelled image set. TDS1 layout: "TDS1" | u32 count | u32 channels |
/// u32 height | u32 width | u8 dtype (0 f32, 1 f64) | samples row-major |
/// u16 labels, all little-endian.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t channels, std::size_t height, std::size_t width,
          std::vector<double> pixels, std::vector<std::uint16_t> labels,
          DType dtype = DType::f32);

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t sample_size() const noexcept { return channels_ * height_ * width_; }
  DType dtype() const noexcept { return dtype_; }

  DenseTensor sample(std::size_t i) const;
  std::uint16_t label(std::size_t i) const { return labels_.at(i); }
  std::span<const std::uint16_t> labels() const noexcept { return labels_; }
  std::span<const double> pixels() const noexcept { return pixels_; }

  /// Samples at the given indices, in order.
  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  std::size_t channels_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> pixels_;
  std::vector<std::uint16_t> labels_;
  DType dtype_ = DType::f32;
};

std::vector<std::uint8_t> encode_dataset(const Dataset& d);
Dataset decode_dataset(std::span<const std::uint8_t> bytes);
void write_dataset(const std::filesystem::path& path, const Dataset& d);
Dataset read_dataset(const std::filesystem::path& path);

/// `n` indices spread evenly over [0, count): i·count/n. All indices if n >= count.
std::vector<std::size_t> strided_indices(std::size_t count, std::size_t n);

}  // namespace tdc
