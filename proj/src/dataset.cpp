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

#include "tdc/dataset.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "tdc/binary.hpp"

namespace tdc {

namespace {
constexpr std::uint8_t kMagic[4] = {'T', 'D', 'S', '1'};
}

Dataset::Dataset(std::size_t channels, std::size_t height, std::size_t width,
                 std::vector<double> pixels, std::vector<std::uint16_t> labels, DType dtype)
    : channels_(channels),
      height_(height),
      width_(width),
      pixels_(std::move(pixels)),
      labels_(std::move(labels)),
      dtype_(dtype) {
  if (channels_ == 0 || height_ == 0 || width_ == 0)
    throw std::invalid_argument("Dataset: image dimensions must be >= 1");
  if (pixels_.size() != labels_.size() * sample_size())
    throw std::invalid_argument("Dataset: pixel count does not match labels x C x H x W");
}

DenseTensor Dataset::sample(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("Dataset: sample index out of range");
  const auto n = sample_size();
  const auto first = pixels_.begin() + static_cast<std::ptrdiff_t>(i * n);
  return DenseTensor({channels_, height_, width_}, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(n)));
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> px;
  std::vector<std::uint16_t> lb;
  px.reserve(indices.size() * sample_size());
  for (auto i : indices) {
    if (i >= size()) throw std::out_of_range("Dataset::subset: index out of range");
    const auto first = pixels_.begin() + static_cast<std::ptrdiff_t>(i * sample_size());
    px.insert(px.end(), first, first + static_cast<std::ptrdiff_t>(sample_size()));
    lb.push_back(labels_[i]);
  }
  return Dataset(channels_, height_, width_, std::move(px), std::move(lb), dtype_);
}

std::vector<std::uint8_t> encode_dataset(const Dataset& d) {
  constexpr auto u32max = std::numeric_limits<std::uint32_t>::max();
  if (d.size() > u32max || d.channels() > u32max || d.height() > u32max || d.width() > u32max)
    throw std::invalid_argument("TDS1: dimensions exceed u32");
  binary::Writer w;
  w.bytes(kMagic);
  w.u32(static_cast<std::uint32_t>(d.size()));
  w.u32(static_cast<std::uint32_t>(d.channels()));
  w.u32(static_cast<std::uint32_t>(d.height()));
  w.u32(static_cast<std::uint32_t>(d.width()));
  w.u8(static_cast<std::uint8_t>(d.dtype()));
  for (double v : d.pixels()) {
    if (d.dtype() == DType::f32)
      w.f32(static_cast<float>(v));
    else
      w.f64(v);
  }
  for (auto l : d.labels()) w.u16(l);
  return w.take();
}

Dataset decode_dataset(std::span<const std::uint8_t> bytes) {
  binary::Reader r(bytes, "TDS1");
  auto magic = r.bytes(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) throw std::runtime_error("TDS1: bad magic");
  const std::size_t count = r.u32();
  const std::size_t c = r.u32();
  const std::size_t h = r.u32();
  const std::size_t wd = r.u32();
  const auto code = r.u8();
  if (code > 1) throw std::runtime_error("TDS1: unknown dtype code " + std::to_string(code));
  const auto dtype = static_cast<DType>(code);
  const std::size_t width = dtype == DType::f32 ? 4 : 8;
  const std::size_t n = count * c * h * wd;
  r.need(n * width + count * 2);
  std::vector<double> px(n);
  for (auto& v : px) v = dtype == DType::f32 ? static_cast<double>(r.f32()) : r.f64();
  std::vector<std::uint16_t> labels(count);
  for (auto& l : labels) l = r.u16();
  if (r.remaining() != 0) throw std::runtime_error("TDS1: trailing bytes after labels");
  return Dataset(c, h, wd, std::move(px), std::move(labels), dtype);
}

void write_dataset(const std::filesystem::path& path, const Dataset& d) {
  binary::write_file(path, encode_dataset(d));
}

Dataset read_dataset(const std::filesystem::path& path) {
  try {
    return decode_dataset(binary::read_file(path));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::vector<std::size_t> strided_indices(std::size_t count, std::size_t n) {
  std::vector<std::size_t> idx;
  if (n >= count) {
    idx.resize(count);
    for (std::size_t i = 0; i < count; ++i) idx[i] = i;
    return idx;
  }
  idx.reserve(n);
  for (std::size_t i = 0; i < n; ++i) idx.push_back(i * count / n);
  return idx;
}

}  // namespace tdc
