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

#include "tdc/tensor_io.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

#include "tdc/binary.hpp"

namespace tdc {

namespace binary {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace binary

namespace {
constexpr std::uint8_t kMagic[4] = {'T', 'D', 'T', '1'};
}

std::vector<std::uint8_t> encode_tensor(const DenseTensor& t) { return encode_tensor(t, t.dtype()); }

std::vector<std::uint8_t> encode_tensor(const DenseTensor& t, DType dtype) {
  if (t.ndim() > 255) throw std::invalid_argument("TDT1: at most 255 modes");
  binary::Writer w;
  w.bytes(kMagic);
  w.u8(static_cast<std::uint8_t>(dtype));
  w.u8(static_cast<std::uint8_t>(t.ndim()));
  w.zeros(6);
  for (auto s : t.shape()) w.u64(s);
  for (double v : t.data()) {
    if (dtype == DType::f32)
      w.f32(static_cast<float>(v));
    else
      w.f64(v);
  }
  return w.take();
}

DenseTensor decode_tensor(std::span<const std::uint8_t> bytes) {
  binary::Reader r(bytes, "TDT1");
  auto magic = r.bytes(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) throw std::runtime_error("TDT1: bad magic");
  const auto code = r.u8();
  if (code > 1) throw std::runtime_error("TDT1: unknown dtype code " + std::to_string(code));
  const auto dtype = static_cast<DType>(code);
  const auto ndim = r.u8();
  if (ndim == 0) throw std::runtime_error("TDT1: zero-mode tensor");
  r.bytes(6);
  Shape shape(ndim);
  std::size_t count = 1;
  for (auto& s : shape) {
    s = static_cast<std::size_t>(r.u64());
    if (s == 0) throw std::runtime_error("TDT1: zero mode size");
    count *= s;
  }
  const std::size_t width = dtype == DType::f32 ? 4 : 8;
  r.need(count * width);
  if (r.remaining() != count * width) throw std::runtime_error("TDT1: trailing bytes after payload");
  std::vector<double> values(count);
  for (auto& v : values) v = dtype == DType::f32 ? static_cast<double>(r.f32()) : r.f64();
  return DenseTensor(std::move(shape), std::move(values), dtype);
}

void write_tensor(const std::filesystem::path& path, const DenseTensor& t) {
  binary::write_file(path, encode_tensor(t));
}

void write_tensor(const std::filesystem::path& path, const DenseTensor& t, DType dtype) {
  binary::write_file(path, encode_tensor(t, dtype));
}

DenseTensor read_tensor(const std::filesystem::path& path) {
  try {
    return decode_tensor(binary::read_file(path));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace tdc
