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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tdc/tensor.hpp"

namespace tdc {

// TDT1 layout: "TDT1" | u8 dtype (0 f32, 1 f64) | u8 ndim | 6 zero bytes |
// ndim x u64 mode sizes | row-major payload, all little-endian.

std::vector<std::uint8_t> encode_tensor(const DenseTensor& t);
std::vector<std::uint8_t> encode_tensor(const DenseTensor& t, DType dtype);
DenseTensor decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const std::filesystem::path& path, const DenseTensor& t);
void write_tensor(const std::filesystem::path& path, const DenseTensor& t, DType dtype);
DenseTensor read_tensor(const std::filesystem::path& path);

}  // namespace tdc
