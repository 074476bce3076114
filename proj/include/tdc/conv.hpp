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
#include <optional>

#include "tdc/tensor.hpp"

namespace tdc {

struct ConvParams {
  std::size_t stride_h = 1;
  std::size_t stride_w = 1;
  std::size_t pad_h = 0;
  std::size_t pad_w = 0;
  std::size_t groups = 1;

  static ConvParams uniform(std::size_t stride, std::size_t padding) {
    return {stride, stride, padding, padding, 1};
  }
  bool operator==(const ConvParams&) const = default;
};

std::size_t conv_output_size(std::size_t in, std::size_t kernel, std::size_t stride,
                             std::size_t pad);

/// Direct zero-padded cross-correlation.
/// input: C×Hin×Win, weight: (C/groups)×kh×kw×T, output: T×Hout×Wout with
/// Hout = floor((Hin + 2·pad_h − kh)/stride_h) + 1 (likewise for width).
/// Output channel t reads input group t / (T/groups).
DenseTensor conv2d_forward(const DenseTensor& input, const DenseTensor& weight,
                           const ConvParams& params,
                           const std::optional<DenseTensor>& bias = std::nullopt);

inline DenseTensor conv2d_forward(const DenseTensor& input, const DenseTensor& weight,
                                  std::size_t stride, std::size_t padding) {
  return conv2d_forward(input, weight, ConvParams::uniform(stride, padding));
}

}  // namespace tdc
