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
#include <string>
#include <vector>

#include "tdc/convnet.hpp"
#include "tdc/dataset.hpp"

namespace tdc {

/// Randomly initialised GaripovNet-shaped model for 3×32×32 inputs:
/// conv1 3→64, conv2 64→64, pool, conv3 64→128, conv4 128→128, pool,
/// conv5 128→128, conv6 128→128, global average pool, fc 128→10. Every conv
/// is 3×3 (stride 1, padding 1) followed by batchnorm and relu.
/// Decomposable layers: conv2 … conv6.
ModelGraph synthetic_garipov(std::uint64_t seed, std::size_t class_count = 10);

/// Small model with configurable widths: each entry of `channels` after the
/// first adds a 3×3 conv + relu; then global average pool and a linear head.
ModelGraph synthetic_convnet(const std::vector<std::size_t>& channels, std::size_t image_size,
                             std::size_t class_count, std::uint64_t seed);

/// Standard-normal pixels, uniform labels in [0, class_count).
Dataset synthetic_dataset(std::size_t samples, std::size_t channels, std::size_t height,
                          std::size_t width, std::size_t class_count, std::uint64_t seed);

/// Tensor with i.i.d. standard-normal entries.
DenseTensor random_normal(const Shape& shape, std::uint64_t seed);

}  // namespace tdc
