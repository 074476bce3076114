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

#include "tdc/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "tdc/random.hpp"

namespace tdc {

DenseTensor random_normal(const Shape& shape, std::uint64_t seed) {
  DenseTensor t(shape);
  CounterRng rng(seed);
  for (double& v : t.data()) v = rng.normal();
  return t;
}

namespace {

Layer conv_layer(const std::string& id, std::size_t in, std::size_t out, std::uint64_t seed) {
  Conv2dOp op;
  op.weight = random_normal({in, 3, 3, out}, seed);
  const double scale = std::sqrt(2.0 / static_cast<double>(in * 9));
  for (double& v : op.weight.data()) v *= scale;
  op.params = ConvParams::uniform(1, 1);
  return {id, op};
}

Layer batchnorm_layer(const std::string& id, std::size_t channels, std::uint64_t seed) {
  CounterRng rng(seed);
  BatchNormOp bn;
  for (std::size_t c = 0; c < channels; ++c) {
    bn.scale.push_back(rng.uniform(0.5, 1.5));
    bn.shift.push_back(rng.uniform(-0.1, 0.1));
    bn.mean.push_back(rng.uniform(-0.1, 0.1));
    bn.var.push_back(rng.uniform(0.5, 1.5));
  }
  return {id, bn};
}

Layer linear_layer(const std::string& id, std::size_t in, std::size_t out, std::uint64_t seed) {
  LinearOp op;
  op.weight = random_normal({in, out}, seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& v : op.weight.data()) v *= scale;
  op.bias = DenseTensor({out});
  return {id, op};
}

}  // namespace

ModelGraph synthetic_garipov(std::uint64_t seed, std::size_t class_count) {
  ModelGraph g;
  g.name = "garipov-synthetic";
  g.input_shape = {3, 32, 32};
  g.class_count = class_count;
  const std::size_t widths[] = {3, 64, 64, 128, 128, 128, 128};
  std::uint64_t stream = seed * 1000;
  for (std::size_t i = 1; i <= 6; ++i) {
    const auto n = std::to_string(i);
    g.layers.push_back(conv_layer("conv" + n, widths[i - 1], widths[i], ++stream));
    g.layers.push_back(batchnorm_layer("bn" + n, widths[i], ++stream));
    g.layers.push_back({"relu" + n, ReluOp{}});
    if (i == 2 || i == 4) g.layers.push_back({"pool" + std::to_string(i / 2), MaxPoolOp{2, 2}});
  }
  g.layers.push_back({"gap", GlobalAvgPoolOp{}});
  g.layers.push_back(linear_layer("fc", 128, class_count, ++stream));
  return g;
}

ModelGraph synthetic_convnet(const std::vector<std::size_t>& channels, std::size_t image_size,
                             std::size_t class_count, std::uint64_t seed) {
  if (channels.size() < 2) throw std::invalid_argument("synthetic_convnet: need at least one conv");
  ModelGraph g;
  g.name = "synthetic";
  g.input_shape = {channels.front(), image_size, image_size};
  g.class_count = class_count;
  std::uint64_t stream = seed * 1000;
  for (std::size_t i = 1; i < channels.size(); ++i) {
    const auto n = std::to_string(i);
    g.layers.push_back(conv_layer("conv" + n, channels[i - 1], channels[i], ++stream));
    g.layers.push_back({"relu" + n, ReluOp{}});
  }
  g.layers.push_back({"gap", GlobalAvgPoolOp{}});
  g.layers.push_back(linear_layer("fc", channels.back(), class_count, ++stream));
  return g;
}

Dataset synthetic_dataset(std::size_t samples, std::size_t channels, std::size_t height,
                          std::size_t width, std::size_t class_count, std::uint64_t seed) {
  if (class_count == 0) throw std::invalid_argument("synthetic_dataset: class_count must be >= 1");
  CounterRng rng(seed);
  std::vector<double> pixels(samples * channels * height * width);
  for (double& v : pixels) v = rng.normal();
  std::vector<std::uint16_t> labels(samples);
  for (auto& l : labels) l = static_cast<std::uint16_t>(rng.below(class_count));
  return Dataset(channels, height, width, std::move(pixels), std::move(labels));
}

}  // namespace tdc
