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
#include <span>
#include <vector>

#include "tdc/conv.hpp"
#include "tdc/tensor.hpp"

namespace tdc {

/// absolute = ‖a − b‖, relative = absolute / ‖reference‖, scaled = absolute / n.
struct ErrorTriple {
  double absolute = 0.0;
  double relative = 0.0;
  double scaled = 0.0;
};

/// The six approximation-error measures. Feature entries are present only
/// when a batch of layer inputs was supplied.
struct ErrorReport {
  ErrorTriple weight;
  std::optional<ErrorTriple> feature;
  std::size_t n_w = 0;
  std::size_t n_f = 0;
  std::size_t batch_size = 0;
};

/// Deterministic pairwise (tree) summation.
double pairwise_sum(std::span<const double> values);

/// Throws std::invalid_argument on shape mismatch or when ‖w‖ = 0.
ErrorTriple weight_errors(const DenseTensor& w, const DenseTensor& w_hat);

/// Expected feature errors over a batch of layer inputs, F = conv(x, w):
///   absolute = mean ‖F − F̂‖, relative = mean (‖F − F̂‖ / ‖F‖),
///   scaled = mean (‖F − F̂‖ / n_F).
/// The relative entry averages per-sample ratios. Throws on an empty batch or
/// a sample whose reference features vanish.
ErrorTriple feature_errors(const DenseTensor& w, const DenseTensor& w_hat,
                           std::span<const DenseTensor> inputs, const ConvParams& conv);

/// Reference feature norms ‖conv(x, w)‖ for each input, for reuse across
/// many approximations of the same layer.
std::vector<double> reference_feature_norms(const DenseTensor& w,
                                            std::span<const DenseTensor> inputs,
                                            const ConvParams& conv);

/// Same as feature_errors with precomputed reference norms; uses linearity,
/// F − F̂ = conv(x, w − ŵ).
ErrorTriple feature_errors(const DenseTensor& w, const DenseTensor& w_hat,
                           std::span<const DenseTensor> inputs, const ConvParams& conv,
                           std::span<const double> reference_norms);

/// Per layer log10(‖after − before‖ / ‖before‖); nullopt marks "no change".
/// Throws if the lists differ in length or shape, or ‖before‖ = 0.
std::vector<std::optional<double>> checkpoint_change(std::span<const DenseTensor> before,
                                                     std::span<const DenseTensor> after);

}  // namespace tdc
