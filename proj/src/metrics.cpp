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

#include "tdc/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tdc {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

ErrorTriple weight_errors(const DenseTensor& w, const DenseTensor& w_hat) {
  if (w.shape() != w_hat.shape()) {
    throw std::invalid_argument("weight_errors: shape mismatch " + shape_string(w.shape()) +
                                " vs " + shape_string(w_hat.shape()));
  }
  const double norm_w = frobenius_norm(w);
  if (norm_w == 0.0) throw std::invalid_argument("weight_errors: relative error undefined, ‖w‖ = 0");
  ErrorTriple e;
  e.absolute = frobenius_norm(w - w_hat);
  e.relative = e.absolute / norm_w;
  e.scaled = e.absolute / static_cast<double>(w.size());
  return e;
}

std::vector<double> reference_feature_norms(const DenseTensor& w,
                                            std::span<const DenseTensor> inputs,
                                            const ConvParams& conv) {
  std::vector<double> norms;
  norms.reserve(inputs.size());
  for (const auto& x : inputs) norms.push_back(frobenius_norm(conv2d_forward(x, w, conv)));
  return norms;
}

ErrorTriple feature_errors(const DenseTensor& w, const DenseTensor& w_hat,
                           std::span<const DenseTensor> inputs, const ConvParams& conv,
                           std::span<const double> reference_norms) {
  if (inputs.empty()) throw std::invalid_argument("feature_errors: empty input batch");
  if (reference_norms.size() != inputs.size())
    throw std::invalid_argument("feature_errors: one reference norm per input required");
  if (w.shape() != w_hat.shape()) throw std::invalid_argument("feature_errors: weight shape mismatch");
  const DenseTensor delta = w - w_hat;
  std::vector<double> abs(inputs.size()), rel(inputs.size()), scaled(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const DenseTensor diff = conv2d_forward(inputs[i], delta, conv);
    const double e = frobenius_norm(diff);
    if (reference_norms[i] == 0.0) {
      throw std::invalid_argument("feature_errors: sample " + std::to_string(i) +
                                  " has zero reference features; relative error undefined");
    }
    abs[i] = e;
    rel[i] = e / reference_norms[i];
    scaled[i] = e / static_cast<double>(diff.size());
  }
  const double n = static_cast<double>(inputs.size());
  return {pairwise_sum(abs) / n, pairwise_sum(rel) / n, pairwise_sum(scaled) / n};
}

ErrorTriple feature_errors(const DenseTensor& w, const DenseTensor& w_hat,
                           std::span<const DenseTensor> inputs, const ConvParams& conv) {
  if (inputs.empty()) throw std::invalid_argument("feature_errors: empty input batch");
  const auto norms = reference_feature_norms(w, inputs, conv);
  return feature_errors(w, w_hat, inputs, conv, norms);
}

std::vector<std::optional<double>> checkpoint_change(std::span<const DenseTensor> before,
                                                     std::span<const DenseTensor> after) {
  if (before.size() != after.size())
    throw std::invalid_argument("checkpoint_change: layer lists differ in length");
  std::vector<std::optional<double>> out;
  out.reserve(before.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before[i].shape() != after[i].shape())
      throw std::invalid_argument("checkpoint_change: layer " + std::to_string(i) +
                                  " shapes differ; expand factorized layers first");
    const double base = frobenius_norm(before[i]);
    if (base == 0.0)
      throw std::invalid_argument("checkpoint_change: layer " + std::to_string(i) +
                                  " has zero norm before");
    const double d = frobenius_norm(after[i] - before[i]);
    if (d == 0.0)
      out.push_back(std::nullopt);
    else
      out.push_back(std::log10(d / base));
  }
  return out;
}

}  // namespace tdc
