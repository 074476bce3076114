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

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tdc/conv.hpp"
#include "tdc/dataset.hpp"
#include "tdc/decomp.hpp"
#include "tdc/tensor.hpp"

namespace tdc {

struct Conv2dOp {
  DenseTensor weight;  // C×kh×kw×T
  std::optional<DenseTensor> bias;
  ConvParams params;
};

/// A convolution replaced by its factorized sequence; bias applied after the
/// last stage.
struct ConvChainOp {
  std::vector<Conv2dOp> stages;
  std::optional<DenseTensor> bias;
  Method method = Method::cp;
};

/// Inference-mode batch normalisation:
/// y = scale·(x − mean)/sqrt(var + eps) + shift, per channel.
struct BatchNormOp {
  std::vector<double> scale, shift, mean, var;
  double eps = 1e-5;
};

struct ReluOp {};

struct MaxPoolOp {
  std::size_t kernel = 2;
  std::size_t stride = 2;
};

struct GlobalAvgPoolOp {};

/// Flattens its input row-major; weight is In×Out.
struct LinearOp {
  DenseTensor weight;
  std::optional<DenseTensor> bias;
};

/// Saves the current activation for a later ResidualAddOp.
struct ResidualBeginOp {};

struct Layer;

/// Pops the saved activation, runs it through `shortcut` (identity when
/// empty) and adds it to the current activation.
struct ResidualAddOp {
  std::vector<Layer> shortcut;
};

struct Layer {
  std::string id;
  std::variant<Conv2dOp, ConvChainOp, BatchNormOp, ReluOp, MaxPoolOp, GlobalAvgPoolOp, LinearOp,
               ResidualBeginOp, ResidualAddOp>
      op;
};

struct ModelGraph {
  std::string name;
  std::array<std::size_t, 3> input_shape{};  // C, H, W
  std::size_t class_count = 0;
  std::vector<Layer> layers;
};

/// Walks the graph and checks that every layer accepts its input; returns the
/// output shape. Throws std::invalid_argument naming the offending layer.
Shape infer_output_shape(const ModelGraph& g);

/// Loads a JSON manifest; tensor references resolve relative to its directory.
ModelGraph load_model(const std::filesystem::path& manifest);

/// Writes `manifest` plus one TDT1 file per tensor next to it.
void save_model(const ModelGraph& g, const std::filesystem::path& manifest,
                DType dtype = DType::f32);

/// Ids of top-level conv layers excluding the first and last parameterised layers.
std::vector<std::string> decomposable_layers(const ModelGraph& g);

/// Weight and conv settings of a top-level conv layer.
const Conv2dOp& find_conv(const ModelGraph& g, const std::string& layer_id);

enum class SubstitutionMode { reconstruct, factorized };
SubstitutionMode parse_substitution_mode(std::string_view s);

/// Replaces `layer_id` either by the dense reconstruction or by the equivalent
/// chain of small convolutions.
ModelGraph substitute_layer(const ModelGraph& g, const std::string& layer_id,
                            const Factorization& f, SubstitutionMode mode);

/// Conv stages equivalent to convolving with reconstruct(f) under `params`.
std::vector<Conv2dOp> factorized_stages(const Factorization& f, const ConvParams& params);

DenseTensor forward(const ModelGraph& g, const DenseTensor& input);

/// Activations entering top-level layer `layer_id` (the layer is not applied).
DenseTensor forward_until(const ModelGraph& g, const DenseTensor& input,
                          const std::string& layer_id);

struct EvalResult {
  double performance_error = 0.0;
  std::size_t sample_count = 0;
  std::size_t misclassified = 0;
  std::vector<std::size_t> per_class_errors;
  std::vector<std::size_t> per_class_counts;
  std::vector<std::size_t> predictions;

  bool operator==(const EvalResult&) const = default;
};

/// Index of the largest value; the lowest index wins ties.
std::size_t argmax(std::span<const double> values);

/// Classification error over the dataset. `jobs` threads take contiguous
/// shards; predictions are merged by sample index.
EvalResult evaluate(const ModelGraph& g, const Dataset& data, std::size_t jobs = 1);

}  // namespace tdc
