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

#include "tdc/convnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "tdc/tensor_io.hpp"

namespace tdc {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string describe(const Layer& l, std::size_t index) {
  return l.id.empty() ? "layer #" + std::to_string(index) : "layer '" + l.id + "'";
}

bool is_parameterised(const Layer& l) {
  return std::holds_alternative<Conv2dOp>(l.op) || std::holds_alternative<ConvChainOp>(l.op) ||
         std::holds_alternative<LinearOp>(l.op);
}

// ---- shape inference --------------------------------------------------------

Shape conv_shape(const Shape& in, const Conv2dOp& c) {
  if (in.size() != 3) throw std::invalid_argument("conv expects a C×H×W input");
  if (in[0] != c.weight.dim(0) * c.params.groups) {
    throw std::invalid_argument("conv expects " +
                                std::to_string(c.weight.dim(0) * c.params.groups) +
                                " input channels, got " + std::to_string(in[0]));
  }
  if (c.weight.dim(3) % c.params.groups != 0)
    throw std::invalid_argument("conv output channels not divisible by groups");
  if (c.bias && c.bias->size() != c.weight.dim(3))
    throw std::invalid_argument("conv bias length does not match output channels");
  return {c.weight.dim(3), conv_output_size(in[1], c.weight.dim(1), c.params.stride_h, c.params.pad_h),
          conv_output_size(in[2], c.weight.dim(2), c.params.stride_w, c.params.pad_w)};
}

Shape layers_shape(const std::vector<Layer>& layers, Shape cur);

Shape layer_shape(const Layer& layer, Shape cur, std::vector<Shape>& saved) {
  return std::visit(
      overloaded{
          [&](const Conv2dOp& c) { return conv_shape(cur, c); },
          [&](const ConvChainOp& chain) {
            for (const auto& s : chain.stages) cur = conv_shape(cur, s);
            if (chain.bias && chain.bias->size() != cur[0])
              throw std::invalid_argument("factorized conv bias length mismatch");
            return cur;
          },
          [&](const BatchNormOp& bn) {
            const std::size_t n = bn.scale.size();
            if (bn.shift.size() != n || bn.mean.size() != n || bn.var.size() != n)
              throw std::invalid_argument("batchnorm parameter lengths differ");
            if (cur.empty() || cur[0] != n)
              throw std::invalid_argument("batchnorm has " + std::to_string(n) +
                                          " channels, input has " +
                                          std::to_string(cur.empty() ? 0 : cur[0]));
            return cur;
          },
          [&](const ReluOp&) { return cur; },
          [&](const MaxPoolOp& p) {
            if (cur.size() != 3) throw std::invalid_argument("maxpool expects C×H×W");
            return Shape{cur[0], conv_output_size(cur[1], p.kernel, p.stride, 0),
                         conv_output_size(cur[2], p.kernel, p.stride, 0)};
          },
          [&](const GlobalAvgPoolOp&) {
            if (cur.size() != 3) throw std::invalid_argument("global_avgpool expects C×H×W");
            return Shape{cur[0]};
          },
          [&](const LinearOp& l) {
            if (l.weight.ndim() != 2) throw std::invalid_argument("linear weight must be In×Out");
            if (element_count(cur) != l.weight.dim(0))
              throw std::invalid_argument("linear expects " + std::to_string(l.weight.dim(0)) +
                                          " inputs, got " + std::to_string(element_count(cur)));
            if (l.bias && l.bias->size() != l.weight.dim(1))
              throw std::invalid_argument("linear bias length mismatch");
            return Shape{l.weight.dim(1)};
          },
          [&](const ResidualBeginOp&) {
            saved.push_back(cur);
            return cur;
          },
          [&](const ResidualAddOp& add) {
            if (saved.empty()) throw std::invalid_argument("residual_add without residual_begin");
            Shape skip = layers_shape(add.shortcut, saved.back());
            saved.pop_back();
            if (skip != cur)
              throw std::invalid_argument("residual shapes differ: " + shape_string(skip) +
                                          " vs " + shape_string(cur));
            return cur;
          },
      },
      layer.op);
}

Shape layers_shape(const std::vector<Layer>& layers, Shape cur) {
  std::vector<Shape> saved;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    try {
      cur = layer_shape(layers[i], std::move(cur), saved);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(describe(layers[i], i) + ": " + e.what());
    }
  }
  if (!saved.empty()) throw std::invalid_argument("residual_begin without matching residual_add");
  return cur;
}

// ---- execution --------------------------------------------------------------

DenseTensor run_layers(const std::vector<Layer>& layers, DenseTensor x, const std::string* stop_at);

DenseTensor apply(const Layer& layer, DenseTensor x, std::vector<DenseTensor>& saved) {
  return std::visit(
      overloaded{
          [&](const Conv2dOp& c) { return conv2d_forward(x, c.weight, c.params, c.bias); },
          [&](const ConvChainOp& chain) {
            for (const auto& s : chain.stages) x = conv2d_forward(x, s.weight, s.params, s.bias);
            if (chain.bias) {
              const std::size_t plane = x.size() / x.dim(0);
              for (std::size_t t = 0; t < x.dim(0); ++t)
                for (std::size_t i = 0; i < plane; ++i) x[t * plane + i] += (*chain.bias)[t];
            }
            return x;
          },
          [&](const BatchNormOp& bn) {
            const std::size_t plane = x.size() / x.dim(0);
            for (std::size_t c = 0; c < x.dim(0); ++c) {
              const double a = bn.scale[c] / std::sqrt(bn.var[c] + bn.eps);
              const double b = bn.shift[c] - a * bn.mean[c];
              for (std::size_t i = 0; i < plane; ++i) x[c * plane + i] = a * x[c * plane + i] + b;
            }
            return x;
          },
          [&](const ReluOp&) {
            for (auto& v : x.data()) v = v > 0.0 ? v : 0.0;
            return x;
          },
          [&](const MaxPoolOp& p) {
            const std::size_t C = x.dim(0), H = x.dim(1), W = x.dim(2);
            const std::size_t Ho = conv_output_size(H, p.kernel, p.stride, 0);
            const std::size_t Wo = conv_output_size(W, p.kernel, p.stride, 0);
            DenseTensor out({C, Ho, Wo});
            for (std::size_t c = 0; c < C; ++c)
              for (std::size_t i = 0; i < Ho; ++i)
                for (std::size_t j = 0; j < Wo; ++j) {
                  double m = -std::numeric_limits<double>::infinity();
                  for (std::size_t a = 0; a < p.kernel; ++a)
                    for (std::size_t b = 0; b < p.kernel; ++b)
                      m = std::max(m, x[(c * H + i * p.stride + a) * W + j * p.stride + b]);
                  out[(c * Ho + i) * Wo + j] = m;
                }
            return out;
          },
          [&](const GlobalAvgPoolOp&) {
            const std::size_t C = x.dim(0);
            const std::size_t plane = x.size() / C;
            DenseTensor out({C});
            for (std::size_t c = 0; c < C; ++c) {
              double s = 0.0;
              for (std::size_t i = 0; i < plane; ++i) s += x[c * plane + i];
              out[c] = s / static_cast<double>(plane);
            }
            return out;
          },
          [&](const LinearOp& l) {
            const std::size_t in = l.weight.dim(0), out_n = l.weight.dim(1);
            DenseTensor out({out_n});
            if (l.bias)
              for (std::size_t o = 0; o < out_n; ++o) out[o] = (*l.bias)[o];
            for (std::size_t i = 0; i < in; ++i) {
              const double xi = x[i];
              if (xi == 0.0) continue;
              for (std::size_t o = 0; o < out_n; ++o) out[o] += xi * l.weight[i * out_n + o];
            }
            return out;
          },
          [&](const ResidualBeginOp&) {
            saved.push_back(x);
            return x;
          },
          [&](const ResidualAddOp& add) {
            DenseTensor skip = run_layers(add.shortcut, std::move(saved.back()), nullptr);
            saved.pop_back();
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += skip[i];
            return x;
          },
      },
      layer.op);
}

DenseTensor run_layers(const std::vector<Layer>& layers, DenseTensor x, const std::string* stop_at) {
  std::vector<DenseTensor> saved;
  for (const auto& layer : layers) {
    if (stop_at && layer.id == *stop_at) return x;
    x = apply(layer, std::move(x), saved);
  }
  if (stop_at) throw std::invalid_argument("forward_until: no layer '" + *stop_at + "'");
  return x;
}

// ---- manifest ---------------------------------------------------------------

std::size_t get_size(const json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = j.at(key).get<long long>();
  if (v < 0) throw std::invalid_argument(std::string("'") + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

std::vector<double> read_vector(const std::filesystem::path& base, const json& j, const char* key) {
  return read_tensor(base / j.at(key).get<std::string>()).values();
}

std::optional<DenseTensor> read_optional(const std::filesystem::path& base, const json& j,
                                         const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return read_tensor(base / j.at(key).get<std::string>());
}

std::vector<Layer> parse_layers(const json& arr, const std::filesystem::path& base);

Layer parse_layer(const json& j, const std::filesystem::path& base) {
  Layer l;
  l.id = j.value("id", std::string());
  const auto type = j.at("type").get<std::string>();
  if (type == "conv2d") {
    Conv2dOp c;
    c.weight = read_tensor(base / j.at("weight").get<std::string>());
    if (c.weight.ndim() != 4) throw std::invalid_argument("conv2d weight must be 4-way (C,H,W,T)");
    c.bias = read_optional(base, j, "bias");
    const std::size_t stride = get_size(j, "stride", 1);
    const std::size_t pad = get_size(j, "padding", 0);
    c.params.stride_h = get_size(j, "stride_h", stride);
    c.params.stride_w = get_size(j, "stride_w", stride);
    c.params.pad_h = get_size(j, "padding_h", pad);
    c.params.pad_w = get_size(j, "padding_w", pad);
    c.params.groups = get_size(j, "groups", 1);
    if (j.contains("shape")) {
      const auto declared = j.at("shape").get<std::vector<std::size_t>>();
      if (declared != c.weight.shape())
        throw std::invalid_argument("weight file shape " + shape_string(c.weight.shape()) +
                                    " differs from declared " + shape_string(declared));
    }
    l.op = std::move(c);
  } else if (type == "batchnorm") {
    BatchNormOp bn;
    bn.scale = read_vector(base, j, "scale");
    bn.shift = read_vector(base, j, "shift");
    bn.mean = read_vector(base, j, "mean");
    bn.var = read_vector(base, j, "var");
    bn.eps = j.value("eps", 1e-5);
    l.op = std::move(bn);
  } else if (type == "relu") {
    l.op = ReluOp{};
  } else if (type == "maxpool") {
    l.op = MaxPoolOp{get_size(j, "kernel", 2), get_size(j, "stride", get_size(j, "kernel", 2))};
  } else if (type == "global_avgpool") {
    l.op = GlobalAvgPoolOp{};
  } else if (type == "linear") {
    LinearOp lin;
    lin.weight = read_tensor(base / j.at("weight").get<std::string>());
    lin.bias = read_optional(base, j, "bias");
    l.op = std::move(lin);
  } else if (type == "residual_begin") {
    l.op = ResidualBeginOp{};
  } else if (type == "residual_add") {
    ResidualAddOp add;
    if (j.contains("shortcut")) add.shortcut = parse_layers(j.at("shortcut"), base);
    l.op = std::move(add);
  } else {
    throw std::invalid_argument("unsupported layer type '" + type + "'");
  }
  return l;
}

std::vector<Layer> parse_layers(const json& arr, const std::filesystem::path& base) {
  std::vector<Layer> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    try {
      out.push_back(parse_layer(arr.at(i), base));
    } catch (const std::exception& e) {
      throw std::invalid_argument("manifest layer #" + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

struct ManifestWriter {
  std::filesystem::path dir;
  DType dtype;
  std::size_t counter = 0;

  std::string put(const DenseTensor& t, const std::string& stem, const char* field) {
    const std::string name = stem + "." + field + ".tdt";
    write_tensor(dir / name, t, dtype);
    return name;
  }

  std::string put(const std::vector<double>& v, const std::string& stem, const char* field) {
    return put(DenseTensor({v.size()}, v), stem, field);
  }

  json layers(const std::vector<Layer>& ls, const std::string& prefix) {
    json arr = json::array();
    for (std::size_t i = 0; i < ls.size(); ++i) arr.push_back(layer(ls[i], prefix, i));
    return arr;
  }

  json layer(const Layer& l, const std::string& prefix, std::size_t index) {
    const std::string stem = prefix + (l.id.empty() ? "layer" + std::to_string(index) : l.id);
    json j;
    if (!l.id.empty()) j["id"] = l.id;
    std::visit(
        overloaded{
            [&](const Conv2dOp& c) {
              j["type"] = "conv2d";
              j["weight"] = put(c.weight, stem, "weight");
              j["shape"] = c.weight.shape();
              if (c.bias) j["bias"] = put(*c.bias, stem, "bias");
              j["stride_h"] = c.params.stride_h;
              j["stride_w"] = c.params.stride_w;
              j["padding_h"] = c.params.pad_h;
              j["padding_w"] = c.params.pad_w;
              if (c.params.groups != 1) j["groups"] = c.params.groups;
            },
            [&](const ConvChainOp&) {
              throw std::invalid_argument("save_model: factorized layers cannot be written to a manifest");
            },
            [&](const BatchNormOp& bn) {
              j["type"] = "batchnorm";
              j["scale"] = put(bn.scale, stem, "scale");
              j["shift"] = put(bn.shift, stem, "shift");
              j["mean"] = put(bn.mean, stem, "mean");
              j["var"] = put(bn.var, stem, "var");
              j["eps"] = bn.eps;
            },
            [&](const ReluOp&) { j["type"] = "relu"; },
            [&](const MaxPoolOp& p) {
              j["type"] = "maxpool";
              j["kernel"] = p.kernel;
              j["stride"] = p.stride;
            },
            [&](const GlobalAvgPoolOp&) { j["type"] = "global_avgpool"; },
            [&](const LinearOp& lin) {
              j["type"] = "linear";
              j["weight"] = put(lin.weight, stem, "weight");
              if (lin.bias) j["bias"] = put(*lin.bias, stem, "bias");
            },
            [&](const ResidualBeginOp&) { j["type"] = "residual_begin"; },
            [&](const ResidualAddOp& add) {
              j["type"] = "residual_add";
              if (!add.shortcut.empty()) j["shortcut"] = layers(add.shortcut, stem + "_shortcut_");
            },
        },
        l.op);
    return j;
  }
};

DenseTensor as_conv_weight(const Matrix& m, Shape shape) {
  return DenseTensor(std::move(shape), std::vector<double>(m.values()));
}

}  // namespace

Shape infer_output_shape(const ModelGraph& g) {
  Shape in{g.input_shape[0], g.input_shape[1], g.input_shape[2]};
  Shape out = layers_shape(g.layers, in);
  if (out.size() != 1 || (g.class_count != 0 && out[0] != g.class_count)) {
    throw std::invalid_argument("model output shape " + shape_string(out) +
                                " does not match class_count " + std::to_string(g.class_count));
  }
  return out;
}

ModelGraph load_model(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw std::runtime_error("cannot open model manifest '" + manifest.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(manifest.string() + ": invalid JSON: " + e.what());
  }
  const auto base = manifest.parent_path();
  ModelGraph g;
  try {
    g.name = j.value("name", std::string());
    const auto shape = j.at("input").get<std::vector<std::size_t>>();
    if (shape.size() != 3) throw std::invalid_argument("'input' must be [C, H, W]");
    g.input_shape = {shape[0], shape[1], shape[2]};
    g.class_count = j.at("class_count").get<std::size_t>();
    g.layers = parse_layers(j.at("layers"), base);
    infer_output_shape(g);
  } catch (const std::exception& e) {
    throw std::runtime_error(manifest.string() + ": " + e.what());
  }
  return g;
}

void save_model(const ModelGraph& g, const std::filesystem::path& manifest, DType dtype) {
  const auto dir = manifest.has_parent_path() ? manifest.parent_path() : std::filesystem::path(".");
  std::filesystem::create_directories(dir);
  ManifestWriter w{dir, dtype};
  json j;
  j["format"] = "tdc-model-1";
  j["name"] = g.name;
  j["input"] = {g.input_shape[0], g.input_shape[1], g.input_shape[2]};
  j["class_count"] = g.class_count;
  j["layers"] = w.layers(g.layers, "");
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + manifest.string() + "'");
  out << j.dump(2) << '\n';
}

std::vector<std::string> decomposable_layers(const ModelGraph& g) {
  std::vector<std::size_t> param_idx;
  for (std::size_t i = 0; i < g.layers.size(); ++i)
    if (is_parameterised(g.layers[i])) param_idx.push_back(i);
  std::vector<std::string> ids;
  for (std::size_t k = 1; k + 1 < param_idx.size(); ++k) {
    const auto& l = g.layers[param_idx[k]];
    if (std::holds_alternative<Conv2dOp>(l.op) && !l.id.empty()) ids.push_back(l.id);
  }
  return ids;
}

const Conv2dOp& find_conv(const ModelGraph& g, const std::string& layer_id) {
  for (const auto& l : g.layers) {
    if (l.id != layer_id) continue;
    if (const auto* c = std::get_if<Conv2dOp>(&l.op)) return *c;
    throw std::invalid_argument("layer '" + layer_id + "' is not a conv2d layer");
  }
  throw std::invalid_argument("no layer with id '" + layer_id + "'");
}

SubstitutionMode parse_substitution_mode(std::string_view s) {
  if (s == "reconstruct") return SubstitutionMode::reconstruct;
  if (s == "factorized") return SubstitutionMode::factorized;
  throw std::invalid_argument("unknown substitution mode '" + std::string(s) + "'");
}

std::vector<Conv2dOp> factorized_stages(const Factorization& f, const ConvParams& p) {
  if (p.groups != 1) throw std::invalid_argument("factorized substitution needs groups == 1");
  const ConvParams pointwise{};
  const ConvParams vertical{p.stride_h, 1, p.pad_h, 0, 1};
  const ConvParams horizontal{1, p.stride_w, 0, p.pad_w, 1};
  std::vector<Conv2dOp> stages;
  if (const auto* cp = std::get_if<CpFactorization>(&f)) {
    const std::size_t R = cp->rank;
    const auto& [fc, fy, fx, ft] = cp->factors;
    stages.push_back({as_conv_weight(fc, {fc.rows(), 1, 1, R}), std::nullopt, pointwise});
    ConvParams dv = vertical;
    dv.groups = R;
    ConvParams dh = horizontal;
    dh.groups = R;
    stages.push_back({as_conv_weight(fy, {1, fy.rows(), 1, R}), std::nullopt, dv});
    stages.push_back({as_conv_weight(fx, {1, 1, fx.rows(), R}), std::nullopt, dh});
    stages.push_back({as_conv_weight(ft.transposed(), {R, 1, 1, ft.rows()}), std::nullopt, pointwise});
  } else if (const auto* tk = std::get_if<TuckerFactorization>(&f)) {
    const auto& fc = tk->factor_c;
    const auto& ft = tk->factor_t;
    stages.push_back({as_conv_weight(fc, {fc.rows(), 1, 1, fc.cols()}), std::nullopt, pointwise});
    stages.push_back({tk->core, std::nullopt, p});
    stages.push_back(
        {as_conv_weight(ft.transposed(), {ft.cols(), 1, 1, ft.rows()}), std::nullopt, pointwise});
  } else {
    const auto& tt = std::get<TtFactorization>(f);
    const auto [r1, r2, r3] = tt.ranks;
    stages.push_back({as_conv_weight(tt.first, {tt.first.rows(), 1, 1, r1}), std::nullopt, pointwise});
    stages.push_back({tt.middle1.reshaped({r1, tt.middle1.dim(1), 1, r2}), std::nullopt, vertical});
    stages.push_back({tt.middle2.reshaped({r2, 1, tt.middle2.dim(1), r3}), std::nullopt, horizontal});
    stages.push_back({as_conv_weight(tt.last, {r3, 1, 1, tt.last.cols()}), std::nullopt, pointwise});
  }
  return stages;
}

ModelGraph substitute_layer(const ModelGraph& g, const std::string& layer_id,
                            const Factorization& f, SubstitutionMode mode) {
  const auto allowed = decomposable_layers(g);
  if (std::find(allowed.begin(), allowed.end(), layer_id) == allowed.end()) {
    find_conv(g, layer_id);  // names a missing or non-conv layer precisely
    throw std::invalid_argument("layer '" + layer_id +
                                "' is the first or last parameterised layer and is not decomposable");
  }
  ModelGraph out = g;
  for (auto& l : out.layers) {
    if (l.id != layer_id) continue;
    auto& conv = std::get<Conv2dOp>(l.op);
    if (shape_of(f) != conv.weight.shape()) {
      throw std::invalid_argument("factorization shape " + shape_string(shape_of(f)) +
                                  " does not match layer weight " + shape_string(conv.weight.shape()));
    }
    if (mode == SubstitutionMode::reconstruct) {
      conv.weight = reconstruct(f);
    } else {
      ConvChainOp chain;
      chain.stages = factorized_stages(f, conv.params);
      chain.bias = conv.bias;
      chain.method = method_of(f);
      l.op = std::move(chain);
    }
    break;
  }
  return out;
}

DenseTensor forward(const ModelGraph& g, const DenseTensor& input) {
  const Shape expect{g.input_shape[0], g.input_shape[1], g.input_shape[2]};
  if (input.shape() != expect)
    throw std::invalid_argument("forward: input shape " + shape_string(input.shape()) +
                                " expected " + shape_string(expect));
  return run_layers(g.layers, input, nullptr);
}

DenseTensor forward_until(const ModelGraph& g, const DenseTensor& input, const std::string& layer_id) {
  return run_layers(g.layers, input, &layer_id);
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

EvalResult evaluate(const ModelGraph& g, const Dataset& data, std::size_t jobs) {
  if (data.empty()) throw std::invalid_argument("evaluate: empty dataset");
  if (data.channels() != g.input_shape[0] || data.height() != g.input_shape[1] ||
      data.width() != g.input_shape[2])
    throw std::invalid_argument("evaluate: dataset image shape does not match model input");
  const std::size_t n = data.size();
  std::vector<std::size_t> pred(n);
  jobs = std::clamp<std::size_t>(jobs, 1, n);
  auto shard = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const auto logits = forward(g, data.sample(i));
      pred[i] = argmax(logits.data());
    }
  };
  if (jobs == 1) {
    shard(0, n);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < jobs; ++k) pool.emplace_back(shard, k * n / jobs, (k + 1) * n / jobs);
    for (auto& t : pool) t.join();
  }
  EvalResult r;
  r.sample_count = n;
  std::size_t classes = g.class_count;
  for (std::size_t i = 0; i < n; ++i) classes = std::max<std::size_t>(classes, data.label(i) + 1);
  r.per_class_errors.assign(classes, 0);
  r.per_class_counts.assign(classes, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = data.label(i);
    ++r.per_class_counts[label];
    if (pred[i] != label) {
      ++r.misclassified;
      ++r.per_class_errors[label];
    }
  }
  r.performance_error = static_cast<double>(r.misclassified) / static_cast<double>(n);
  r.predictions = std::move(pred);
  return r;
}

}  // namespace tdc
