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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "tdc/convnet.hpp"
#include "tdc/synth.hpp"

using namespace tdc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("tdc_convnet_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

double max_rel(const DenseTensor& a, const DenseTensor& b) {
  double m = 0, s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
    s = std::max(s, std::abs(a[i]));
  }
  return m / s;
}

// conv(16→16, 3×3) → relu → conv(16→16, 3×3) → relu → conv(16→16) → gap → fc.
ModelGraph toy_net(std::uint64_t seed) { return synthetic_convnet({3, 16, 16, 16}, 8, 5, seed); }

}  // namespace

TEST_CASE("conv output size") {
  CHECK(conv_output_size(5, 3, 1, 0) == 3);
  CHECK(conv_output_size(32, 3, 1, 1) == 32);
  CHECK(conv_output_size(7, 3, 2, 1) == 4);
  CHECK_THROWS(conv_output_size(2, 5, 1, 0));
}

TEST_CASE("conv: identity 1x1 kernel and constant field") {
  const auto x = oracle::random_tensor({3, 4, 5}, 1);
  DenseTensor eye({3, 1, 1, 3});
  for (std::size_t c = 0; c < 3; ++c) eye.at({c, 0, 0, c}) = 1.0;
  CHECK(conv2d_forward(x, eye, 1, 0) == x);

  const auto y = conv2d_forward(DenseTensor({1, 5, 5}, 1.0), DenseTensor({1, 3, 3, 1}, 1.0), 1, 0);
  CHECK(y.shape() == Shape{1, 3, 3});
  for (double v : y.data()) CHECK(v == 9.0);
}

TEST_CASE("conv matches the loop reference") {
  std::uint64_t seed = 10;
  struct Case {
    std::size_t c, h, w, t, kh, kw, sh, sw, ph, pw;
  };
  for (const Case k : {Case{3, 7, 6, 4, 3, 3, 1, 1, 1, 1}, Case{2, 9, 8, 3, 3, 2, 2, 1, 0, 1},
                       Case{4, 5, 5, 2, 1, 1, 2, 2, 0, 0}, Case{1, 6, 7, 5, 3, 1, 1, 3, 2, 0},
                       Case{5, 4, 4, 6, 4, 4, 1, 1, 2, 2}}) {
    const auto x = oracle::random_tensor({k.c, k.h, k.w}, seed++);
    const auto w = oracle::random_tensor({k.c, k.kh, k.kw, k.t}, seed++);
    const ConvParams p{k.sh, k.sw, k.ph, k.pw, 1};
    const auto ref = oracle::conv_loops(x, w, k.sh, k.sw, k.ph, k.pw);
    const auto got = conv2d_forward(x, w, p);
    REQUIRE(got.shape() == ref.shape());
    CHECK(oracle::diff_norm(got.data(), ref.data()) <= 1e-10 * oracle::norm(ref.values()));
  }
  CHECK_THROWS(conv2d_forward(oracle::random_tensor({2, 4, 4}, 1), oracle::random_tensor({3, 3, 3, 1}, 2),
                              1, 0));
}

TEST_CASE("grouped conv equals per-group convolutions") {
  const auto x = oracle::random_tensor({4, 6, 6}, 20);
  const auto w = oracle::random_tensor({1, 3, 1, 4}, 21);  // depthwise vertical
  const ConvParams p{1, 1, 1, 0, 4};
  const auto y = conv2d_forward(x, w, p);
  for (std::size_t g = 0; g < 4; ++g) {
    DenseTensor xg({1, 6, 6}), wg({1, 3, 1, 1});
    for (std::size_t i = 0; i < 36; ++i) xg[i] = x[g * 36 + i];
    for (std::size_t k = 0; k < 3; ++k) wg.at({0, k, 0, 0}) = w.at({0, k, 0, g});
    const auto ref = oracle::conv_loops(xg, wg, 1, 1, 1, 0);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(y[g * ref.size() + i] == doctest::Approx(ref[i]));
  }
}

TEST_CASE("manifest round trip preserves the forward pass") {
  const auto dir = scratch("roundtrip");
  const auto g = synthetic_garipov(3);
  save_model(g, dir / "model.json", DType::f64);
  const auto h = load_model(dir / "model.json");
  CHECK(h.layers.size() == g.layers.size());
  CHECK(infer_output_shape(h) == Shape{10});
  const auto x = oracle::random_tensor({3, 32, 32}, 4);
  CHECK(forward(g, x) == forward(h, x));
  CHECK(decomposable_layers(h) == std::vector<std::string>{"conv2", "conv3", "conv4", "conv5", "conv6"});
  fs::remove_all(dir);
}

TEST_CASE("manifest rejects unsupported layers and shape mismatches") {
  const auto dir = scratch("reject");
  save_model(toy_net(1), dir / "model.json");
  std::ifstream in(dir / "model.json");
  std::string text((std::istreambuf_iterator<char>(in)), {});
  const auto write = [&](const std::string& t) {
    std::ofstream(dir / "bad.json") << t;
    return dir / "bad.json";
  };
  auto dropout = text;
  dropout.replace(dropout.find("\"relu\""), 6, "\"dropout\"");
  CHECK_THROWS_WITH_AS(load_model(write(dropout)), doctest::Contains("dropout"), std::runtime_error);
  auto wrong_input = text;
  wrong_input.replace(wrong_input.find("\"input\""), 7, "\"inputX\"");
  CHECK_THROWS(load_model(write(wrong_input)));
  CHECK_THROWS(load_model(dir / "missing.json"));

  auto g = toy_net(1);
  g.input_shape = {4, 8, 8};
  CHECK_THROWS_AS(infer_output_shape(g), std::invalid_argument);
  fs::remove_all(dir);
}

TEST_CASE("batchnorm, pooling and linear layers") {
  ModelGraph g;
  g.input_shape = {2, 4, 4};
  g.class_count = 3;
  BatchNormOp bn{{2.0, 0.5}, {1.0, -1.0}, {0.5, 0.0}, {3.0, 1.0}, 1.0};
  g.layers.push_back({"bn", bn});
  g.layers.push_back({"pool", MaxPoolOp{2, 2}});
  g.layers.push_back({"gap", GlobalAvgPoolOp{}});
  LinearOp lin{DenseTensor({2, 3}, {1, 0, 2, 0, 1, -1}), DenseTensor({3}, {0.5, 0, 0})};
  g.layers.push_back({"fc", lin});
  const auto x = oracle::random_tensor({2, 4, 4}, 5);
  const auto y = forward(g, x);
  std::array<double, 2> pooled{};
  for (std::size_t c = 0; c < 2; ++c) {
    double sum = 0;
    for (std::size_t py = 0; py < 2; ++py)
      for (std::size_t px = 0; px < 2; ++px) {
        double m = -1e300;
        for (std::size_t dy = 0; dy < 2; ++dy)
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const double v = x.at({c, 2 * py + dy, 2 * px + dx});
            m = std::max(m, bn.scale[c] * (v - bn.mean[c]) / std::sqrt(bn.var[c] + bn.eps) + bn.shift[c]);
          }
        sum += m;
      }
    pooled[c] = sum / 4;
  }
  CHECK(y[0] == doctest::Approx(pooled[0] + 0.5));
  CHECK(y[1] == doctest::Approx(pooled[1]));
  CHECK(y[2] == doctest::Approx(2 * pooled[0] - pooled[1]));
}

TEST_CASE("residual blocks add the shortcut") {
  ModelGraph g;
  g.input_shape = {2, 3, 3};
  g.class_count = 2;
  Conv2dOp c{oracle::random_tensor({2, 3, 3, 2}, 6), std::nullopt, ConvParams::uniform(1, 1)};
  Conv2dOp proj{oracle::random_tensor({2, 1, 1, 2}, 7), std::nullopt, ConvParams::uniform(1, 0)};
  g.layers.push_back({"begin", ResidualBeginOp{}});
  g.layers.push_back({"conv", c});
  g.layers.push_back({"add", ResidualAddOp{{Layer{"proj", proj}}}});
  g.layers.push_back({"gap", GlobalAvgPoolOp{}});
  const auto x = oracle::random_tensor({2, 3, 3}, 8);
  const auto y = forward(g, x);
  const auto a = oracle::conv_loops(x, c.weight, 1, 1, 1, 1);
  const auto b = oracle::conv_loops(x, proj.weight, 1, 1, 0, 0);
  for (std::size_t t = 0; t < 2; ++t) {
    double s = 0;
    for (std::size_t i = 0; i < 9; ++i) s += a[t * 9 + i] + b[t * 9 + i];
    CHECK(y[t] == doctest::Approx(s / 9));
  }
  const auto dir = scratch("residual");
  save_model(g, dir / "m.json", DType::f64);
  CHECK(forward(load_model(dir / "m.json"), x) == y);
  fs::remove_all(dir);
}

TEST_CASE("forward_until returns the layer input") {
  const auto g = toy_net(2);
  const auto x = oracle::random_tensor({3, 8, 8}, 9);
  const auto in2 = forward_until(g, x, "conv2");
  const auto& c1 = find_conv(g, "conv1");
  auto ref = conv2d_forward(x, c1.weight, c1.params);
  for (double& v : ref.data()) v = std::max(v, 0.0);
  CHECK(in2 == ref);
  CHECK(forward_until(g, x, "conv1") == x);
  CHECK_THROWS(forward_until(g, x, "nope"));
  CHECK_THROWS(find_conv(g, "relu1"));
}

TEST_CASE("decomposable layers exclude first and last parameterised layers") {
  CHECK(decomposable_layers(toy_net(1)) == std::vector<std::string>{"conv2", "conv3"});
  const auto w = oracle::random_tensor({3, 3, 3, 16}, 1);
  CHECK_THROWS(substitute_layer(toy_net(1), "conv1", tucker_hosvd(w, {3, 3, 3, 16}),
                                SubstitutionMode::reconstruct));
}

TEST_CASE("full-rank substitution leaves the outputs unchanged") {
  const auto g = toy_net(3);
  const auto& w = find_conv(g, "conv2").weight;
  const auto x = oracle::random_tensor({3, 8, 8}, 10);
  const auto ref = forward(g, x);
  const std::vector<Factorization> fs_{tucker_hosvd(w, {16, 3, 3, 16}), tt_svd(w, tt_max_ranks(w.shape()))};
  for (const auto& f : fs_)
    for (auto mode : {SubstitutionMode::reconstruct, SubstitutionMode::factorized})
      CHECK(max_rel(ref, forward(substitute_layer(g, "conv2", f, mode), x)) <= 1e-5);
}

TEST_CASE("factorized and reconstruct modes agree") {
  const auto g = toy_net(4);
  const auto& w = find_conv(g, "conv2").weight;
  const std::vector<Factorization> fs_{cp_als(w, 12, 0, {20, 1e-8}), tucker_hosvd(w, {5, 3, 3, 7}),
                                       tt_svd(w, {6, 8, 5})};
  for (const auto& f : fs_) {
    const auto a = substitute_layer(g, "conv2", f, SubstitutionMode::reconstruct);
    const auto b = substitute_layer(g, "conv2", f, SubstitutionMode::factorized);
    for (std::uint64_t s = 0; s < 4; ++s) {
      const auto x = oracle::random_tensor({3, 8, 8}, 100 + s);
      CHECK(max_rel(forward(a, x), forward(b, x)) <= 1e-4);
    }
  }
}

TEST_CASE("factorized stages respect stride and padding") {
  const auto w = oracle::random_tensor({4, 3, 3, 5}, 11);
  const ConvParams p{2, 1, 1, 0, 1};
  const auto x = oracle::random_tensor({4, 7, 6}, 12);
  const std::vector<Factorization> fs_{cp_als(w, 6, 1, {10, 1e-8}), tucker_hosvd(w, {3, 3, 3, 4}),
                                       tt_svd(w, {3, 5, 4})};
  for (const auto& f : fs_) {
    const auto ref = conv2d_forward(x, reconstruct(f), p);
    DenseTensor cur = x;
    for (const auto& st : factorized_stages(f, p)) cur = conv2d_forward(cur, st.weight, st.params, st.bias);
    REQUIRE(cur.shape() == ref.shape());
    CHECK(max_rel(ref, cur) <= 1e-10);
  }
}

TEST_CASE("evaluation") {
  ModelGraph g;
  g.input_shape = {1, 2, 2};
  g.class_count = 10;
  g.layers.push_back({"gap", GlobalAvgPoolOp{}});
  g.layers.push_back({"fc", LinearOp{DenseTensor({1, 10}), DenseTensor({10})}});
  std::vector<double> px(100 * 4);
  std::vector<std::uint16_t> labels(100);
  for (std::size_t i = 0; i < 100; ++i) labels[i] = static_cast<std::uint16_t>(i % 10);
  const Dataset balanced(1, 2, 2, px, labels);
  const auto r = evaluate(g, balanced);
  CHECK(r.performance_error == doctest::Approx(0.9));
  CHECK(r.misclassified == 90);
  CHECK(r.per_class_counts == std::vector<std::size_t>(10, 10));
  CHECK(r.per_class_errors[0] == 0);
  CHECK(r.per_class_errors[1] == 10);

  const Dataset one(1, 2, 2, {0, 0, 0, 0}, {0});
  CHECK(evaluate(g, one).performance_error == 0.0);
  CHECK_THROWS(evaluate(g, Dataset()));
}

TEST_CASE("evaluation is deterministic and independent of sharding") {
  const auto g = toy_net(5);
  const auto data = synthetic_dataset(37, 3, 8, 8, 5, 6);
  const auto a = evaluate(g, data, 1);
  CHECK(a.sample_count == 37);
  CHECK(a.performance_error == static_cast<double>(a.misclassified) / 37.0);
  for (std::size_t jobs : {2, 3, 8}) CHECK(evaluate(g, data, jobs) == a);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto logits = forward(g, data.sample(i));
    CHECK(a.predictions[i] == argmax(logits.data()));
  }
}

TEST_CASE("argmax ties go to the lowest index") {
  CHECK(argmax(std::vector<double>{1, 3, 3, 2}) == 1);
  CHECK(argmax(std::vector<double>{0, 0}) == 0);
}

TEST_CASE("substitution with the original weights leaves p unchanged") {
  const auto g = toy_net(7);
  const auto data = synthetic_dataset(20, 3, 8, 8, 5, 8);
  const auto& w = find_conv(g, "conv2").weight;
  const auto sub = substitute_layer(g, "conv2", tucker_hosvd(w, {16, 3, 3, 16}), SubstitutionMode::reconstruct);
  CHECK(evaluate(sub, data).performance_error == evaluate(g, data).performance_error);
}

TEST_CASE("TDS1 dataset round trip") {
  const auto d = synthetic_dataset(5, 2, 3, 4, 7, 9);
  const auto bytes = encode_dataset(d);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "TDS1");
  CHECK(bytes[4] == 5);
  CHECK(bytes.size() == 4 + 16 + 1 + 5 * 24 * 4 + 5 * 2);
  const auto e = decode_dataset(bytes);
  CHECK(e.size() == 5);
  CHECK(e.channels() == 2);
  for (std::size_t i = 0; i < 5; ++i) CHECK(e.label(i) == d.label(i));
  for (std::size_t i = 0; i < d.pixels().size(); ++i)
    CHECK(e.pixels()[i] == static_cast<double>(static_cast<float>(d.pixels()[i])));
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS(decode_dataset(truncated));
  auto magic = bytes;
  magic[3] = '2';
  CHECK_THROWS(decode_dataset(magic));

  const auto sub = d.subset(std::vector<std::size_t>{4, 1});
  CHECK(sub.size() == 2);
  CHECK(sub.sample(0) == d.sample(4));
  CHECK(strided_indices(10, 4) == std::vector<std::size_t>{0, 2, 5, 7});
  CHECK(strided_indices(3, 8) == std::vector<std::size_t>{0, 1, 2});
}
