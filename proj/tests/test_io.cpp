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
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "tdc/factorization_io.hpp"
#include "tdc/format.hpp"
#include "tdc/report.hpp"

using namespace tdc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tdc_test_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Measurement sample(std::string layer, Method method, double f, std::uint64_t seed, double a) {
  Measurement m;
  m.hypothesis = {std::move(layer), method, f, seed};
  m.ranks = method == Method::cp ? std::vector<std::size_t>{7}
                                 : std::vector<std::size_t>{3, 3, 2};
  m.budget_params = 100;
  m.achieved_params = 98;
  m.original_params = 400;
  m.iterations_run = 12;
  m.final_relative_error = a;
  ErrorReport r;
  r.weight = {a * 10.0, a, a * 0.5};
  r.feature = ErrorTriple{a * 3.0, a * 1.5, a * 0.25};
  r.n_w = 400;
  r.n_f = 2048;
  r.batch_size = 8;
  m.errors = r;
  return m;
}

std::vector<Measurement> grid() {
  std::vector<Measurement> ms;
  double a = 0.01;
  for (const char* layer : {"conv2", "conv4"})
    for (auto method : {Method::cp, Method::tucker, Method::tt})
      for (double f : {0.1, 0.5})
        for (std::uint64_t seed : {0u, 1u}) {
          ms.push_back(sample(layer, method, f, seed, a));
          a += 0.013;
        }
  return ms;
}

void check_same(const Measurement& x, const Measurement& y) {
  CHECK(x.hypothesis.layer_id == y.hypothesis.layer_id);
  CHECK(x.hypothesis.method == y.hypothesis.method);
  CHECK(x.hypothesis.retained_fraction == y.hypothesis.retained_fraction);
  CHECK(x.hypothesis.seed == y.hypothesis.seed);
  CHECK(x.ok == y.ok);
  CHECK(x.replicated == y.replicated);
  CHECK(x.ranks == y.ranks);
  CHECK(x.budget_params == y.budget_params);
  CHECK(x.achieved_params == y.achieved_params);
  CHECK(x.original_params == y.original_params);
  CHECK(x.iterations_run == y.iterations_run);
  CHECK(x.final_relative_error == y.final_relative_error);
  REQUIRE(x.errors.has_value() == y.errors.has_value());
  if (x.errors) {
    CHECK(x.errors->weight.absolute == y.errors->weight.absolute);
    CHECK(x.errors->weight.relative == y.errors->weight.relative);
    CHECK(x.errors->weight.scaled == y.errors->weight.scaled);
    REQUIRE(x.errors->feature.has_value() == y.errors->feature.has_value());
    if (x.errors->feature) {
      CHECK(x.errors->feature->absolute == y.errors->feature->absolute);
      CHECK(x.errors->feature->relative == y.errors->feature->relative);
      CHECK(x.errors->feature->scaled == y.errors->feature->scaled);
    }
    CHECK(x.errors->n_w == y.errors->n_w);
    CHECK(x.errors->n_f == y.errors->n_f);
    CHECK(x.errors->batch_size == y.errors->batch_size);
  }
  CHECK(x.p == y.p);
  CHECK(x.p_star == y.p_star);
  CHECK(x.message == y.message);
}

}  // namespace

TEST_CASE("factorization round trip for every method") {
  const auto w = oracle::random_tensor({6, 3, 3, 5}, 21);
  std::vector<Factorization> fs_;
  fs_.push_back(cp_als(w, 4, 3, {20, 1e-12}));
  fs_.push_back(tucker_hosvd(w, {4, 2, 3, 3}));
  fs_.push_back(tt_svd(w, {4, 5, 3}));
  for (const auto& f : fs_) {
    const auto dir = scratch(std::string(to_string(method_of(f))));
    save_factorization(dir, f);
    CHECK(fs::exists(dir / "factorization.json"));
    const auto g = load_factorization(dir);
    CHECK(method_of(g) == method_of(f));
    CHECK(ranks_of(g) == ranks_of(f));
    CHECK(shape_of(g) == shape_of(f));
    CHECK(fit_info(g).seed == fit_info(f).seed);
    CHECK(fit_info(g).iterations_run == fit_info(f).iterations_run);
    CHECK(fit_info(g).final_relative_error == fit_info(f).final_relative_error);
    CHECK(reconstruct(g).values() == reconstruct(f).values());

    const auto doc = nlohmann::json::parse(slurp(dir / "factorization.json"));
    CHECK(doc.at("method") == std::string(to_string(method_of(f))));
    CHECK(doc.at("mode_order") == nlohmann::json::array({"C", "H", "W", "T"}));
    for (const auto& file : doc.at("files")) CHECK(fs::exists(dir / file.get<std::string>()));
  }
}

TEST_CASE("factorization saved as f32 reconstructs to single precision") {
  const auto w = oracle::random_tensor({4, 3, 3, 4}, 8);
  const Factorization f = tucker_hosvd(w, {3, 3, 3, 3});
  const auto dir = scratch("f32");
  save_factorization(dir, f, DType::f32);
  const auto g = load_factorization(dir);
  CHECK(oracle::rel_diff(reconstruct(g), reconstruct(f)) <= 1e-6);
}

TEST_CASE("load_factorization rejects missing or corrupt sidecars") {
  const auto dir = scratch("bad");
  CHECK_THROWS(load_factorization(dir));
  std::ofstream(dir / "factorization.json") << "{\"method\": \"cp\"}";
  CHECK_THROWS(load_factorization(dir));
}

TEST_CASE("measurements CSV round trip") {
  auto ms = grid();
  ms[1].p = 0.25;
  ms[2].p_star = 0.5;
  ms[3].errors->feature.reset();
  ms[3].errors->n_f = 0;
  ms[3].errors->batch_size = 0;
  ms[4].replicated = true;
  Measurement bad;
  bad.hypothesis = {"conv99", Method::tt, 0.5, 0};
  bad.ok = false;
  bad.message = "unknown layer";
  ms.push_back(bad);

  const auto text = measurements_csv(ms);
  const auto back = parse_measurements_csv(text);
  REQUIRE(back.size() == ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) check_same(ms[i], back[i]);
  CHECK(measurements_csv(back) == text);

  std::string header;
  for (std::size_t i = 0; i < measurement_columns().size(); ++i)
    header += (i ? "," : "") + measurement_columns()[i];
  CHECK(text.substr(0, text.find('\n')) == header);
  CHECK(measurement_columns().front() == "layer_id");
  CHECK(text.find("3x3x2") != std::string::npos);
}

TEST_CASE("measurements CSV sanitizes messages") {
  Measurement m;
  m.hypothesis = {"conv2", Method::cp, 0.5, 0};
  m.ok = false;
  m.message = "bad, very\nbad \"input\"";
  const auto back = parse_measurements_csv(measurements_csv(std::vector<Measurement>{m}));
  REQUIRE(back.size() == 1);
  CHECK(back[0].message == "bad; very bad  input ");
}

TEST_CASE("measurements CSV rejects a foreign header") {
  CHECK_THROWS(parse_measurements_csv("layer,method\nconv2,cp\n"));
}

TEST_CASE("ingestion of a complete performance CSV") {
  auto ms = grid();
  std::string csv = "layer_id,method,retained_fraction,seed,p_star\n";
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto& h = ms[i].hypothesis;
    csv += h.layer_id + "," + std::string(to_string(h.method)) + "," +
           format_double(h.retained_fraction) + "," + std::to_string(h.seed) + "," +
           format_double(static_cast<double>(i) / 100.0) + "\n";
  }
  const auto r = ingest_performance(ms, csv);
  CHECK(r.merged == ms.size());
  CHECK(r.diagnostics.empty());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    REQUIRE(ms[i].p_star.has_value());
    CHECK(*ms[i].p_star == static_cast<double>(i) / 100.0);
    CHECK(!ms[i].p.has_value());
  }
}

TEST_CASE("ingestion rejects an unknown key but merges the rest") {
  auto ms = grid();
  const std::string csv =
      "seed,layer_id,method,retained_fraction,p\n"
      "0,conv2,cp,0.1,0.3\n"
      "0,conv6,cp,0.1,0.4\n"
      "1,conv4,tt,0.5,0.2\n";
  const auto r = ingest_performance(ms, csv);
  CHECK(r.merged == 2);
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].find("line 3") != std::string::npos);
  CHECK(r.diagnostics[0].find("unknown hypothesis conv6/cp/0.1/0") != std::string::npos);
  CHECK(ms[0].p == 0.3);
  CHECK(ms.back().p == 0.2);
}

TEST_CASE("ingestion diagnostics for duplicates and malformed rows") {
  auto ms = grid();
  const std::string csv =
      "layer_id,method,retained_fraction,seed,p\n"
      "conv2,cp,0.1,0,0.3\n"
      "conv2,cp,0.1,0,0.9\n"
      "conv2,cp,0.1\n"
      "conv2,svd,0.1,0,0.3\n"
      "conv2,cp,0.1,1,1.5\n"
      "conv2,cp,0.1,1,\n";
  const auto r = ingest_performance(ms, csv);
  CHECK(r.merged == 2);
  REQUIRE(r.diagnostics.size() == 4);
  CHECK(r.diagnostics[0].find("duplicate key") != std::string::npos);
  CHECK(r.diagnostics[0].find("first on line 2") != std::string::npos);
  CHECK(r.diagnostics[1].find("wrong number of columns") != std::string::npos);
  CHECK(r.diagnostics[2].find("unparseable") != std::string::npos);
  CHECK(r.diagnostics[3].find("unparseable") != std::string::npos);
  CHECK(ms[0].p == 0.3);
  CHECK(!ms[1].p.has_value());

  CHECK_THROWS(ingest_performance(ms, ""));
  CHECK_THROWS(ingest_performance(ms, "layer_id,method,seed,p\n"));
  CHECK_THROWS(ingest_performance(ms, "layer_id,method,retained_fraction,seed\n"));
}

TEST_CASE("merging an exported measurements file is a no-op") {
  auto ms = grid();
  for (std::size_t i = 0; i < ms.size(); ++i) ms[i].p = static_cast<double>(i) / 50.0;
  const auto text = measurements_csv(ms);
  const auto r = ingest_performance(ms, text);
  CHECK(r.merged == ms.size());
  CHECK(r.diagnostics.empty());
  CHECK(measurements_csv(ms) == text);
}

TEST_CASE("empty study emits schema-valid files") {
  const auto dir = scratch("empty");
  emit_reports({}, dir);
  const auto csv = slurp(dir / "measurements.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
  CHECK(parse_measurements_csv(csv).empty());
  for (auto g : kAllGroupings) {
    const auto doc =
        nlohmann::json::parse(slurp(dir / ("tau_" + std::string(to_string(g)) + ".json")));
    CHECK(doc.at("grouping") == std::string(to_string(g)));
    CHECK(doc.at("entries").is_array());
  }
  const auto scatter = slurp(dir / "scatter_by_layer.csv");
  CHECK(std::count(scatter.begin(), scatter.end(), '\n') == 1);
}

TEST_CASE("scatter has one row per successful measurement") {
  auto ms = grid();
  ms.resize(2);
  ms[0].p = 0.1;
  Measurement bad;
  bad.hypothesis = {"conv2", Method::cp, 0.9, 0};
  bad.ok = false;
  ms.push_back(bad);
  const auto text = scatter_csv(ms);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(text.rfind("layer_id,method,retained_fraction,seed,", 0) == 0);
}

TEST_CASE("tau report carries every error and performance pair") {
  auto ms = grid();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    ms[i].p = static_cast<double>(i) / 50.0;
    ms[i].p_star = 1.0 - static_cast<double>(i) / 50.0;
  }
  const auto doc = nlohmann::json::parse(tau_report_json(ms, Grouping::all));
  REQUIRE(doc.at("entries").size() == 12);
  for (const auto& e : doc.at("entries")) {
    const auto& s = e.at("summaries").at(0);
    CHECK(s.at("runs") == nlohmann::json::array({0, 1}));
    const double expect = e.at("performance") == "p" ? 1.0 : -1.0;
    CHECK(s.at("mean_tau").get<double>() == expect);
  }
}

TEST_CASE("re-emitting the same measurements is byte-identical") {
  auto ms = grid();
  for (std::size_t i = 0; i < ms.size(); ++i) ms[i].p = static_cast<double>(i % 7) / 10.0;
  const auto a = scratch("emit_a"), b = scratch("emit_b");
  emit_reports(ms, a);
  emit_reports(ms, b);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
  }
  CHECK(files == 6);
}
