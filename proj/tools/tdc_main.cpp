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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdc/convnet.hpp"
#include "tdc/correlation.hpp"
#include "tdc/dataset.hpp"
#include "tdc/decomp.hpp"
#include "tdc/factorization_io.hpp"
#include "tdc/metrics.hpp"
#include "tdc/rank_select.hpp"
#include "tdc/report.hpp"
#include "tdc/study.hpp"
#include "tdc/synth.hpp"
#include "tdc/tensor_io.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

ordered_json triple_json(const tdc::ErrorTriple& e) {
  return {{"absolute", e.absolute}, {"relative", e.relative}, {"scaled", e.scaled}};
}

tdc::Shape parse_shape(const std::string& text) {
  tdc::Shape s;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) s.push_back(std::stoul(part));
  if (s.size() != 4) throw std::invalid_argument("--shape needs four comma-separated sizes");
  return s;
}

struct WeightSource {
  std::string weight_file;
  std::string model;
  std::string layer;

  void add(CLI::App* app) {
    app->add_option("--weight", weight_file, "TDT1 weight tensor (C,H,W,T)");
    app->add_option("--model", model, "Model manifest");
    app->add_option("--layer", layer, "Conv layer id inside --model");
  }

  tdc::DenseTensor load() const {
    if (!weight_file.empty()) return tdc::read_tensor(weight_file);
    if (model.empty() || layer.empty())
      throw std::invalid_argument("give either --weight or --model with --layer");
    return tdc::find_conv(tdc::load_model(model), layer).weight;
  }
};

int run_rank(const std::string& shape_text, const WeightSource& src, const std::string& method,
             const std::vector<double>& fractions) {
  const tdc::Shape shape = shape_text.empty() ? src.load().shape() : parse_shape(shape_text);
  std::vector<tdc::Method> methods;
  if (method == "all")
    methods = {tdc::Method::cp, tdc::Method::tucker, tdc::Method::tt};
  else
    methods = {tdc::parse_method(method)};
  ordered_json out = ordered_json::array();
  for (auto m : methods)
    for (double f : fractions) {
      const auto spec = tdc::solve_ranks(m, shape, f);
      out.push_back({{"method", std::string(tdc::to_string(m))},
                     {"retained_fraction", f},
                     {"ranks", spec.ranks},
                     {"budget_params", spec.budget_params},
                     {"achieved_params", spec.achieved_params},
                     {"original_params", tdc::element_count(shape)}});
    }
  std::cout << out.dump(2) << "\n";
  return 0;
}

tdc::Factorization decompose(const tdc::DenseTensor& w, const std::string& method, double fraction,
                             std::uint64_t seed, const tdc::CpOptions& cp) {
  const auto spec = tdc::solve_ranks(tdc::parse_method(method), w.shape(), fraction);
  const auto& r = spec.ranks;
  switch (spec.method) {
    case tdc::Method::cp: return tdc::cp_als(w, r[0], seed, cp);
    case tdc::Method::tucker: return tdc::tucker_hosvd(w, {r[0], r[1], r[2], r[3]});
    case tdc::Method::tt: return tdc::tt_svd(w, {r[0], r[1], r[2]});
  }
  throw std::logic_error("unreachable");
}

int run_errors(const WeightSource& src, const std::string& fact_dir, const std::string& dataset,
               std::size_t batch) {
  const auto w = src.load();
  const auto f = tdc::load_factorization(fact_dir);
  const auto approx = tdc::reconstruct(f);
  ordered_json out{{"weight", triple_json(tdc::weight_errors(w, approx))}, {"n_w", w.size()}};
  if (!dataset.empty()) {
    if (src.model.empty() || src.layer.empty())
      throw std::invalid_argument("feature errors need --model and --layer");
    const auto g = tdc::load_model(src.model);
    const auto& conv = tdc::find_conv(g, src.layer);
    const auto data = tdc::read_dataset(dataset);
    std::vector<tdc::DenseTensor> inputs;
    for (auto i : tdc::strided_indices(data.size(), batch))
      inputs.push_back(tdc::forward_until(g, data.sample(i), src.layer));
    out["feature"] = triple_json(tdc::feature_errors(w, approx, inputs, conv.params));
    out["batch_size"] = inputs.size();
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_evaluate(const std::string& model, const std::string& dataset, const std::string& layer,
                 const std::string& fact_dir, const std::string& mode, std::size_t jobs) {
  auto g = tdc::load_model(model);
  if (!fact_dir.empty()) {
    if (layer.empty()) throw std::invalid_argument("--factorization needs --layer");
    g = tdc::substitute_layer(g, layer, tdc::load_factorization(fact_dir),
                              tdc::parse_substitution_mode(mode));
  }
  const auto r = tdc::evaluate(g, tdc::read_dataset(dataset), jobs);
  ordered_json out{{"performance_error", r.performance_error},
                   {"sample_count", r.sample_count},
                   {"misclassified", r.misclassified},
                   {"per_class_errors", r.per_class_errors},
                   {"per_class_counts", r.per_class_counts}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_study_cmd(const std::string& config, std::optional<std::size_t> jobs) {
  auto cfg = tdc::load_study_config(config);
  if (jobs) {
    cfg.jobs = *jobs;
    cfg.validate();
  }
  auto result = tdc::run_study(cfg);
  for (const auto& d : result.diagnostics) std::cerr << "warning: " << d << "\n";
  if (cfg.performance_csv) {
    const auto ing = tdc::ingest_performance_file(result.measurements, *cfg.performance_csv);
    for (const auto& d : ing.diagnostics) std::cerr << "warning: " << d << "\n";
    std::cerr << "merged " << ing.merged << " performance rows\n";
  }
  tdc::emit_reports(result.measurements, cfg.output_dir);
  for (const auto& m : result.measurements)
    if (!m.ok)
      std::cerr << "failed: " << m.hypothesis.layer_id << " " << tdc::to_string(m.hypothesis.method)
                << " " << m.hypothesis.retained_fraction << " seed " << m.hypothesis.seed << ": "
                << m.message << "\n";
  std::cout << result.measurements.size() << " measurements, " << result.failures
            << " failed; reports in " << cfg.output_dir.string() << "\n";
  return result.failures == 0 ? 0 : 1;
}

int run_report(const std::string& measurements, const std::string& performance,
               const std::string& out_dir) {
  auto ms = tdc::read_measurements_csv(measurements);
  if (!performance.empty()) {
    const auto ing = tdc::ingest_performance_file(ms, performance);
    for (const auto& d : ing.diagnostics) std::cerr << "warning: " << d << "\n";
    std::cerr << "merged " << ing.merged << " performance rows\n";
  }
  tdc::emit_reports(ms, out_dir);
  std::cout << ms.size() << " measurements; reports in " << out_dir << "\n";
  return 0;
}

int run_synth(const std::string& out_dir, std::uint64_t seed, std::size_t samples) {
  fs::create_directories(out_dir);
  tdc::save_model(tdc::synthetic_garipov(seed), fs::path(out_dir) / "model.json");
  if (samples > 0)
    tdc::write_dataset(fs::path(out_dir) / "dataset.tds",
                       tdc::synthetic_dataset(samples, 3, 32, 32, 10, seed + 1));
  std::cout << "wrote " << out_dir << "\n";
  return 0;
}

int run_checkpoint_change(const std::string& before, const std::string& after) {
  const auto a = tdc::load_model(before);
  const auto b = tdc::load_model(after);
  std::vector<std::string> ids;
  std::vector<tdc::DenseTensor> wa, wb;
  for (const auto& layer : a.layers)
    if (const auto* c = std::get_if<tdc::Conv2dOp>(&layer.op)) {
      ids.push_back(layer.id);
      wa.push_back(c->weight);
      wb.push_back(tdc::find_conv(b, layer.id).weight);
    }
  const auto change = tdc::checkpoint_change(wa, wb);
  ordered_json out = ordered_json::array();
  for (std::size_t i = 0; i < ids.size(); ++i)
    out.push_back({{"layer_id", ids[i]},
                   {"log10_relative_change",
                    change[i] ? ordered_json(*change[i]) : ordered_json("no-change")}});
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor-decomposition compression toolkit"};
  app.require_subcommand(1);

  auto* rank = app.add_subcommand("rank", "Solve ranks for a retained parameter fraction");
  std::string shape_text, rank_method = "all";
  std::vector<double> fractions{0.1, 0.25, 0.5, 0.75, 0.9};
  WeightSource rank_src;
  rank->add_option("--shape", shape_text, "C,H,W,T");
  rank_src.add(rank);
  rank->add_option("--method", rank_method, "cp|tucker|tt|all");
  rank->add_option("--fraction", fractions, "Retained fractions");

  auto* dec = app.add_subcommand("decompose", "Decompose one weight tensor");
  WeightSource dec_src;
  std::string dec_method, dec_out;
  double dec_fraction = 0.5;
  std::uint64_t dec_seed = 0;
  tdc::CpOptions cp;
  dec_src.add(dec);
  dec->add_option("--method", dec_method, "cp|tucker|tt")->required();
  dec->add_option("--fraction", dec_fraction, "Retained fraction")->required();
  dec->add_option("--seed", dec_seed, "CP initialisation seed");
  dec->add_option("--max-iters", cp.max_iters, "CP-ALS iteration cap");
  dec->add_option("--tol", cp.tol, "CP-ALS relative improvement tolerance");
  dec->add_option("--out", dec_out, "Output directory")->required();

  auto* err = app.add_subcommand("errors", "Approximation errors of a saved factorization");
  WeightSource err_src;
  std::string err_fact, err_dataset;
  std::size_t err_batch = 256;
  err_src.add(err);
  err->add_option("--factorization", err_fact, "Factorization directory")->required();
  err->add_option("--dataset", err_dataset, "TDS1 dataset for feature errors");
  err->add_option("--batch", err_batch, "Feature-error batch size");

  auto* ev = app.add_subcommand("evaluate", "Classification error of a (substituted) model");
  std::string ev_model, ev_dataset, ev_layer, ev_fact, ev_mode = "reconstruct";
  std::size_t ev_jobs = 1;
  ev->add_option("--model", ev_model, "Model manifest")->required();
  ev->add_option("--dataset", ev_dataset, "TDS1 dataset")->required();
  ev->add_option("--layer", ev_layer, "Layer to substitute");
  ev->add_option("--factorization", ev_fact, "Factorization directory");
  ev->add_option("--mode", ev_mode, "reconstruct|factorized");
  ev->add_option("--jobs", ev_jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* st = app.add_subcommand("study", "Run a full hypothesis grid");
  std::string st_config;
  std::optional<std::size_t> st_jobs;
  st->add_option("--config", st_config, "Study config JSON")->required();
  st->add_option("--jobs", st_jobs, "Worker threads (overrides the config)");

  auto* rep = app.add_subcommand("report", "Re-emit reports from a measurements CSV");
  std::string rep_in, rep_perf, rep_out;
  rep->add_option("--measurements", rep_in, "measurements.csv")->required();
  rep->add_option("--performance", rep_perf, "CSV with p and/or p_star to merge");
  rep->add_option("--out", rep_out, "Output directory")->required();

  auto* syn = app.add_subcommand("synth", "Write a random GaripovNet-shaped model and dataset");
  std::string syn_out;
  std::uint64_t syn_seed = 0;
  std::size_t syn_samples = 0;
  syn->add_option("--out", syn_out, "Output directory")->required();
  syn->add_option("--seed", syn_seed, "Random seed");
  syn->add_option("--samples", syn_samples, "Dataset size (0: no dataset)");

  auto* chk = app.add_subcommand("checkpoint-change", "Per-layer log10 relative weight change");
  std::string chk_before, chk_after;
  chk->add_option("--before", chk_before, "Earlier model manifest")->required();
  chk->add_option("--after", chk_after, "Later model manifest")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rank) return run_rank(shape_text, rank_src, rank_method, fractions);
    if (*dec) {
      const auto f = decompose(dec_src.load(), dec_method, dec_fraction, dec_seed, cp);
      tdc::save_factorization(dec_out, f);
      std::cout << "wrote " << dec_out << " (relative error "
                << tdc::fit_info(f).final_relative_error << ")\n";
      return 0;
    }
    if (*err) return run_errors(err_src, err_fact, err_dataset, err_batch);
    if (*ev) return run_evaluate(ev_model, ev_dataset, ev_layer, ev_fact, ev_mode, ev_jobs);
    if (*st) return run_study_cmd(st_config, st_jobs);
    if (*rep) return run_report(rep_in, rep_perf, rep_out);
    if (*syn) return run_synth(syn_out, syn_seed, syn_samples);
    if (*chk) return run_checkpoint_change(chk_before, chk_after);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
