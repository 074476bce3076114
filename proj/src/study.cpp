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

#include "tdc/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "tdc/metrics.hpp"
#include "tdc/rank_select.hpp"

namespace tdc {

using nlohmann::json;

void StudyConfig::validate() const {
  if (model.empty()) throw std::invalid_argument("study config: 'model' is required");
  if (methods.empty()) throw std::invalid_argument("study config: 'methods' must be non-empty");
  if (retained_fractions.empty())
    throw std::invalid_argument("study config: 'retained_fractions' must be non-empty");
  for (double f : retained_fractions)
    if (!(f > 0.0 && f <= 1.0))
      throw std::invalid_argument("study config: retained fraction outside (0, 1]");
  if (seeds.empty()) throw std::invalid_argument("study config: at least one seed/run is required");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw std::invalid_argument("study config: seeds must be distinct");
  if (std::set<std::string>(layers.begin(), layers.end()).size() != layers.size())
    throw std::invalid_argument("study config: layer ids must be distinct");
  if ((feature_errors || evaluate) && !dataset)
    throw std::invalid_argument("study config: feature errors and evaluation need a 'dataset'");
  if (feature_errors && feature_batch_size == 0)
    throw std::invalid_argument("study config: 'feature_batch_size' must be >= 1");
  if (jobs == 0) throw std::invalid_argument("study config: 'jobs' must be >= 1");
}

StudyConfig parse_study_config(const std::string& text, const std::filesystem::path& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("study config: invalid JSON: ") + e.what());
  }
  auto path = [&](const std::string& p) {
    std::filesystem::path q(p);
    return q.is_absolute() ? q : base / q;
  };
  StudyConfig c;
  try {
    c.model = path(j.at("model").get<std::string>());
    if (j.contains("dataset") && !j.at("dataset").is_null())
      c.dataset = path(j.at("dataset").get<std::string>());
    if (j.contains("layers")) c.layers = j.at("layers").get<std::vector<std::string>>();
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (j.contains("retained_fractions"))
      c.retained_fractions = j.at("retained_fractions").get<std::vector<double>>();
    if (j.contains("seeds")) {
      c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    } else if (j.contains("runs")) {
      c.seeds.clear();
      for (std::uint64_t s = 0; s < j.at("runs").get<std::uint64_t>(); ++s) c.seeds.push_back(s);
    }
    if (j.contains("errors")) {
      c.weight_errors = c.feature_errors = false;
      for (const auto& e : j.at("errors")) {
        const auto name = e.get<std::string>();
        if (name == "weight")
          c.weight_errors = true;
        else if (name == "feature")
          c.feature_errors = true;
        else
          throw std::invalid_argument("unknown error family '" + name + "' (weight|feature)");
      }
      if (!c.weight_errors)
        throw std::invalid_argument("'errors' must include \"weight\"");
    }
    c.feature_batch_size = j.value("feature_batch_size", c.feature_batch_size);
    c.evaluate = j.value("evaluate", c.evaluate);
    c.eval_samples = j.value("eval_samples", c.eval_samples);
    if (j.contains("substitution_mode"))
      c.substitution = parse_substitution_mode(j.at("substitution_mode").get<std::string>());
    if (j.contains("cp")) {
      const auto& cp = j.at("cp");
      c.cp.max_iters = cp.value("max_iters", c.cp.max_iters);
      c.cp.tol = cp.value("tol", c.cp.tol);
    }
    if (j.contains("performance_csv") && !j.at("performance_csv").is_null())
      c.performance_csv = path(j.at("performance_csv").get<std::string>());
    if (j.contains("output_dir")) c.output_dir = path(j.at("output_dir").get<std::string>());
    c.jobs = j.value("jobs", c.jobs);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("study config: ") + e.what());
  }
  c.validate();
  return c;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open study config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_study_config(ss.str(), path.parent_path());
}

namespace {

struct LayerContext {
  std::string id;
  const Conv2dOp* conv = nullptr;
  std::string error;  // non-empty if the layer cannot be studied
  std::vector<DenseTensor> inputs;
  std::vector<double> reference_norms;
};

struct WorkUnit {
  std::size_t layer = 0;
  Method method = Method::cp;
  double fraction = 1.0;
  std::size_t first_row = 0;  // rows [first_row, first_row + seeds)
};

Factorization decompose(const DenseTensor& w, const RankSpec& spec, std::uint64_t seed,
                        const CpOptions& cp) {
  const auto& r = spec.ranks;
  switch (spec.method) {
    case Method::cp: return cp_als(w, r.at(0), seed, cp);
    case Method::tucker: return tucker_hosvd(w, {r.at(0), r.at(1), r.at(2), r.at(3)});
    case Method::tt: return tt_svd(w, {r.at(0), r.at(1), r.at(2)});
  }
  throw std::invalid_argument("unknown method");
}

void fill_row(Measurement& row, const StudyConfig& cfg, const ModelGraph& model,
              const Dataset* eval_data, const LayerContext& layer, const RankSpec& spec,
              const Factorization& f) {
  const DenseTensor& w = layer.conv->weight;
  const DenseTensor approx = reconstruct(f);
  for (double v : approx.data())
    if (!std::isfinite(v)) throw std::runtime_error("decomposition produced non-finite values");
  row.ranks = spec.ranks;
  row.budget_params = spec.budget_params;
  row.achieved_params = param_count(f);
  row.original_params = w.size();
  row.iterations_run = fit_info(f).iterations_run;
  row.final_relative_error = fit_info(f).final_relative_error;
  ErrorReport rep;
  rep.weight = weight_errors(w, approx);
  rep.n_w = w.size();
  if (cfg.feature_errors) {
    rep.feature = feature_errors(w, approx, layer.inputs, layer.conv->params, layer.reference_norms);
    rep.batch_size = layer.inputs.size();
    rep.n_f = conv2d_forward(layer.inputs.front(), w, layer.conv->params).size();
  }
  row.errors = rep;
  if (cfg.evaluate) {
    const auto sub = substitute_layer(model, layer.id, f, cfg.substitution);
    row.p = evaluate(sub, *eval_data, 1).performance_error;
  }
}

void run_unit(const WorkUnit& u, const StudyConfig& cfg, const ModelGraph& model,
              const Dataset* eval_data, const std::vector<LayerContext>& layers,
              std::vector<Measurement>& rows) {
  const auto& layer = layers[u.layer];
  auto fail_all = [&](const std::string& msg) {
    for (std::size_t k = 0; k < cfg.seeds.size(); ++k) {
      rows[u.first_row + k].ok = false;
      rows[u.first_row + k].message = msg;
    }
  };
  if (!layer.error.empty()) return fail_all(layer.error);
  RankSpec spec;
  try {
    spec = solve_ranks(u.method, layer.conv->weight.shape(), u.fraction);
  } catch (const std::exception& e) {
    return fail_all(std::string("rank infeasible: ") + e.what());
  }
  if (u.method == Method::cp) {
    for (std::size_t k = 0; k < cfg.seeds.size(); ++k) {
      auto& row = rows[u.first_row + k];
      row.ranks = spec.ranks;
      row.budget_params = spec.budget_params;
      try {
        const auto f = decompose(layer.conv->weight, spec, cfg.seeds[k], cfg.cp);
        fill_row(row, cfg, model, eval_data, layer, spec, f);
      } catch (const std::exception& e) {
        row.ok = false;
        row.message = e.what();
      }
    }
    return;
  }
  // Seed-independent: compute once, replicate.
  Measurement proto;
  try {
    const auto f = decompose(layer.conv->weight, spec, 0, cfg.cp);
    fill_row(proto, cfg, model, eval_data, layer, spec, f);
  } catch (const std::exception& e) {
    proto.ok = false;
    proto.message = e.what();
    proto.ranks = spec.ranks;
    proto.budget_params = spec.budget_params;
  }
  for (std::size_t k = 0; k < cfg.seeds.size(); ++k) {
    auto& row = rows[u.first_row + k];
    const Hypothesis h = row.hypothesis;
    row = proto;
    row.hypothesis = h;
    row.replicated = true;
  }
}

}  // namespace

StudyResult run_study(const StudyConfig& cfg, const ModelGraph& model, const Dataset* data) {
  cfg.validate();
  if ((cfg.feature_errors || cfg.evaluate) && !data)
    throw std::invalid_argument("run_study: feature errors and evaluation need a dataset");
  StudyResult result;

  std::vector<std::string> layer_ids = cfg.layers.empty() ? decomposable_layers(model) : cfg.layers;
  if (layer_ids.empty()) throw std::invalid_argument("run_study: no layers to decompose");

  // Per-layer context: weight lookup and (optionally) the layer inputs.
  std::vector<LayerContext> layers(layer_ids.size());
  std::vector<std::size_t> feature_idx;
  if (cfg.feature_errors) feature_idx = strided_indices(data->size(), cfg.feature_batch_size);
  for (std::size_t i = 0; i < layer_ids.size(); ++i) {
    auto& ctx = layers[i];
    ctx.id = layer_ids[i];
    try {
      ctx.conv = &find_conv(model, ctx.id);
      if (ctx.conv->weight.ndim() != 4) throw std::invalid_argument("weight is not 4-way");
      if (cfg.feature_errors) {
        if (feature_idx.empty()) throw std::invalid_argument("dataset is empty");
        for (auto s : feature_idx) ctx.inputs.push_back(forward_until(model, data->sample(s), ctx.id));
        ctx.reference_norms = reference_feature_norms(ctx.conv->weight, ctx.inputs, ctx.conv->params);
      }
    } catch (const std::exception& e) {
      ctx.error = "layer '" + ctx.id + "': " + e.what();
      result.diagnostics.push_back(ctx.error);
    }
  }

  Dataset eval_subset;
  const Dataset* eval_data = data;
  if (cfg.evaluate && cfg.eval_samples > 0 && cfg.eval_samples < data->size()) {
    const auto idx = strided_indices(data->size(), cfg.eval_samples);
    eval_subset = data->subset(idx);
    eval_data = &eval_subset;
  }

  std::vector<WorkUnit> units;
  for (std::size_t l = 0; l < layers.size(); ++l)
    for (auto m : cfg.methods)
      for (double f : cfg.retained_fractions) {
        units.push_back({l, m, f, result.measurements.size()});
        for (auto s : cfg.seeds) {
          Measurement row;
          row.hypothesis = {layers[l].id, m, f, s};
          result.measurements.push_back(std::move(row));
        }
      }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < units.size(); i = next++)
      run_unit(units[i], cfg, model, eval_data, layers, result.measurements);
  };
  const std::size_t jobs = std::min(cfg.jobs, units.size());
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < jobs; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& m : result.measurements)
    if (!m.ok) ++result.failures;
  return result;
}

StudyResult run_study(const StudyConfig& cfg) {
  cfg.validate();
  const auto model = load_model(cfg.model);
  std::optional<Dataset> data;
  if (cfg.dataset) data = read_dataset(*cfg.dataset);
  return run_study(cfg, model, data ? &*data : nullptr);
}

}  // namespace tdc
