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

#include "tdc/factorization_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "tdc/tensor_io.hpp"

namespace tdc {

using nlohmann::json;

namespace {

constexpr const char* kSidecar = "factorization.json";

DenseTensor as_tensor(const Matrix& m) {
  return DenseTensor({m.rows(), m.cols()}, std::vector<double>(m.values()));
}

Matrix as_matrix(const DenseTensor& t) {
  if (t.ndim() != 2) throw std::runtime_error("factor file is not a matrix");
  return Matrix(t.dim(0), t.dim(1), std::vector<double>(t.values()));
}

}  // namespace

void save_factorization(const std::filesystem::path& dir, const Factorization& f, DType dtype) {
  std::filesystem::create_directories(dir);
  json files = json::object();
  auto put = [&](const std::string& key, const DenseTensor& t) {
    const std::string name = key + ".tdt";
    write_tensor(dir / name, t, dtype);
    files[key] = name;
  };
  if (const auto* cp = std::get_if<CpFactorization>(&f)) {
    put("factor_c", as_tensor(cp->factors[0]));
    put("factor_h", as_tensor(cp->factors[1]));
    put("factor_w", as_tensor(cp->factors[2]));
    put("factor_t", as_tensor(cp->factors[3]));
  } else if (const auto* tk = std::get_if<TuckerFactorization>(&f)) {
    put("core", tk->core);
    put("factor_c", as_tensor(tk->factor_c));
    put("factor_t", as_tensor(tk->factor_t));
  } else {
    const auto& tt = std::get<TtFactorization>(f);
    put("core0", as_tensor(tt.first));
    put("core1", tt.middle1);
    put("core2", tt.middle2);
    put("core3", as_tensor(tt.last));
  }
  const auto& info = fit_info(f);
  json j;
  j["method"] = to_string(method_of(f));
  j["shape"] = shape_of(f);
  j["ranks"] = ranks_of(f);
  j["mode_order"] = {"C", "H", "W", "T"};
  j["seed"] = info.seed ? json(*info.seed) : json(nullptr);
  j["iterations_run"] = info.iterations_run;
  j["final_relative_error"] = info.final_relative_error;
  j["files"] = files;
  std::ofstream out(dir / kSidecar, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + (dir / kSidecar).string());
  out << j.dump(2) << '\n';
}

Factorization load_factorization(const std::filesystem::path& dir) {
  std::ifstream in(dir / kSidecar);
  if (!in) throw std::runtime_error("no " + std::string(kSidecar) + " in " + dir.string());
  json j;
  in >> j;
  const auto method = parse_method(j.at("method").get<std::string>());
  const auto ranks = j.at("ranks").get<std::vector<std::size_t>>();
  auto file = [&](const char* key) { return read_tensor(dir / j.at("files").at(key).get<std::string>()); };
  FitInfo info;
  if (!j.at("seed").is_null()) info.seed = j.at("seed").get<std::uint64_t>();
  info.iterations_run = j.value("iterations_run", std::size_t{0});
  info.final_relative_error = j.value("final_relative_error", 0.0);

  switch (method) {
    case Method::cp: {
      CpFactorization cp;
      cp.rank = ranks.at(0);
      cp.factors = {as_matrix(file("factor_c")), as_matrix(file("factor_h")),
                    as_matrix(file("factor_w")), as_matrix(file("factor_t"))};
      for (const auto& m : cp.factors)
        if (m.cols() != cp.rank) throw std::runtime_error("CP factor column count != rank");
      cp.info = info;
      return cp;
    }
    case Method::tucker: {
      TuckerFactorization tk;
      if (ranks.size() != 4) throw std::runtime_error("Tucker needs four ranks");
      tk.ranks = {ranks[0], ranks[1], ranks[2], ranks[3]};
      tk.core = file("core");
      tk.factor_c = as_matrix(file("factor_c"));
      tk.factor_t = as_matrix(file("factor_t"));
      if (tk.core.ndim() != 4 || tk.core.dim(0) != tk.factor_c.cols() ||
          tk.core.dim(3) != tk.factor_t.cols())
        throw std::runtime_error("Tucker core does not match factor ranks");
      tk.info = info;
      return tk;
    }
    case Method::tt: {
      TtFactorization tt;
      if (ranks.size() != 3) throw std::runtime_error("TT needs three ranks");
      tt.ranks = {ranks[0], ranks[1], ranks[2]};
      tt.first = as_matrix(file("core0"));
      tt.middle1 = file("core1");
      tt.middle2 = file("core2");
      tt.last = as_matrix(file("core3"));
      if (tt.first.cols() != ranks[0] || tt.middle1.ndim() != 3 || tt.middle1.dim(0) != ranks[0] ||
          tt.middle1.dim(2) != ranks[1] || tt.middle2.ndim() != 3 || tt.middle2.dim(0) != ranks[1] ||
          tt.middle2.dim(2) != ranks[2] || tt.last.rows() != ranks[2])
        throw std::runtime_error("TT cores do not chain with the recorded ranks");
      tt.info = info;
      return tt;
    }
  }
  throw std::runtime_error("unreachable");
}

}  // namespace tdc
