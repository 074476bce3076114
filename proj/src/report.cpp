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

#include "tdc/report.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "tdc/format.hpp"

namespace tdc {

using nlohmann::ordered_json;

const std::vector<std::string>& measurement_columns() {
  static const std::vector<std::string> cols{
      "layer_id",         "method",           "retained_fraction", "seed",
      "replicated",       "status",           "ranks",             "budget_params",
      "achieved_params",  "original_params",  "iterations_run",    "final_relative_error",
      "weight_absolute",  "weight_relative",  "weight_scaled",     "feature_absolute",
      "feature_relative", "feature_scaled",   "n_w",               "n_f",
      "batch_size",       "p",                "p_star",            "message"};
  return cols;
}

const std::vector<std::string>& scatter_columns() {
  static const std::vector<std::string> cols{
      "layer_id",        "method",           "retained_fraction", "seed",
      "weight_absolute", "weight_relative",  "weight_scaled",     "feature_absolute",
      "feature_relative", "feature_scaled",  "p",                 "p_star"};
  return cols;
}

namespace {

std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ch == ',' ? ';' : ' ';
  return s;
}

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::string ranks_string(const std::vector<std::size_t>& r) {
  std::string out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(r[i]);
  }
  return out;
}

std::vector<std::size_t> parse_ranks(std::string_view s) {
  std::vector<std::size_t> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find('x', start);
    out.push_back(parse_integer<std::size_t>(
        s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string error_cell(const Measurement& m, ErrorKey k) { return format_optional(error_value(m, k)); }

std::optional<double> optional_cell(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

ordered_json number_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json pairs_json(const PairCounts& c) {
  return {{"concordant", c.concordant}, {"discordant", c.discordant}, {"total", c.total}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

using Key = std::tuple<std::string, Method, double, std::uint64_t>;

Key key_of(const Hypothesis& h) { return {h.layer_id, h.method, h.retained_fraction, h.seed}; }

}  // namespace

std::string measurements_csv(std::span<const Measurement> ms) {
  std::string out = join(measurement_columns());
  for (const auto& m : ms) {
    const auto& h = m.hypothesis;
    std::vector<std::string> row{h.layer_id,
                                 std::string(to_string(h.method)),
                                 format_double(h.retained_fraction),
                                 std::to_string(h.seed),
                                 m.replicated ? "true" : "false",
                                 m.ok ? "ok" : "failed",
                                 ranks_string(m.ranks),
                                 std::to_string(m.budget_params),
                                 std::to_string(m.achieved_params),
                                 std::to_string(m.original_params),
                                 std::to_string(m.iterations_run),
                                 format_optional(m.final_relative_error)};
    for (auto k : kAllErrorKeys) row.push_back(error_cell(m, k));
    const bool e = m.errors.has_value();
    row.push_back(e ? std::to_string(m.errors->n_w) : "");
    row.push_back(e && m.errors->feature ? std::to_string(m.errors->n_f) : "");
    row.push_back(e && m.errors->feature ? std::to_string(m.errors->batch_size) : "");
    row.push_back(format_optional(m.p));
    row.push_back(format_optional(m.p_star));
    row.push_back(sanitize(m.message));
    out += join(row);
  }
  return out;
}

std::string scatter_csv(std::span<const Measurement> ms) {
  std::string out = join(scatter_columns());
  for (const auto& m : ms) {
    if (!m.ok) continue;
    const auto& h = m.hypothesis;
    std::vector<std::string> row{h.layer_id, std::string(to_string(h.method)),
                                 format_double(h.retained_fraction), std::to_string(h.seed)};
    for (auto k : kAllErrorKeys) row.push_back(error_cell(m, k));
    row.push_back(format_optional(m.p));
    row.push_back(format_optional(m.p_star));
    out += join(row);
  }
  return out;
}

std::vector<Measurement> parse_measurements_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty() || split(lines.front()) != measurement_columns())
    throw std::invalid_argument("measurements CSV: header does not match the fixed column order");
  std::vector<Measurement> ms;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto c = split(lines[i]);
    if (c.size() != measurement_columns().size())
      throw std::invalid_argument("measurements CSV line " + std::to_string(i + 1) +
                                  ": wrong number of columns");
    try {
      Measurement m;
      m.hypothesis = {c[0], parse_method(c[1]), parse_double(c[2]),
                      parse_integer<std::uint64_t>(c[3])};
      m.replicated = c[4] == "true";
      m.ok = c[5] == "ok";
      m.ranks = parse_ranks(c[6]);
      m.budget_params = parse_integer<std::size_t>(c[7]);
      m.achieved_params = parse_integer<std::size_t>(c[8]);
      m.original_params = parse_integer<std::size_t>(c[9]);
      m.iterations_run = parse_integer<std::size_t>(c[10]);
      m.final_relative_error = optional_cell(c[11]);
      if (!c[12].empty()) {
        ErrorReport rep;
        rep.weight = {parse_double(c[12]), parse_double(c[13]), parse_double(c[14])};
        rep.n_w = parse_integer<std::size_t>(c[18]);
        if (!c[15].empty()) {
          rep.feature = ErrorTriple{parse_double(c[15]), parse_double(c[16]), parse_double(c[17])};
          rep.n_f = parse_integer<std::size_t>(c[19]);
          rep.batch_size = parse_integer<std::size_t>(c[20]);
        }
        m.errors = rep;
      }
      m.p = optional_cell(c[21]);
      m.p_star = optional_cell(c[22]);
      m.message = c[23];
      ms.push_back(std::move(m));
    } catch (const std::exception& e) {
      throw std::invalid_argument("measurements CSV line " + std::to_string(i + 1) + ": " +
                                  e.what());
    }
  }
  return ms;
}

std::vector<Measurement> read_measurements_csv(const std::filesystem::path& path) {
  return parse_measurements_csv(read_text(path));
}

std::string tau_report_json(std::span<const Measurement> ms, Grouping g) {
  ordered_json entries = ordered_json::array();
  for (auto perf : kAllPerfKeys) {
    for (auto err : kAllErrorKeys) {
      const auto gt = grouped_tau(ms, err, perf, g);
      ordered_json summaries = ordered_json::array();
      for (const auto& s : gt.summaries) {
        ordered_json taus = ordered_json::array(), pairs = ordered_json::array(),
                     slices = ordered_json::array();
        for (double t : s.per_run_taus) taus.push_back(number_or_null(t));
        for (const auto& p : s.per_run_pairs) pairs.push_back(pairs_json(p));
        for (const auto& sl : s.slices)
          slices.push_back({{"run", sl.run},
                            {"slice", sl.slice},
                            {"count", sl.count},
                            {"tau", number_or_null(sl.tau)},
                            {"pairs", pairs_json(sl.pairs)}});
        summaries.push_back({{"label", s.label},
                             {"mean_tau", number_or_null(s.mean_tau)},
                             {"std_tau", number_or_null(s.std_tau)},
                             {"runs", s.runs},
                             {"per_run_taus", taus},
                             {"per_run_pairs", pairs},
                             {"slices", slices}});
      }
      ordered_json skipped = ordered_json::array();
      for (const auto& sk : gt.skipped)
        skipped.push_back({{"run", sk.run}, {"slice", sk.slice}, {"count", sk.count}});
      entries.push_back({{"error", std::string(to_string(err))},
                         {"performance", std::string(to_string(perf))},
                         {"summaries", summaries},
                         {"skipped", skipped}});
    }
  }
  ordered_json doc{{"grouping", std::string(to_string(g))}, {"entries", entries}};
  return doc.dump(2) + "\n";
}

void emit_reports(std::span<const Measurement> ms, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
  write_text(dir / "measurements.csv", measurements_csv(ms));
  for (auto g : kAllGroupings)
    write_text(dir / ("tau_" + std::string(to_string(g)) + ".json"), tau_report_json(ms, g));
  write_text(dir / "scatter_by_layer.csv", scatter_csv(ms));
}

IngestResult ingest_performance(std::vector<Measurement>& ms, const std::string& csv_text) {
  IngestResult result;
  const auto lines = lines_of(csv_text);
  if (lines.empty()) throw std::invalid_argument("performance CSV: missing header");
  const auto header = split(lines.front());
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* req : {"layer_id", "method", "retained_fraction", "seed"})
    if (!col.count(req))
      throw std::invalid_argument(std::string("performance CSV: missing column '") + req + "'");
  const bool has_p = col.count("p"), has_ps = col.count("p_star");
  if (!has_p && !has_ps)
    throw std::invalid_argument("performance CSV: needs a 'p' or 'p_star' column");

  std::map<Key, std::size_t> index;
  for (std::size_t i = 0; i < ms.size(); ++i) index.emplace(key_of(ms[i].hypothesis), i);

  std::map<Key, std::size_t> seen;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string where = "performance CSV line " + std::to_string(li + 1) + ": ";
    const auto c = split(lines[li]);
    if (c.size() != header.size()) {
      result.diagnostics.push_back(where + "wrong number of columns");
      continue;
    }
    Key key;
    std::optional<double> p, ps;
    try {
      key = {c[col["layer_id"]], parse_method(c[col["method"]]),
             parse_double(c[col["retained_fraction"]]),
             parse_integer<std::uint64_t>(c[col["seed"]])};
      if (has_p) p = optional_cell(c[col["p"]]);
      if (has_ps) ps = optional_cell(c[col["p_star"]]);
      for (const auto& v : {p, ps})
        if (v && !(*v >= 0.0 && *v <= 1.0))
          throw std::invalid_argument("performance value outside [0, 1]");
    } catch (const std::exception& e) {
      result.diagnostics.push_back(where + "unparseable row: " + e.what());
      continue;
    }
    const std::string label = std::get<0>(key) + "/" + std::string(to_string(std::get<1>(key))) +
                              "/" + format_double(std::get<2>(key)) + "/" +
                              std::to_string(std::get<3>(key));
    if (auto [it, fresh] = seen.emplace(key, li + 1); !fresh) {
      result.diagnostics.push_back(where + "duplicate key " + label + " (first on line " +
                                   std::to_string(it->second) + ")");
      continue;
    }
    const auto hit = index.find(key);
    if (hit == index.end()) {
      result.diagnostics.push_back(where + "unknown hypothesis " + label);
      continue;
    }
    auto& m = ms[hit->second];
    if (p) m.p = p;
    if (ps) m.p_star = ps;
    ++result.merged;
  }
  return result;
}

IngestResult ingest_performance_file(std::vector<Measurement>& ms,
                                     const std::filesystem::path& path) {
  return ingest_performance(ms, read_text(path));
}

}  // namespace tdc
