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

#include "tdc/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "tdc/format.hpp"

namespace tdc {

std::string_view to_string(ErrorKey k) noexcept {
  switch (k) {
    case ErrorKey::weight_absolute: return "weight_absolute";
    case ErrorKey::weight_relative: return "weight_relative";
    case ErrorKey::weight_scaled: return "weight_scaled";
    case ErrorKey::feature_absolute: return "feature_absolute";
    case ErrorKey::feature_relative: return "feature_relative";
    case ErrorKey::feature_scaled: return "feature_scaled";
  }
  return "?";
}

std::string_view to_string(PerfKey k) noexcept { return k == PerfKey::p ? "p" : "p_star"; }

ErrorKey parse_error_key(std::string_view s) {
  for (auto k : kAllErrorKeys)
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown error measure '" + std::string(s) + "'");
}

PerfKey parse_perf_key(std::string_view s) {
  for (auto k : kAllPerfKeys)
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown performance key '" + std::string(s) + "'");
}

std::optional<double> error_value(const Measurement& m, ErrorKey k) {
  if (!m.errors) return std::nullopt;
  const auto& e = *m.errors;
  switch (k) {
    case ErrorKey::weight_absolute: return e.weight.absolute;
    case ErrorKey::weight_relative: return e.weight.relative;
    case ErrorKey::weight_scaled: return e.weight.scaled;
    default: break;
  }
  if (!e.feature) return std::nullopt;
  switch (k) {
    case ErrorKey::feature_absolute: return e.feature->absolute;
    case ErrorKey::feature_relative: return e.feature->relative;
    case ErrorKey::feature_scaled: return e.feature->scaled;
    default: return std::nullopt;
  }
}

std::optional<double> perf_value(const Measurement& m, PerfKey k) {
  return k == PerfKey::p ? m.p : m.p_star;
}

namespace {
int sign(double v) noexcept { return (v > 0.0) - (v < 0.0); }
}  // namespace

PairCounts kendall_counts(std::span<const double> a, std::span<const double> p) {
  if (a.size() != p.size())
    throw std::invalid_argument("kendall_tau: lists differ in length (" + std::to_string(a.size()) +
                                " vs " + std::to_string(p.size()) + ")");
  if (a.size() < 2) throw std::invalid_argument("kendall_tau: needs at least two measurements");
  PairCounts c;
  const std::size_t m = a.size();
  c.total = m * (m - 1) / 2;
  for (std::size_t i = 0; i + 1 < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const int s = sign(a[i] - a[j]) * sign(p[i] - p[j]);
      if (s > 0)
        ++c.concordant;
      else if (s < 0)
        ++c.discordant;
    }
  return c;
}

double tau_from_counts(const PairCounts& c) noexcept {
  return (static_cast<double>(c.concordant) - static_cast<double>(c.discordant)) /
         static_cast<double>(c.total);
}

double kendall_tau(std::span<const double> a, std::span<const double> p) {
  return tau_from_counts(kendall_counts(a, p));
}

std::string_view to_string(Grouping g) noexcept {
  switch (g) {
    case Grouping::all: return "all";
    case Grouping::by_compression: return "by_compression";
    case Grouping::layers_only: return "layers_only";
    case Grouping::methods_only: return "methods_only";
  }
  return "?";
}

Grouping parse_grouping(std::string_view s) {
  for (auto g : kAllGroupings)
    if (to_string(g) == s) return g;
  throw std::invalid_argument("unknown grouping '" + std::string(s) + "'");
}

namespace {

struct Point {
  const Measurement* m;
  double error;
  double perf;
};

// Keeps keys in order of first appearance.
template <class Key>
class OrderedGroups {
 public:
  std::vector<Point>& at(const Key& k) {
    auto it = index_.find(k);
    if (it == index_.end()) {
      it = index_.emplace(k, keys_.size()).first;
      keys_.push_back(k);
      groups_.emplace_back();
    }
    return groups_[it->second];
  }
  const std::vector<Key>& keys() const { return keys_; }
  const std::vector<Point>& group(std::size_t i) const { return groups_[i]; }

 private:
  std::map<Key, std::size_t> index_;
  std::vector<Key> keys_;
  std::vector<std::vector<Point>> groups_;
};

void finish(TauSummary& s) {
  const double n = static_cast<double>(s.per_run_taus.size());
  if (s.per_run_taus.empty()) {
    s.mean_tau = std::numeric_limits<double>::quiet_NaN();
    s.std_tau = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double sum = 0.0;
  for (double t : s.per_run_taus) sum += t;
  s.mean_tau = sum / n;
  double ss = 0.0;
  for (double t : s.per_run_taus) ss += (t - s.mean_tau) * (t - s.mean_tau);
  s.std_tau = std::sqrt(ss / n);
}

// Tau of one slice, or nullopt (and a skip record) when it is too small.
std::optional<SliceTau> slice_tau(std::uint64_t run, std::string label,
                                  const std::vector<Point>& pts, GroupedTau& out) {
  if (pts.size() < 2) {
    out.skipped.push_back({run, std::move(label), pts.size()});
    return std::nullopt;
  }
  std::vector<double> a, p;
  for (const auto& pt : pts) {
    a.push_back(pt.error);
    p.push_back(pt.perf);
  }
  SliceTau st;
  st.run = run;
  st.slice = std::move(label);
  st.count = pts.size();
  st.pairs = kendall_counts(a, p);
  st.tau = tau_from_counts(st.pairs);
  return st;
}

}  // namespace

GroupedTau grouped_tau(std::span<const Measurement> ms, ErrorKey error, PerfKey perf,
                       Grouping grouping) {
  GroupedTau out;
  out.grouping = grouping;
  out.error = error;
  out.perf = perf;

  std::vector<Point> pts;
  std::vector<std::uint64_t> runs;
  std::vector<double> fractions;
  for (const auto& m : ms) {
    if (!m.ok) continue;
    const auto e = error_value(m, error);
    const auto p = perf_value(m, perf);
    if (!e || !p) continue;
    pts.push_back({&m, *e, *p});
    if (std::find(runs.begin(), runs.end(), m.hypothesis.seed) == runs.end())
      runs.push_back(m.hypothesis.seed);
    if (std::find(fractions.begin(), fractions.end(), m.hypothesis.retained_fraction) ==
        fractions.end())
      fractions.push_back(m.hypothesis.retained_fraction);
  }
  std::sort(runs.begin(), runs.end());

  auto by_run = [&](std::uint64_t run, auto&& pred) {
    std::vector<Point> sel;
    for (const auto& pt : pts)
      if (pt.m->hypothesis.seed == run && pred(*pt.m)) sel.push_back(pt);
    return sel;
  };

  if (grouping == Grouping::all || grouping == Grouping::by_compression) {
    std::vector<std::optional<double>> levels;
    if (grouping == Grouping::all)
      levels.push_back(std::nullopt);
    else
      for (double f : fractions) levels.push_back(f);
    for (const auto& level : levels) {
      TauSummary s;
      s.label = level ? "retained_fraction=" + format_double(*level) : "all";
      for (auto run : runs) {
        auto sel = by_run(run, [&](const Measurement& m) {
          return !level || m.hypothesis.retained_fraction == *level;
        });
        auto st = slice_tau(run, s.label, sel, out);
        if (!st) continue;
        s.runs.push_back(run);
        s.per_run_taus.push_back(st->tau);
        s.per_run_pairs.push_back(st->pairs);
        s.slices.push_back(std::move(*st));
      }
      finish(s);
      out.summaries.push_back(std::move(s));
    }
    return out;
  }

  // layers_only / methods_only: fixed (method, fraction) or (layer, fraction).
  TauSummary s;
  s.label = std::string(to_string(grouping));
  for (auto run : runs) {
    OrderedGroups<std::pair<std::string, double>> groups;
    for (const auto& pt : pts) {
      if (pt.m->hypothesis.seed != run) continue;
      const auto& h = pt.m->hypothesis;
      std::string fixed = grouping == Grouping::layers_only ? std::string(to_string(h.method))
                                                            : h.layer_id;
      groups.at({std::move(fixed), h.retained_fraction}).push_back(pt);
    }
    double sum = 0.0;
    std::size_t n = 0;
    PairCounts total;
    for (std::size_t g = 0; g < groups.keys().size(); ++g) {
      const auto& [fixed, f] = groups.keys()[g];
      const std::string label =
          (grouping == Grouping::layers_only ? "method=" : "layer=") + fixed +
          ",retained_fraction=" + format_double(f);
      auto st = slice_tau(run, label, groups.group(g), out);
      if (!st) continue;
      sum += st->tau;
      ++n;
      total.concordant += st->pairs.concordant;
      total.discordant += st->pairs.discordant;
      total.total += st->pairs.total;
      s.slices.push_back(std::move(*st));
    }
    if (n == 0) continue;
    s.runs.push_back(run);
    s.per_run_taus.push_back(sum / static_cast<double>(n));
    s.per_run_pairs.push_back(total);
  }
  finish(s);
  out.summaries.push_back(std::move(s));
  return out;
}

}  // namespace tdc
