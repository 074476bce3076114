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

#include "tdc/rank_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace tdc {

namespace {

void check_inputs(const Shape& shape, double f) {
  if (shape.size() != 4) throw std::invalid_argument("rank solver: expects a 4-way (C,H,W,T) shape");
  if (!(f > 0.0 && f <= 1.0)) {
    throw std::invalid_argument("rank solver: retained_fraction must lie in (0, 1], got " +
                                std::to_string(f));
  }
}

std::size_t clamp_rank(double v, std::size_t hi) {
  const long long r = round_half_away(v);
  return static_cast<std::size_t>(std::clamp<long long>(r, 1, static_cast<long long>(hi)));
}

RankSpec make_spec(Method m, const Shape& shape, double f) {
  RankSpec spec;
  spec.method = m;
  spec.retained_fraction = f;
  spec.budget_params =
      static_cast<std::size_t>(round_half_away(f * static_cast<double>(element_count(shape))));
  return spec;
}

}  // namespace

long long round_half_away(double v) { return std::llround(v); }

RankSpec solve_cp_rank(const Shape& shape, double f) {
  check_inputs(shape, f);
  auto spec = make_spec(Method::cp, shape, f);
  const double n = static_cast<double>(element_count(shape));
  const double per_rank = static_cast<double>(shape[0] + shape[1] + shape[2] + shape[3]);
  const auto r = std::max<long long>(1, round_half_away(f * n / per_rank));
  spec.ranks = {static_cast<std::size_t>(r)};
  spec.achieved_params = cp_param_count(shape, spec.ranks[0]);
  return spec;
}

RankSpec solve_tucker_ranks(const Shape& shape, double f) {
  check_inputs(shape, f);
  auto spec = make_spec(Method::tucker, shape, f);
  if (f == 1.0) {
    spec.ranks = shape;
    spec.achieved_params = tucker_param_count(shape, {shape[0], shape[1], shape[2], shape[3]});
    return spec;
  }
  const double C = static_cast<double>(shape[0]);
  const double H = static_cast<double>(shape[1]);
  const double W = static_cast<double>(shape[2]);
  const double T = static_cast<double>(shape[3]);
  const double a = C * T * H * W;
  const double b = C * C + T * T;
  const double c = -f * C * H * W * T;
  const double x = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
  std::array<std::size_t, 4> r{clamp_rank(x * C, shape[0]), shape[1], shape[2],
                               clamp_rank(x * T, shape[3])};
  spec.ranks = {r.begin(), r.end()};
  spec.achieved_params = tucker_param_count(shape, r);
  return spec;
}

RankSpec solve_tt_ranks(const Shape& shape, double f) {
  check_inputs(shape, f);
  auto spec = make_spec(Method::tt, shape, f);
  const auto maxr = tt_max_ranks(shape);
  if (f == 1.0) {
    spec.ranks = {maxr.begin(), maxr.end()};
    spec.achieved_params = tt_param_count(shape, maxr);
    return spec;
  }
  const std::array<double, 3> dir{
      static_cast<double>(shape[0]) / static_cast<double>(shape[1] + shape[2]), 1.0,
      static_cast<double>(shape[2])};
  auto ranks_at = [&](double x) {
    return std::array<std::size_t, 3>{clamp_rank(x * dir[0], maxr[0]),
                                      clamp_rank(x * dir[1], maxr[1]),
                                      clamp_rank(x * dir[2], maxr[2])};
  };
  // Every rank tuple reachable along the ray appears just past one of the
  // rounding thresholds (k + 1/2) / d_i.
  std::set<std::array<std::size_t, 3>> candidates{ranks_at(0.0)};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < maxr[i]; ++k) {
      const double x = (static_cast<double>(k) + 0.5) / dir[i];
      candidates.insert(ranks_at(x * (1.0 + 1e-12)));
    }
  const double budget = static_cast<double>(spec.budget_params);
  std::array<std::size_t, 3> best{};
  std::size_t best_params = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& r : candidates) {
    const std::size_t p = tt_param_count(shape, r);
    const double gap = std::fabs(static_cast<double>(p) - budget);
    if (gap < best_gap || (gap == best_gap && p < best_params)) {
      best = r;
      best_params = p;
      best_gap = gap;
    }
  }
  spec.ranks = {best.begin(), best.end()};
  spec.achieved_params = best_params;
  return spec;
}

RankSpec solve_ranks(Method method, const Shape& shape, double f) {
  switch (method) {
    case Method::cp: return solve_cp_rank(shape, f);
    case Method::tucker: return solve_tucker_ranks(shape, f);
    case Method::tt: return solve_tt_ranks(shape, f);
  }
  throw std::invalid_argument("solve_ranks: unknown method");
}

std::size_t param_count(const RankSpec& spec, const Shape& shape) {
  const auto& r = spec.ranks;
  switch (spec.method) {
    case Method::cp: return cp_param_count(shape, r.at(0));
    case Method::tucker: return tucker_param_count(shape, {r.at(0), r.at(1), r.at(2), r.at(3)});
    case Method::tt: return tt_param_count(shape, {r.at(0), r.at(1), r.at(2)});
  }
  return 0;
}

}  // namespace tdc
