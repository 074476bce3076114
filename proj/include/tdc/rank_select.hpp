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

#include <cstddef>
#include <vector>

#include "tdc/decomp.hpp"
#include "tdc/tensor.hpp"

namespace tdc {

/// Concrete ranks for a method at a parameter budget.
struct RankSpec {
  Method method = Method::cp;
  std::vector<std::size_t> ranks;  // {R}, {R1,R2,R3,R4} or {R1,R2,R3}
  double retained_fraction = 1.0;
  std::size_t budget_params = 0;
  std::size_t achieved_params = 0;
};

/// Nearest integer, halves rounded away from zero.
long long round_half_away(double v);

/// R = round(f·CHWT / (C+H+W+T)), at least 1.
RankSpec solve_cp_rank(const Shape& shape, double retained_fraction);

/// Spatial ranks fixed at (H, W); R1 = round(x·C), R4 = round(x·T) with x the
/// positive root of x²·CTHW + x·(C² + T²) = f·CHWT, clamped to [1, mode size].
/// f = 1 keeps every mode at full size.
RankSpec solve_tucker_ranks(const Shape& shape, double retained_fraction);

/// Ranks R_i = clamp(round(x·d_i), 1, M_i) along the direction
/// d = (C/(H+W), 1, W), M = tt_max_ranks(shape). The boundary rank grows
/// fastest and the last rank tracks W·R2, so the cheap boundary cores saturate
/// first. x is chosen so the achieved count is the closest attainable to the
/// budget (ties go to the smaller count). f = 1 returns M.
RankSpec solve_tt_ranks(const Shape& shape, double retained_fraction);

RankSpec solve_ranks(Method method, const Shape& shape, double retained_fraction);

std::size_t param_count(const RankSpec& spec, const Shape& shape);

}  // namespace tdc
