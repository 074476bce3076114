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

#include <cstdlib>

#include "garipov_table.hpp"
#include "tdc/rank_select.hpp"

using namespace tdc;

TEST_CASE("round half away from zero") {
  CHECK(round_half_away(2.5) == 3);
  CHECK(round_half_away(2.4999) == 2);
  CHECK(round_half_away(-2.5) == -3);
  CHECK(round_half_away(0.0) == 0);
}

TEST_CASE("CP ranks") {
  CHECK(solve_cp_rank({64, 3, 3, 64}, 0.10).ranks == std::vector<std::size_t>{28});
  CHECK(solve_cp_rank({64, 3, 3, 64}, 0.50).ranks == std::vector<std::size_t>{138});
  CHECK(solve_cp_rank({128, 3, 3, 128}, 0.10).ranks == std::vector<std::size_t>{56});
  const auto s = solve_cp_rank({64, 3, 3, 64}, 0.10);
  CHECK(s.budget_params == 3686);
  CHECK(s.achieved_params == 3752);
  CHECK(s.method == Method::cp);
}

TEST_CASE("CP ranks on 1x1 layers") {
  for (auto [f, r] : std::vector<std::pair<double, std::size_t>>{
           {0.10, 8}, {0.25, 21}, {0.50, 42}, {0.75, 64}, {0.90, 76}})
    CHECK(solve_cp_rank({128, 1, 1, 256}, f).ranks.front() == r);
}

TEST_CASE("Tucker ranks") {
  const auto a = solve_tucker_ranks({64, 3, 3, 64}, 0.10).ranks;
  CHECK(a == std::vector<std::size_t>{14, 3, 3, 14});
  const auto b = solve_tucker_ranks({64, 3, 3, 64}, 0.90).ranks;
  CHECK(std::abs(static_cast<long>(b[0]) - 54) <= 1);
  CHECK(std::abs(static_cast<long>(b[3]) - 54) <= 1);
  CHECK(b[1] == 3);
  CHECK(b[2] == 3);
  CHECK(solve_tucker_ranks({64, 3, 3, 64}, 1.0).ranks == std::vector<std::size_t>{64, 3, 3, 64});
  // Asymmetric layer: output rank twice the input rank.
  CHECK(solve_tucker_ranks({64, 3, 3, 128}, 0.10).ranks == std::vector<std::size_t>{13, 3, 3, 26});
}

TEST_CASE("TT ranks") {
  const Shape s{64, 3, 3, 64};
  const auto half = solve_tt_ranks(s, 0.50);
  CHECK(std::abs(static_cast<double>(half.achieved_params) - 18432.0) <= 0.1 * 18432.0);
  CHECK(half.ranks[0] == 64);
  CHECK(half.ranks[2] == 64);
  const auto high = solve_tt_ranks(s, 0.90);
  CHECK(high.ranks[0] == 64);
  CHECK(high.ranks[2] == 64);
  // A retained fraction of one saturates every cap.
  const auto m = tt_max_ranks(s);
  CHECK(solve_tt_ranks(s, 1.0).ranks == std::vector<std::size_t>(m.begin(), m.end()));
  CHECK(solve_tt_ranks(s, 1.0).achieved_params == tt_param_count(s, m));
}

TEST_CASE("fractions outside (0, 1] are rejected") {
  for (double f : {0.0, -0.1, 1.5})
    for (auto m : {Method::cp, Method::tucker, Method::tt})
      CHECK_THROWS_AS(solve_ranks(m, {64, 3, 3, 64}, f), std::invalid_argument);
  CHECK_THROWS(solve_ranks(Method::cp, {64, 3, 3}, 0.5));
}

TEST_CASE("GaripovNet reference rank table") {
  for (const auto& layer : table::garipov()) {
    const auto& s = layer.shape;
    const auto caps = tt_max_ranks(s);
    for (const auto& row : layer.rows) {
      CAPTURE(layer.layer);
      CAPTURE(row.fraction);
      CHECK(solve_cp_rank(s, row.fraction).ranks.front() == row.cp);

      const auto tk = solve_tucker_ranks(s, row.fraction).ranks;
      CHECK(std::abs(static_cast<long>(tk[3]) - static_cast<long>(row.tucker[0])) <= 1);
      CHECK(std::abs(static_cast<long>(tk[0]) - static_cast<long>(row.tucker[1])) <= 1);

      const auto tt = solve_tt_ranks(s, row.fraction);
      const double budget = static_cast<double>(tt.budget_params);
      CHECK(std::abs(static_cast<double>(tt.achieved_params) - budget) <= 0.1 * budget);
      for (std::size_t i = 0; i < 3; ++i)
        CHECK((row.tt[i] == caps[i]) == (tt.ranks[i] == caps[i]));

      // Every configuration compresses.
      for (auto m : {Method::cp, Method::tucker, Method::tt})
        CHECK(solve_ranks(m, s, row.fraction).achieved_params < element_count(s));
    }
  }
}

TEST_CASE("param_count of a RankSpec matches the closed forms") {
  const Shape s{64, 3, 3, 128};
  for (auto m : {Method::cp, Method::tucker, Method::tt}) {
    const auto spec = solve_ranks(m, s, 0.25);
    CHECK(param_count(spec, s) == spec.achieved_params);
    CHECK(spec.budget_params == static_cast<std::size_t>(round_half_away(0.25 * 73728)));
  }
}
