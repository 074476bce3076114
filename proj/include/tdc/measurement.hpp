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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tdc/decomp.hpp"
#include "tdc/metrics.hpp"

namespace tdc {

/// One decomposition choice.
struct Hypothesis {
  std::string layer_id;
  Method method = Method::cp;
  double retained_fraction = 1.0;
  std::uint64_t seed = 0;
};

enum class ErrorKey {
  weight_absolute,
  weight_relative,
  weight_scaled,
  feature_absolute,
  feature_relative,
  feature_scaled
};
inline constexpr std::array<ErrorKey, 6> kAllErrorKeys{
    ErrorKey::weight_absolute,  ErrorKey::weight_relative,  ErrorKey::weight_scaled,
    ErrorKey::feature_absolute, ErrorKey::feature_relative, ErrorKey::feature_scaled};

enum class PerfKey { p, p_star };
inline constexpr std::array<PerfKey, 2> kAllPerfKeys{PerfKey::p, PerfKey::p_star};

std::string_view to_string(ErrorKey k) noexcept;
std::string_view to_string(PerfKey k) noexcept;
ErrorKey parse_error_key(std::string_view s);
PerfKey parse_perf_key(std::string_view s);

/// Outcome of one hypothesis.
struct Measurement {
  Hypothesis hypothesis;
  bool ok = true;
  std::string message;  // failure diagnostic when !ok
  bool replicated = false;

  std::vector<std::size_t> ranks;
  std::size_t budget_params = 0;
  std::size_t achieved_params = 0;
  std::size_t original_params = 0;
  std::size_t iterations_run = 0;
  std::optional<double> final_relative_error;

  std::optional<ErrorReport> errors;
  std::optional<double> p;
  std::optional<double> p_star;
};

std::optional<double> error_value(const Measurement& m, ErrorKey k);
std::optional<double> perf_value(const Measurement& m, PerfKey k);

}  // namespace tdc
