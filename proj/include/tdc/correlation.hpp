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
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdc/measurement.hpp"

namespace tdc {

struct PairCounts {
  std::size_t concordant = 0;
  std::size_t discordant = 0;
  std::size_t total = 0;  // m(m−1)/2, ties included

  bool operator==(const PairCounts&) const = default;
};

/// Exact O(m²) pair enumeration. A pair is concordant when both lists order
/// it the same way, discordant when they disagree; ties in either list count
/// as neither. Throws on length mismatch or fewer than two entries.
PairCounts kendall_counts(std::span<const double> a, std::span<const double> p);

/// Tau-a: 2(k − d) / (m(m − 1)).
double kendall_tau(std::span<const double> a, std::span<const double> p);
double tau_from_counts(const PairCounts& c) noexcept;

enum class Grouping { all, by_compression, layers_only, methods_only };
inline constexpr std::array<Grouping, 4> kAllGroupings{Grouping::all, Grouping::by_compression,
                                                       Grouping::layers_only,
                                                       Grouping::methods_only};
std::string_view to_string(Grouping g) noexcept;
Grouping parse_grouping(std::string_view s);

/// Tau of one slice of measurements within one run.
struct SliceTau {
  std::uint64_t run = 0;
  std::string slice;
  std::size_t count = 0;
  double tau = 0.0;
  PairCounts pairs;
};

struct SkippedSlice {
  std::uint64_t run = 0;
  std::string slice;
  std::size_t count = 0;
};

struct TauSummary {
  std::string label;
  double mean_tau = 0.0;
  double std_tau = 0.0;  // population std over runs
  std::vector<std::uint64_t> runs;
  std::vector<double> per_run_taus;
  std::vector<PairCounts> per_run_pairs;  // summed over the run's slices
  std::vector<SliceTau> slices;
};

struct GroupedTau {
  Grouping grouping = Grouping::all;
  ErrorKey error = ErrorKey::weight_relative;
  PerfKey perf = PerfKey::p;
  std::vector<TauSummary> summaries;
  std::vector<SkippedSlice> skipped;
};

/// Runs are identified by seed. Only successful measurements carrying both
/// values take part.
///  all             τ over every (layer, method, fraction) of a run
///  by_compression  τ over (layer, method) for each fraction, one summary per fraction
///  layers_only     τ over layers for each (method, fraction), averaged per run
///  methods_only    τ over methods for each (layer, fraction), averaged per run
/// Mean and std are then taken over runs. Slices with fewer than two
/// measurements are skipped and listed.
GroupedTau grouped_tau(std::span<const Measurement> ms, ErrorKey error, PerfKey perf,
                       Grouping grouping);

}  // namespace tdc
