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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tdc/correlation.hpp"
#include "tdc/measurement.hpp"

namespace tdc {

/// Column order of measurements.csv; fixed.
const std::vector<std::string>& measurement_columns();
const std::vector<std::string>& scatter_columns();

std::string measurements_csv(std::span<const Measurement> ms);
std::string scatter_csv(std::span<const Measurement> ms);
std::vector<Measurement> parse_measurements_csv(const std::string& text);
std::vector<Measurement> read_measurements_csv(const std::filesystem::path& path);

/// JSON document for one grouping over every error/performance pair present.
std::string tau_report_json(std::span<const Measurement> ms, Grouping g);

/// Writes measurements.csv, tau_{all,by_compression,layers_only,
/// methods_only}.json and scatter_by_layer.csv into `dir`.
void emit_reports(std::span<const Measurement> ms, const std::filesystem::path& dir);

struct IngestResult {
  std::size_t merged = 0;
  std::vector<std::string> diagnostics;  // one per rejected row
};

/// Merges p and/or p_star columns keyed by (layer_id, method,
/// retained_fraction, seed). Unknown, duplicate or unparseable rows are
/// rejected with a diagnostic; all others are merged.
IngestResult ingest_performance(std::vector<Measurement>& ms, const std::string& csv_text);
IngestResult ingest_performance_file(std::vector<Measurement>& ms,
                                     const std::filesystem::path& path);

}  // namespace tdc
