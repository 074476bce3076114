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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tdc/convnet.hpp"
#include "tdc/decomp.hpp"
#include "tdc/measurement.hpp"

namespace tdc {

/// Study configuration (JSON). Relative paths resolve against the config
/// file's directory.
struct StudyConfig {
  std::filesystem::path model;
  std::optional<std::filesystem::path> dataset;
  std::vector<std::string> layers;  // empty: every decomposable layer
  std::vector<Method> methods{Method::cp, Method::tucker, Method::tt};
  std::vector<double> retained_fractions{0.1, 0.25, 0.5, 0.75, 0.9};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  bool weight_errors = true;
  bool feature_errors = false;
  std::size_t feature_batch_size = 256;
  bool evaluate = false;
  std::size_t eval_samples = 0;  // 0: whole dataset
  SubstitutionMode substitution = SubstitutionMode::reconstruct;
  CpOptions cp;
  std::optional<std::filesystem::path> performance_csv;
  std::filesystem::path output_dir = "study_out";
  std::size_t jobs = 1;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

StudyConfig load_study_config(const std::filesystem::path& path);
StudyConfig parse_study_config(const std::string& json_text, const std::filesystem::path& base);

struct StudyResult {
  std::vector<Measurement> measurements;  // canonical (layer, method, fraction, seed) order
  std::size_t failures = 0;
  std::vector<std::string> diagnostics;
};

/// Runs every hypothesis of the grid. Per-hypothesis failures are recorded
/// in the row (ok = false) and do not stop the study. CP is run per seed;
/// Tucker and TT are deterministic, computed once per (layer, fraction) and
/// copied to every seed with `replicated = true`.
StudyResult run_study(const StudyConfig& cfg);

/// run_study on an already loaded model and optional dataset.
StudyResult run_study(const StudyConfig& cfg, const ModelGraph& model, const Dataset* data);

}  // namespace tdc
