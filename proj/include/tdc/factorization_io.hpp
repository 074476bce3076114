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

#include "tdc/decomp.hpp"

namespace tdc {

/// Writes one TDT1 file per factor plus `factorization.json`:
/// {method, shape, ranks, mode_order, seed, iterations_run,
///  final_relative_error, files}.
void save_factorization(const std::filesystem::path& dir, const Factorization& f,
                        DType dtype = DType::f64);

Factorization load_factorization(const std::filesystem::path& dir);

}  // namespace tdc
