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
#include <variant>
#include <vector>

#include "tdc/matrix.hpp"
#include "tdc/tensor.hpp"

// Decompositions of 4-way convolution weights in (C, H, W, T) mode order:
// input channels, kernel height, kernel width, output channels.
namespace tdc {

enum class Method { cp, tucker, tt };

std::string_view to_string(Method m) noexcept;
/// Accepts "cp", "tucker", "tt" (case-insensitive; "tensor_train" also).
Method parse_method(std::string_view s);

/// How the factors were obtained.
struct FitInfo {
  std::optional<std::uint64_t> seed;
  std::size_t iterations_run = 0;
  double final_relative_error = 0.0;
};

/// Ŵ[c,y,x,t] = Σ_r C[c,r]·Y[y,r]·X[x,r]·T[t,r].
struct CpFactorization {
  std::size_t rank = 0;
  std::array<Matrix, 4> factors;  // C×R, H×R, W×R, T×R
  FitInfo info;
  /// Relative error after each full ALS sweep.
  std::vector<double> error_history;

  Shape shape() const;
};

/// Tucker in contracted-core form: Ŵ[c,y,x,t] = Σ H[r1,y,x,r4]·C[c,r1]·T[t,r4],
/// where H = G ×₂ Y ×₃ X absorbs the spatial factors.
struct TuckerFactorization {
  std::array<std::size_t, 4> ranks{};
  DenseTensor core;  // R1×H×W×R4
  Matrix factor_c;   // C×R1
  Matrix factor_t;   // T×R4
  FitInfo info;
  /// Per mode: sum of squared singular values not kept by the truncation.
  std::array<double, 4> discarded_sq{};

  Shape shape() const;
};

/// Ŵ[c,y,x,t] = Σ G1[c,r1]·G2[r1,y,r2]·G3[r2,x,r3]·G4[r3,t].
struct TtFactorization {
  std::array<std::size_t, 3> ranks{};
  Matrix first;        // C×R1
  DenseTensor middle1; // R1×H×R2
  DenseTensor middle2; // R2×W×R3
  Matrix last;         // R3×T
  FitInfo info;
  /// Squared singular values dropped at each of the three splits.
  std::array<double, 3> truncation_sq{};

  Shape shape() const;
};

using Factorization = std::variant<CpFactorization, TuckerFactorization, TtFactorization>;

Method method_of(const Factorization& f) noexcept;
const FitInfo& fit_info(const Factorization& f) noexcept;
/// Ranks as a flat list: {R}, {R1,R2,R3,R4} or {R1,R2,R3}.
std::vector<std::size_t> ranks_of(const Factorization& f);
Shape shape_of(const Factorization& f);

struct CpOptions {
  std::size_t max_iters = 500;
  double tol = 1e-8;
};

/// Plain ALS from a uniform [0,1) start drawn from CounterRng(seed), factors
/// filled in C, Y, X, T order. Throws std::runtime_error if iterates become
/// non-finite.
CpFactorization cp_als(const DenseTensor& w, std::size_t rank, std::uint64_t seed,
                       const CpOptions& opts = {});

/// Initial factors used by cp_als for a given seed.
std::array<Matrix, 4> cp_initial_factors(const Shape& shape, std::size_t rank, std::uint64_t seed);

TuckerFactorization tucker_hosvd(const DenseTensor& w, const std::array<std::size_t, 4>& ranks);

/// Largest admissible TT ranks: (min(C, HWT), min(CH, WT), min(CHW, T)).
std::array<std::size_t, 3> tt_max_ranks(const Shape& shape);

TtFactorization tt_svd(const DenseTensor& w, const std::array<std::size_t, 3>& ranks);

DenseTensor reconstruct(const CpFactorization& f);
DenseTensor reconstruct(const TuckerFactorization& f);
DenseTensor reconstruct(const TtFactorization& f);
DenseTensor reconstruct(const Factorization& f);

std::size_t param_count(const CpFactorization& f);
std::size_t param_count(const TuckerFactorization& f);
std::size_t param_count(const TtFactorization& f);
std::size_t param_count(const Factorization& f);

/// Closed forms of the parameter counts without building factors.
std::size_t cp_param_count(const Shape& shape, std::size_t rank);
std::size_t tucker_param_count(const Shape& shape, const std::array<std::size_t, 4>& ranks);
std::size_t tt_param_count(const Shape& shape, const std::array<std::size_t, 3>& ranks);

}  // namespace tdc
