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

#include "tdc/matrix.hpp"

namespace tdc {

/// Thin SVD: m = u·diag(s)·vt with k = min(rows, cols) columns in u.
struct SvdResult {
  Matrix u;               // rows x k, orthonormal columns
  std::vector<double> s;  // k values, non-increasing, >= 0
  Matrix vt;              // k x cols, orthonormal rows

  /// u·diag(s)·vt truncated to the first `rank` triplets.
  Matrix reconstruct(std::size_t rank) const;
  Matrix reconstruct() const { return reconstruct(s.size()); }
};

/// One-sided Jacobi SVD. Deterministic; each left singular vector has its
/// largest-magnitude entry non-negative. Throws on non-finite input.
SvdResult svd(const Matrix& m);

/// Householder QR of a tall matrix (rows >= cols): m = q·r, q rows x cols.
struct QrResult {
  Matrix q;
  Matrix r;
};
QrResult qr(const Matrix& m);

/// argmin_X ‖a·X − b‖. Uses QR for full column rank and falls back to the
/// SVD pseudo-inverse (singular values below 1e-12·s_max dropped) otherwise.
Matrix solve_least_squares(const Matrix& a, const Matrix& b);

/// Minimum-norm solution via the SVD pseudo-inverse.
Matrix pseudo_inverse_solve(const Matrix& a, const Matrix& b);

/// Solves x·g = rhs row by row for symmetric positive semi-definite g
/// (the ALS normal equations). Cholesky when well posed, pseudo-inverse when
/// a pivot drops below 1e-12 of the largest diagonal entry.
Matrix solve_gram_system(const Matrix& gram, const Matrix& rhs);

}  // namespace tdc
