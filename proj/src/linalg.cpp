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

#include "tdc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tdc {

namespace {

constexpr double kRankTolerance = 1e-12;

void require_finite(const Matrix& m, const char* who) {
  for (double v : m.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": non-finite input");
  }
}

// Four interleaved partial sums, combined in a fixed order.
double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

// Hestenes iteration on `cols` columns of length `len`, stored column-major in
// `a`. `v` (cols x cols, column-major) accumulates the rotations.
void jacobi_orthogonalize(std::vector<double>& a, std::vector<double>& v, std::size_t len,
                          std::size_t cols) {
  constexpr double eps = 1e-15;
  constexpr int max_sweeps = 80;
  std::vector<double> sq(cols);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    // Squared column norms, refreshed every sweep and updated per rotation.
    for (std::size_t i = 0; i < cols; ++i) sq[i] = dot(a.data() + i * len, a.data() + i * len, len);
    for (std::size_t i = 0; i + 1 < cols; ++i) {
      double* ai = a.data() + i * len;
      for (std::size_t j = i + 1; j < cols; ++j) {
        double* aj = a.data() + j * len;
        const double alpha = sq[i];
        const double beta = sq[j];
        const double gamma = dot(ai, aj, len);
        if (gamma == 0.0 || std::fabs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        sq[i] = std::max(0.0, alpha - t * gamma);
        sq[j] = beta + t * gamma;
        for (std::size_t k = 0; k < len; ++k) {
          const double x = ai[k];
          const double y = aj[k];
          ai[k] = c * x - s * y;
          aj[k] = s * x + c * y;
        }
        double* vi = v.data() + i * cols;
        double* vj = v.data() + j * cols;
        for (std::size_t k = 0; k < cols; ++k) {
          const double x = vi[k];
          const double y = vj[k];
          vi[k] = c * x - s * y;
          vj[k] = s * x + c * y;
        }
      }
    }
    if (!rotated) return;
  }
}

// Orthonormalises `col` against the first `count` columns of `basis`
// (column-major, length `len`). Returns the remaining norm.
double orthogonalize_against(std::vector<double>& col, const std::vector<double>& basis,
                             std::size_t len, std::size_t count) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t q = 0; q < count; ++q) {
      const double* b = basis.data() + q * len;
      const double p = dot(col.data(), b, len);
      for (std::size_t k = 0; k < len; ++k) col[k] -= p * b[k];
    }
  }
  const double n = std::sqrt(dot(col.data(), col.data(), len));
  if (n > 0.0)
    for (auto& x : col) x /= n;
  return n;
}

// SVD of a tall (len >= cols) matrix supplied column-major.
SvdResult tall_svd(std::vector<double> a, std::size_t len, std::size_t cols) {
  std::vector<double> v(cols * cols, 0.0);
  for (std::size_t i = 0; i < cols; ++i) v[i * cols + i] = 1.0;
  jacobi_orthogonalize(a, v, len, cols);

  std::vector<double> norms(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    const double* aj = a.data() + j * len;
    norms[j] = std::sqrt(dot(aj, aj, len));
  }
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  const double smax = cols ? norms[order[0]] : 0.0;
  const double tiny = smax * static_cast<double>(std::max(len, cols)) * 1e-15;

  // u column-major
  std::vector<double> u(len * cols, 0.0);
  SvdResult res;
  res.s.resize(cols);
  res.vt = Matrix(cols, cols);
  std::size_t next_basis = 0;
  for (std::size_t k = 0; k < cols; ++k) {
    const std::size_t j = order[k];
    std::vector<double> col(a.begin() + static_cast<std::ptrdiff_t>(j * len),
                            a.begin() + static_cast<std::ptrdiff_t>((j + 1) * len));
    double sv = norms[j];
    if (sv > tiny) {
      for (auto& x : col) x /= sv;
    } else {
      // Numerically null direction: complete the orthonormal basis.
      sv = norms[j];
      double n = sv > 0.0 ? orthogonalize_against(col, u, len, k) : 0.0;
      while (n < 0.5 && next_basis < len) {
        std::fill(col.begin(), col.end(), 0.0);
        col[next_basis++] = 1.0;
        n = orthogonalize_against(col, u, len, k);
      }
    }
    // Sign convention: largest-magnitude entry of each left vector >= 0.
    std::size_t arg = 0;
    for (std::size_t i = 1; i < len; ++i)
      if (std::fabs(col[i]) > std::fabs(col[arg])) arg = i;
    const double sign = col.empty() || col[arg] >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < len; ++i) u[k * len + i] = sign * col[i];
    const double* vj = v.data() + j * cols;
    for (std::size_t i = 0; i < cols; ++i) res.vt(k, i) = sign * vj[i];
    res.s[k] = sv;
  }
  res.u = Matrix(len, cols);
  for (std::size_t i = 0; i < len; ++i)
    for (std::size_t k = 0; k < cols; ++k) res.u(i, k) = u[k * len + i];
  return res;
}

// Largest-magnitude entry of each left singular vector made non-negative.
void apply_sign_convention(SvdResult& res) {
  for (std::size_t k = 0; k < res.s.size(); ++k) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < res.u.rows(); ++i)
      if (std::fabs(res.u(i, k)) > std::fabs(res.u(arg, k))) arg = i;
    if (res.u(arg, k) < 0.0) {
      for (std::size_t i = 0; i < res.u.rows(); ++i) res.u(i, k) = -res.u(i, k);
      for (std::size_t j = 0; j < res.vt.cols(); ++j) res.vt(k, j) = -res.vt(k, j);
    }
  }
}

// a[k:, c0:] -= 2·x·(xᵀ·a[k:, c0:]), traversing rows contiguously.
void apply_reflector(Matrix& a, const std::vector<double>& x, std::size_t k, std::size_t c0) {
  const std::size_t n = a.cols() - c0;
  std::vector<double> p(n, 0.0);
  for (std::size_t i = k; i < a.rows(); ++i) {
    const double xi = x[i - k];
    const double* row = a.row(i).data() + c0;
    for (std::size_t j = 0; j < n; ++j) p[j] += xi * row[j];
  }
  for (std::size_t i = k; i < a.rows(); ++i) {
    const double xi = 2.0 * x[i - k];
    double* row = a.row(i).data() + c0;
    for (std::size_t j = 0; j < n; ++j) row[j] -= xi * p[j];
  }
}

}  // namespace

Matrix SvdResult::reconstruct(std::size_t rank) const {
  rank = std::min(rank, s.size());
  Matrix out(u.rows(), vt.cols());
  for (std::size_t i = 0; i < u.rows(); ++i) {
    auto orow = out.row(i);
    for (std::size_t k = 0; k < rank; ++k) {
      const double w = u(i, k) * s[k];
      if (w == 0.0) continue;
      auto vrow = vt.row(k);
      for (std::size_t j = 0; j < orow.size(); ++j) orow[j] += w * vrow[j];
    }
  }
  return out;
}

SvdResult svd(const Matrix& m) {
  require_finite(m, "svd");
  if (m.rows() == 0 || m.cols() == 0) throw std::invalid_argument("svd: empty matrix");
  if (m.rows() >= 2 * m.cols() && m.cols() > 1) {
    // Very tall: m = q·r, then rotate the small square factor only.
    auto [q, r] = qr(m);
    auto inner = svd(r);
    inner.u = matmul(q, inner.u);
    apply_sign_convention(inner);
    return inner;
  }
  if (m.cols() >= 2 * m.rows() && m.rows() > 1) {
    auto t = svd(m.transposed());
    SvdResult res;
    res.s = std::move(t.s);
    res.u = t.vt.transposed();
    res.vt = t.u.transposed();
    apply_sign_convention(res);
    return res;
  }
  if (m.rows() >= m.cols()) {
    std::vector<double> a(m.rows() * m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) a[j * m.rows() + i] = m(i, j);
    return tall_svd(std::move(a), m.rows(), m.cols());
  }
  // Wide: factor mᵀ = u' s v'ᵀ, so m = v' s u'ᵀ. Rows of m are the columns of mᵀ.
  auto t = tall_svd(std::vector<double>(m.values()), m.cols(), m.rows());
  SvdResult res;
  res.s = std::move(t.s);
  res.u = t.vt.transposed();
  res.vt = t.u.transposed();
  apply_sign_convention(res);
  return res;
}

QrResult qr(const Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (rows < cols) throw std::invalid_argument("qr: expects rows >= cols");
  Matrix r = m;
  std::vector<std::vector<double>> reflectors(cols);
  for (std::size_t k = 0; k < cols; ++k) {
    std::vector<double> x(rows - k);
    for (std::size_t i = k; i < rows; ++i) x[i - k] = r(i, k);
    double norm = std::sqrt(dot(x.data(), x.data(), x.size()));
    if (norm == 0.0) continue;
    x[0] += std::copysign(norm, x[0]);
    const double vn = std::sqrt(dot(x.data(), x.data(), x.size()));
    for (auto& e : x) e /= vn;
    apply_reflector(r, x, k, k);
    reflectors[k] = std::move(x);
  }
  Matrix q(rows, cols);
  for (std::size_t j = 0; j < cols; ++j) q(j, j) = 1.0;
  for (std::size_t k = cols; k-- > 0;) {
    if (!reflectors[k].empty()) apply_reflector(q, reflectors[k], k, 0);
  }
  Matrix rr(cols, cols);
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = i; j < cols; ++j) rr(i, j) = r(i, j);
  return {std::move(q), std::move(rr)};
}

Matrix pseudo_inverse_solve(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("least squares: row count mismatch");
  require_finite(a, "least squares");
  require_finite(b, "least squares");
  const auto f = svd(a);
  const double cut = f.s.empty() ? 0.0 : f.s.front() * kRankTolerance;
  // x = V · diag(1/s) · Uᵀ · b
  Matrix utb = matmul_tn(f.u, b);  // k x nrhs
  for (std::size_t k = 0; k < f.s.size(); ++k) {
    const double inv = f.s[k] > cut ? 1.0 / f.s[k] : 0.0;
    for (auto& x : utb.row(k)) x *= inv;
  }
  return matmul_tn(f.vt, utb);
}

Matrix solve_least_squares(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("least squares: row count mismatch");
  require_finite(a, "least squares");
  require_finite(b, "least squares");
  if (a.rows() >= a.cols() && a.cols() > 0) {
    auto [q, r] = qr(a);
    double dmax = 0.0;
    for (std::size_t i = 0; i < r.rows(); ++i) dmax = std::max(dmax, std::fabs(r(i, i)));
    bool full_rank = dmax > 0.0;
    for (std::size_t i = 0; i < r.rows() && full_rank; ++i)
      full_rank = std::fabs(r(i, i)) > dmax * 1e-10;
    if (full_rank) {
      Matrix x = matmul_tn(q, b);
      // Back substitution, column by column of the right-hand side.
      for (std::size_t c = 0; c < x.cols(); ++c)
        for (std::size_t i = r.rows(); i-- > 0;) {
          double s = x(i, c);
          for (std::size_t j = i + 1; j < r.cols(); ++j) s -= r(i, j) * x(j, c);
          x(i, c) = s / r(i, i);
        }
      return x;
    }
  }
  return pseudo_inverse_solve(a, b);
}

Matrix solve_gram_system(const Matrix& gram, const Matrix& rhs) {
  const std::size_t n = gram.rows();
  if (gram.cols() != n || rhs.cols() != n)
    throw std::invalid_argument("solve_gram_system: dimension mismatch");
  require_finite(gram, "solve_gram_system");
  require_finite(rhs, "solve_gram_system");
  double dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) dmax = std::max(dmax, gram(i, i));
  // Upper factor gram = uᵀ·u by right-looking row updates.
  Matrix u = gram;
  bool ok = dmax > 0.0;
  for (std::size_t j = 0; j < n && ok; ++j) {
    const double d = u(j, j);
    if (!(d > dmax * kRankTolerance)) {
      ok = false;
      break;
    }
    const double ujj = std::sqrt(d);
    double* uj = u.row(j).data();
    uj[j] = ujj;
    for (std::size_t k = j + 1; k < n; ++k) uj[k] /= ujj;
    for (std::size_t i = j + 1; i < n; ++i) {
      const double f = uj[i];
      if (f == 0.0) continue;
      double* ui = u.row(i).data();
      for (std::size_t k = i; k < n; ++k) ui[k] -= f * uj[k];
    }
  }
  if (!ok) {
    // gram is symmetric, so x·gram = rhs  <=>  gram·xᵀ = rhsᵀ.
    return pseudo_inverse_solve(gram, rhs.transposed()).transposed();
  }
  // Solve uᵀ·y = rhsᵀ, then u·xᵀ = y, one row of right-hand sides at a time.
  Matrix y = rhs.transposed();
  const std::size_t m = y.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double* yi = y.row(i).data();
    const double inv = 1.0 / u(i, i);
    for (std::size_t c = 0; c < m; ++c) yi[c] *= inv;
    const double* ui = u.row(i).data();
    for (std::size_t k = i + 1; k < n; ++k) {
      const double f = ui[k];
      if (f == 0.0) continue;
      double* yk = y.row(k).data();
      for (std::size_t c = 0; c < m; ++c) yk[c] -= f * yi[c];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double* yi = y.row(i).data();
    const double* ui = u.row(i).data();
    for (std::size_t k = i + 1; k < n; ++k) {
      const double f = ui[k];
      if (f == 0.0) continue;
      const double* yk = y.row(k).data();
      for (std::size_t c = 0; c < m; ++c) yi[c] -= f * yk[c];
    }
    const double inv = 1.0 / ui[i];
    for (std::size_t c = 0; c < m; ++c) yi[c] *= inv;
  }
  return y.transposed();
}

}  // namespace tdc
