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

#include "tdc/decomp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tdc/linalg.hpp"
#include "tdc/random.hpp"

namespace tdc {

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::cp: return "cp";
    case Method::tucker: return "tucker";
    case Method::tt: return "tt";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "cp") return Method::cp;
  if (lower == "tucker") return Method::tucker;
  if (lower == "tt" || lower == "tensor_train" || lower == "tensortrain") return Method::tt;
  throw std::invalid_argument("unknown decomposition method '" + std::string(s) + "'");
}

namespace {

void require_4way(const DenseTensor& w, const char* who) {
  if (w.ndim() != 4) {
    throw std::invalid_argument(std::string(who) + ": expects a 4-way (C,H,W,T) tensor, got " +
                                std::to_string(w.ndim()) + " modes");
  }
}

bool all_finite(const Matrix& m) {
  return std::all_of(m.data().begin(), m.data().end(), [](double v) { return std::isfinite(v); });
}

// Khatri-Rao product of the factors other than `skip`, rows enumerating the
// remaining modes in ascending order with the last varying fastest (matches unfold).
// Row (c·H + y)·W + x of the result is C[c,:] ∘ Y[y,:] ∘ X[x,:].
Matrix khatri_rao3(const Matrix& a, const Matrix& b, const Matrix& c, std::size_t rank) {
  Matrix kr(a.rows() * b.rows() * c.rows(), rank);
  std::size_t row = 0;
  std::vector<double> ab(rank);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) {
      for (std::size_t r = 0; r < rank; ++r) ab[r] = a(i, r) * b(j, r);
      for (std::size_t l = 0; l < c.rows(); ++l, ++row) {
        auto out = kr.row(row);
        auto cr = c.row(l);
        for (std::size_t r = 0; r < rank; ++r) out[r] = ab[r] * cr[r];
      }
    }
  return kr;
}

// MTTKRP for mode n in {0, 1, 2} from z[(c·H + y)·W + x, r] = Σ_t W[c,y,x,t]·T[t,r].
Matrix mttkrp_from_z(const Matrix& z, const std::array<Matrix, 4>& f, std::size_t n,
                     const Shape& s, std::size_t rank) {
  Matrix out(s[n], rank);
  for (std::size_t c = 0; c < s[0]; ++c)
    for (std::size_t y = 0; y < s[1]; ++y)
      for (std::size_t x = 0; x < s[2]; ++x) {
        const std::size_t idx[3] = {c, y, x};
        const double* zr = z.row((c * s[1] + y) * s[2] + x).data();
        std::size_t o[2];
        std::size_t k = 0;
        for (std::size_t m = 0; m < 3; ++m)
          if (m != n) o[k++] = m;
        const double* p = f[o[0]].row(idx[o[0]]).data();
        const double* q = f[o[1]].row(idx[o[1]]).data();
        double* dst = out.row(idx[n]).data();
        for (std::size_t r = 0; r < rank; ++r) dst[r] += zr[r] * p[r] * q[r];
      }
  return out;
}

double hadamard_sum(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

// SVD of the mode unfolding, used for the leading left singular vectors.
SvdResult mode_svd(const DenseTensor& w, std::size_t mode) { return svd(unfold(w, mode)); }

// Leading `r` left singular vectors, zero-padded if fewer exist.
Matrix leading_left(const SvdResult& f, std::size_t r) {
  Matrix u(f.u.rows(), r);
  const std::size_t k = std::min(r, f.u.cols());
  for (std::size_t i = 0; i < f.u.rows(); ++i)
    for (std::size_t j = 0; j < k; ++j) u(i, j) = f.u(i, j);
  return u;
}

double tail_sq(const std::vector<double>& s, std::size_t keep) {
  double t = 0.0;
  for (std::size_t k = keep; k < s.size(); ++k) t += s[k] * s[k];
  return t;
}

}  // namespace

Shape CpFactorization::shape() const {
  return {factors[0].rows(), factors[1].rows(), factors[2].rows(), factors[3].rows()};
}

Shape TuckerFactorization::shape() const {
  return {factor_c.rows(), core.dim(1), core.dim(2), factor_t.rows()};
}

Shape TtFactorization::shape() const {
  return {first.rows(), middle1.dim(1), middle2.dim(1), last.cols()};
}

Method method_of(const Factorization& f) noexcept {
  return static_cast<Method>(f.index());
}

const FitInfo& fit_info(const Factorization& f) noexcept {
  return std::visit([](const auto& x) -> const FitInfo& { return x.info; }, f);
}

std::vector<std::size_t> ranks_of(const Factorization& f) {
  if (auto* cp = std::get_if<CpFactorization>(&f)) return {cp->rank};
  if (auto* tk = std::get_if<TuckerFactorization>(&f))
    return {tk->ranks.begin(), tk->ranks.end()};
  const auto& tt = std::get<TtFactorization>(f);
  return {tt.ranks.begin(), tt.ranks.end()};
}

Shape shape_of(const Factorization& f) {
  return std::visit([](const auto& x) { return x.shape(); }, f);
}

std::array<Matrix, 4> cp_initial_factors(const Shape& shape, std::size_t rank, std::uint64_t seed) {
  CounterRng rng(seed);
  std::array<Matrix, 4> f;
  for (std::size_t m = 0; m < 4; ++m) {
    f[m] = Matrix(shape[m], rank);
    for (auto& v : f[m].data()) v = rng.uniform();
  }
  return f;
}

CpFactorization cp_als(const DenseTensor& w, std::size_t rank, std::uint64_t seed,
                       const CpOptions& opts) {
  require_4way(w, "cp_als");
  if (rank < 1) throw std::invalid_argument("cp_als: rank must be >= 1");

  CpFactorization out;
  out.rank = rank;
  out.factors = cp_initial_factors(w.shape(), rank, seed);
  out.info.seed = seed;

  const double norm_w = frobenius_norm(w);
  const double norm_w_sq = norm_w * norm_w;
  const Shape& shape = w.shape();
  // W viewed as a (C·H·W) × T matrix: its row-major storage unchanged.
  const Matrix wmat(shape[0] * shape[1] * shape[2], shape[3], std::vector<double>(w.values()));
  std::array<Matrix, 4> gram;
  for (std::size_t m = 0; m < 4; ++m) gram[m] = matmul_tn(out.factors[m], out.factors[m]);

  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < opts.max_iters; ++it) {
    Matrix v;
    Matrix mttkrp;
    const Matrix z = matmul(wmat, out.factors[3]);
    for (std::size_t n = 0; n < 4; ++n) {
      v = Matrix(rank, rank, 1.0);
      for (std::size_t m = 0; m < 4; ++m) {
        if (m == n) continue;
        for (std::size_t i = 0; i < v.size(); ++i) v.data()[i] *= gram[m].data()[i];
      }
      if (n < 3) {
        mttkrp = mttkrp_from_z(z, out.factors, n, shape, rank);
      } else {
        mttkrp = matmul_tn(wmat, khatri_rao3(out.factors[0], out.factors[1], out.factors[2], rank));
      }
      out.factors[n] = solve_gram_system(v, mttkrp);
      if (!all_finite(out.factors[n])) {
        throw std::runtime_error("cp_als: iterates became non-finite at sweep " +
                                 std::to_string(it + 1));
      }
      gram[n] = matmul_tn(out.factors[n], out.factors[n]);
    }
    // ‖W − Ŵ‖² = ‖W‖² − 2⟨W, Ŵ⟩ + ‖Ŵ‖², reusing the last sweep's products.
    const double inner = hadamard_sum(mttkrp, out.factors[3]);
    const double approx_sq = hadamard_sum(v, gram[3]);
    const double resid_sq = std::max(0.0, norm_w_sq - 2.0 * inner + approx_sq);
    const double rel = norm_w > 0.0 ? std::sqrt(resid_sq) / norm_w : std::sqrt(resid_sq);
    if (!std::isfinite(rel)) throw std::runtime_error("cp_als: objective became non-finite");
    out.error_history.push_back(rel);
    out.info.iterations_run = it + 1;
    if (prev - rel < opts.tol * prev || rel <= 1e-15) break;
    prev = rel;
  }

  const DenseTensor approx = reconstruct(out);
  const double resid = frobenius_norm(w - approx);
  out.info.final_relative_error = norm_w > 0.0 ? resid / norm_w : resid;
  return out;
}

TuckerFactorization tucker_hosvd(const DenseTensor& w, const std::array<std::size_t, 4>& ranks) {
  require_4way(w, "tucker_hosvd");
  for (std::size_t m = 0; m < 4; ++m) {
    if (ranks[m] < 1 || ranks[m] > w.dim(m)) {
      throw std::invalid_argument("tucker_hosvd: rank " + std::to_string(ranks[m]) + " for mode " +
                                  std::to_string(m) + " must lie in [1, " +
                                  std::to_string(w.dim(m)) + "]");
    }
  }
  TuckerFactorization out;
  out.ranks = ranks;
  std::array<Matrix, 4> u;
  for (std::size_t m = 0; m < 4; ++m) {
    const auto f = mode_svd(w, m);
    u[m] = leading_left(f, ranks[m]);
    out.discarded_sq[m] = tail_sq(f.s, ranks[m]);
  }
  DenseTensor g = w;
  for (std::size_t m = 0; m < 4; ++m) g = mode_n_product(g, u[m].transposed(), m);
  // Absorb the spatial factors into the core.
  DenseTensor h = mode_n_product(mode_n_product(g, u[1], 1), u[2], 2);
  out.core = std::move(h);
  out.factor_c = std::move(u[0]);
  out.factor_t = std::move(u[3]);
  out.info.iterations_run = 1;
  const double norm_w = frobenius_norm(w);
  const double resid = frobenius_norm(w - reconstruct(out));
  out.info.final_relative_error = norm_w > 0.0 ? resid / norm_w : resid;
  return out;
}

std::array<std::size_t, 3> tt_max_ranks(const Shape& s) {
  if (s.size() != 4) throw std::invalid_argument("tt_max_ranks: expects a 4-way shape");
  return {std::min(s[0], s[1] * s[2] * s[3]), std::min(s[0] * s[1], s[2] * s[3]),
          std::min(s[0] * s[1] * s[2], s[3])};
}

TtFactorization tt_svd(const DenseTensor& w, const std::array<std::size_t, 3>& ranks) {
  require_4way(w, "tt_svd");
  const auto maxr = tt_max_ranks(w.shape());
  for (std::size_t k = 0; k < 3; ++k) {
    if (ranks[k] < 1 || ranks[k] > maxr[k]) {
      throw std::invalid_argument("tt_svd: rank R" + std::to_string(k + 1) + " = " +
                                  std::to_string(ranks[k]) + " must lie in [1, " +
                                  std::to_string(maxr[k]) + "]");
    }
  }
  const std::size_t C = w.dim(0), H = w.dim(1), W = w.dim(2), T = w.dim(3);
  TtFactorization out;
  out.ranks = ranks;

  // Left-to-right sweep; `rest` carries diag(s)·vt of the previous split.
  std::size_t left = 1;
  Matrix rest(1, C * H * W * T, std::vector<double>(w.values()));
  const std::array<std::size_t, 3> mode_sizes{C, H, W};
  std::array<Matrix, 3> lefts;
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t rows = left * mode_sizes[k];
    const std::size_t cols = rest.size() / rows;
    Matrix unf(rows, cols, std::vector<double>(rest.values()));
    const auto f = svd(unf);
    const std::size_t r = ranks[k];
    lefts[k] = leading_left(f, r);
    out.truncation_sq[k] = tail_sq(f.s, r);
    Matrix next(r, cols);
    for (std::size_t i = 0; i < std::min(r, f.s.size()); ++i) {
      auto dst = next.row(i);
      auto src = f.vt.row(i);
      for (std::size_t j = 0; j < cols; ++j) dst[j] = f.s[i] * src[j];
    }
    rest = std::move(next);
    left = r;
  }
  out.first = std::move(lefts[0]);
  out.middle1 = DenseTensor({ranks[0], H, ranks[1]}, std::vector<double>(lefts[1].values()));
  out.middle2 = DenseTensor({ranks[1], W, ranks[2]}, std::vector<double>(lefts[2].values()));
  out.last = std::move(rest);
  out.info.iterations_run = 1;
  const double norm_w = frobenius_norm(w);
  const double resid = frobenius_norm(w - reconstruct(out));
  out.info.final_relative_error = norm_w > 0.0 ? resid / norm_w : resid;
  return out;
}

DenseTensor reconstruct(const CpFactorization& f) {
  const auto& [a, b, c, d] = f.factors;
  const std::size_t R = f.rank;
  // (C·H·W × R) Khatri-Rao times Tᵀ.
  Matrix kr(a.rows() * b.rows() * c.rows(), R);
  std::size_t row = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j)
      for (std::size_t l = 0; l < c.rows(); ++l, ++row) {
        auto out = kr.row(row);
        for (std::size_t r = 0; r < R; ++r) out[r] = a(i, r) * b(j, r) * c(l, r);
      }
  Matrix full = matmul_nt(kr, d);
  return DenseTensor(f.shape(), std::vector<double>(full.values()));
}

DenseTensor reconstruct(const TuckerFactorization& f) {
  return mode_n_product(mode_n_product(f.core, f.factor_c, 0), f.factor_t, 3);
}

DenseTensor reconstruct(const TtFactorization& f) {
  const std::size_t C = f.first.rows();
  const std::size_t H = f.middle1.dim(1);
  const std::size_t W = f.middle2.dim(1);
  const std::size_t T = f.last.cols();
  const auto [r1, r2, r3] = f.ranks;
  Matrix acc = matmul(f.first, Matrix(r1, H * r2, std::vector<double>(f.middle1.values())));
  acc = Matrix(C * H, r2, std::vector<double>(acc.values()));
  acc = matmul(acc, Matrix(r2, W * r3, std::vector<double>(f.middle2.values())));
  acc = Matrix(C * H * W, r3, std::vector<double>(acc.values()));
  acc = matmul(acc, f.last);
  return DenseTensor({C, H, W, T}, std::vector<double>(acc.values()));
}

DenseTensor reconstruct(const Factorization& f) {
  return std::visit([](const auto& x) { return reconstruct(x); }, f);
}

std::size_t cp_param_count(const Shape& s, std::size_t rank) {
  return rank * (s[0] + s[1] + s[2] + s[3]);
}

std::size_t tucker_param_count(const Shape& s, const std::array<std::size_t, 4>& r) {
  return r[0] * s[1] * s[2] * r[3] + s[0] * r[0] + s[3] * r[3];
}

std::size_t tt_param_count(const Shape& s, const std::array<std::size_t, 3>& r) {
  return s[0] * r[0] + r[0] * s[1] * r[1] + r[1] * s[2] * r[2] + r[2] * s[3];
}

std::size_t param_count(const CpFactorization& f) { return cp_param_count(f.shape(), f.rank); }
std::size_t param_count(const TuckerFactorization& f) {
  return tucker_param_count(f.shape(), f.ranks);
}
std::size_t param_count(const TtFactorization& f) { return tt_param_count(f.shape(), f.ranks); }
std::size_t param_count(const Factorization& f) {
  return std::visit([](const auto& x) { return param_count(x); }, f);
}

}  // namespace tdc
