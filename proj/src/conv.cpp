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

#include "tdc/conv.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tdc {

std::size_t conv_output_size(std::size_t in, std::size_t kernel, std::size_t stride,
                             std::size_t pad) {
  if (stride == 0) throw std::invalid_argument("conv: stride must be >= 1");
  if (in + 2 * pad < kernel) {
    throw std::invalid_argument("conv: kernel " + std::to_string(kernel) +
                                " larger than padded input " + std::to_string(in + 2 * pad));
  }
  return (in + 2 * pad - kernel) / stride + 1;
}

namespace {

// Output positions o with 0 <= o*stride + k - pad < in.
std::pair<std::size_t, std::size_t> valid_range(std::size_t out, std::size_t in, std::size_t k,
                                                std::size_t stride, std::size_t pad) {
  // lo = ceil((pad - k) / stride) clipped at 0
  std::size_t lo = 0;
  if (pad > k) lo = (pad - k + stride - 1) / stride;
  // hi: largest o with o*stride + k - pad <= in - 1
  const long long limit = static_cast<long long>(in) - 1 + static_cast<long long>(pad) -
                          static_cast<long long>(k);
  if (limit < 0) return {0, 0};
  const std::size_t hi = std::min(out, static_cast<std::size_t>(limit) / stride + 1);
  return {std::min(lo, hi), hi};
}

}  // namespace

DenseTensor conv2d_forward(const DenseTensor& input, const DenseTensor& weight,
                           const ConvParams& p, const std::optional<DenseTensor>& bias) {
  if (input.ndim() != 3) throw std::invalid_argument("conv2d: input must be C×H×W");
  if (weight.ndim() != 4) throw std::invalid_argument("conv2d: weight must be C×kh×kw×T");
  const std::size_t C = input.dim(0), Hin = input.dim(1), Win = input.dim(2);
  const std::size_t Cg = weight.dim(0), KH = weight.dim(1), KW = weight.dim(2), T = weight.dim(3);
  const std::size_t G = p.groups;
  if (G == 0 || C % G != 0 || T % G != 0 || Cg * G != C) {
    throw std::invalid_argument("conv2d: input has " + std::to_string(C) +
                                " channels but weight expects " + std::to_string(Cg) + "×" +
                                std::to_string(G) + " groups");
  }
  if (bias && bias->size() != T) throw std::invalid_argument("conv2d: bias length != out channels");
  const std::size_t Hout = conv_output_size(Hin, KH, p.stride_h, p.pad_h);
  const std::size_t Wout = conv_output_size(Win, KW, p.stride_w, p.pad_w);
  const std::size_t Tg = T / G;

  DenseTensor out({T, Hout, Wout});
  auto dst = out.data();
  const auto src = input.data();
  const auto wt = weight.data();
  for (std::size_t t = 0; t < T; ++t) {
    double* o = dst.data() + t * Hout * Wout;
    if (bias) std::fill(o, o + Hout * Wout, (*bias)[t]);
    const std::size_t g = t / Tg;
    for (std::size_t cl = 0; cl < Cg; ++cl) {
      const std::size_t c = g * Cg + cl;
      const double* in_c = src.data() + c * Hin * Win;
      for (std::size_t ky = 0; ky < KH; ++ky) {
        const auto [oy0, oy1] = valid_range(Hout, Hin, ky, p.stride_h, p.pad_h);
        for (std::size_t kx = 0; kx < KW; ++kx) {
          const double w = wt[((cl * KH + ky) * KW + kx) * T + t];
          if (w == 0.0) continue;
          const auto [ox0, ox1] = valid_range(Wout, Win, kx, p.stride_w, p.pad_w);
          for (std::size_t oy = oy0; oy < oy1; ++oy) {
            const double* in_row = in_c + (oy * p.stride_h + ky - p.pad_h) * Win;
            double* o_row = o + oy * Wout;
            if (p.stride_w == 1) {
              for (std::size_t ox = ox0; ox < ox1; ++ox) o_row[ox] += w * in_row[ox + kx - p.pad_w];
            } else {
              for (std::size_t ox = ox0; ox < ox1; ++ox)
                o_row[ox] += w * in_row[ox * p.stride_w + kx - p.pad_w];
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace tdc
