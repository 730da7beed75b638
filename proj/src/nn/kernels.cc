// Copyright 2026 The altk Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "altk/nn/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace altk::nn::kernels {

using Index = std::ptrdiff_t;

void SetNumThreads(int n) { omp_set_num_threads(std::max(1, n)); }
int NumThreads() { return omp_get_max_threads(); }

namespace {

// Rows [i0, i0+R) x columns [j0, j0+NT) of C = A B, accumulators in registers.
template <typename Real, int R, int NT>
inline void MatMulTile(const Real* __restrict a, const Real* __restrict b, Real* __restrict c,
                       std::size_t i0, std::size_t j0, std::size_t k, std::size_t n,
                       bool accumulate) {
  Real acc[R][NT];
  for (int r = 0; r < R; ++r)
    for (int j = 0; j < NT; ++j) acc[r][j] = accumulate ? c[(i0 + r) * n + j0 + j] : Real(0);
  for (std::size_t p = 0; p < k; ++p) {
    const Real* __restrict bp = b + p * n + j0;
    for (int r = 0; r < R; ++r) {
      const Real s = a[(i0 + r) * k + p];
#pragma omp simd
      for (int j = 0; j < NT; ++j) acc[r][j] += s * bp[j];
    }
  }
  for (int r = 0; r < R; ++r)
    for (int j = 0; j < NT; ++j) c[(i0 + r) * n + j0 + j] = acc[r][j];
}

// Same for a ragged column tail of width w < NT.
template <typename Real, int R>
inline void MatMulTail(const Real* __restrict a, const Real* __restrict b, Real* __restrict c,
                       std::size_t i0, std::size_t j0, std::size_t w, std::size_t k,
                       std::size_t n, bool accumulate) {
  for (int r = 0; r < R; ++r) {
    Real* row = c + (i0 + r) * n + j0;
    for (std::size_t j = 0; j < w; ++j) {
      Real sum = accumulate ? row[j] : Real(0);
      for (std::size_t p = 0; p < k; ++p) sum += a[(i0 + r) * k + p] * b[p * n + j0 + j];
      row[j] = sum;
    }
  }
}

template <typename Real, int R>
inline void MatMulRows(const Real* a, const Real* b, Real* c, std::size_t i0, std::size_t k,
                       std::size_t n, bool accumulate) {
  constexpr int kTile = 16;
  std::size_t j0 = 0;
  for (; j0 + kTile <= n; j0 += kTile)
    MatMulTile<Real, R, kTile>(a, b, c, i0, j0, k, n, accumulate);
  if (j0 + 8 <= n) {
    MatMulTile<Real, R, 8>(a, b, c, i0, j0, k, n, accumulate);
    j0 += 8;
  }
  if (j0 < n) MatMulTail<Real, R>(a, b, c, i0, j0, n - j0, k, n, accumulate);
}

}  // namespace

// Each output element is a single left-to-right sum over k, so the result
// does not depend on how rows are split across threads.
template <typename Real>
void MatMul(std::span<const Real> a, std::span<const Real> b, std::span<Real> c,
            std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
  constexpr std::size_t kRows = 4;
  const Index blocks = static_cast<Index>(m / kRows);
#pragma omp parallel for schedule(static)
  for (Index blk = 0; blk < blocks; ++blk)
    MatMulRows<Real, kRows>(a.data(), b.data(), c.data(), blk * kRows, k, n, accumulate);
  for (std::size_t i = blocks * kRows; i < m; ++i)
    MatMulRows<Real, 1>(a.data(), b.data(), c.data(), i, k, n, accumulate);
}

// Rows of A are reduced in fixed-size blocks whose count depends only on m,
// then the block partials are summed in block order. Inside a block, rows
// are consumed four at a time.
template <typename Real>
void MatMulTransA(std::span<const Real> a, std::span<const Real> b,
                  std::span<Real> c, std::size_t m, std::size_t k,
                  std::size_t n, bool accumulate) {
  constexpr std::size_t kMaxBlocks = 64;
  const std::size_t rows_per_block =
      std::max<std::size_t>(256, (m + kMaxBlocks - 1) / kMaxBlocks);
  const std::size_t num_blocks = (m + rows_per_block - 1) / rows_per_block;
  std::vector<Real> partial(num_blocks * k * n, Real(0));
  const Real* __restrict pa = a.data();
  const Real* __restrict pb = b.data();
#pragma omp parallel for schedule(static)
  for (Index blk = 0; blk < static_cast<Index>(num_blocks); ++blk) {
    Real* __restrict acc = partial.data() + blk * k * n;
    const std::size_t lo = blk * rows_per_block;
    const std::size_t hi = std::min(m, lo + rows_per_block);
    std::size_t i = lo;
    for (; i + 4 <= hi; i += 4) {
      const Real* a0 = pa + i * k;
      const Real* __restrict b0 = pb + i * n;
      const Real* __restrict b1 = b0 + n;
      const Real* __restrict b2 = b1 + n;
      const Real* __restrict b3 = b2 + n;
      for (std::size_t p = 0; p < k; ++p) {
        const Real s0 = a0[p], s1 = a0[k + p], s2 = a0[2 * k + p], s3 = a0[3 * k + p];
        Real* __restrict out = acc + p * n;
#pragma omp simd
        for (std::size_t j = 0; j < n; ++j)
          out[j] += s0 * b0[j] + s1 * b1[j] + s2 * b2[j] + s3 * b3[j];
      }
    }
    for (; i < hi; ++i) {
      const Real* arow = pa + i * k;
      const Real* __restrict brow = pb + i * n;
      for (std::size_t p = 0; p < k; ++p) {
        const Real s = arow[p];
        Real* __restrict out = acc + p * n;
#pragma omp simd
        for (std::size_t j = 0; j < n; ++j) out[j] += s * brow[j];
      }
    }
  }
  Real* pc = c.data();
  const Index total = static_cast<Index>(k * n);
#pragma omp parallel for schedule(static)
  for (Index e = 0; e < total; ++e) {
    Real sum = accumulate ? pc[e] : Real(0);
    for (std::size_t blk = 0; blk < num_blocks; ++blk)
      sum += partial[blk * k * n + e];
    pc[e] = sum;
  }
}

template <typename Real>
void MatMulTransB(std::span<const Real> a, std::span<const Real> b,
                  std::span<Real> c, std::size_t m, std::size_t n,
                  std::size_t k, bool accumulate) {
  // Transpose B once so the inner loop is the same axpy as MatMul.
  std::vector<Real> bt(n * k);
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t j = 0; j < n; ++j) bt[j * k + p] = b[p * n + j];
  MatMul<Real>(a, bt, c, m, n, k, accumulate);
}

template <typename Real>
void Im2Col3x3(std::span<const Real> x, std::span<Real> col, std::size_t batch,
               std::size_t time, std::size_t freq, std::size_t channels) {
  const Index positions = static_cast<Index>(batch * time * freq);
  const std::size_t width = 9 * channels;
#pragma omp parallel for schedule(static)
  for (Index pos = 0; pos < positions; ++pos) {
    const Index f = pos % freq;
    const Index t = (pos / freq) % time;
    const Index b = pos / (freq * time);
    Real* out = col.data() + pos * width;
    for (Index dt = -1; dt <= 1; ++dt) {
      for (Index df = -1; df <= 1; ++df) {
        const Index tt = t + dt, ff = f + df;
        if (tt < 0 || tt >= static_cast<Index>(time) || ff < 0 ||
            ff >= static_cast<Index>(freq)) {
          std::fill(out, out + channels, Real(0));
        } else {
          const Real* in = x.data() + ((b * time + tt) * freq + ff) * channels;
          std::copy(in, in + channels, out);
        }
        out += channels;
      }
    }
  }
}

template <typename Real>
void Col2Im3x3(std::span<const Real> col, std::span<Real> dx,
               std::size_t batch, std::size_t time, std::size_t freq,
               std::size_t channels) {
  const Index positions = static_cast<Index>(batch * time * freq);
  const std::size_t width = 9 * channels;
#pragma omp parallel for schedule(static)
  for (Index pos = 0; pos < positions; ++pos) {
    const Index f = pos % freq;
    const Index t = (pos / freq) % time;
    const Index b = pos / (freq * time);
    Real* out = dx.data() + pos * channels;
    std::fill(out, out + channels, Real(0));
    // Position (t,f) was copied into the column of every neighbour (t-dt,
    // f-df) at slot (dt,df).
    for (Index dt = -1; dt <= 1; ++dt) {
      for (Index df = -1; df <= 1; ++df) {
        const Index tt = t - dt, ff = f - df;
        if (tt < 0 || tt >= static_cast<Index>(time) || ff < 0 ||
            ff >= static_cast<Index>(freq))
          continue;
        const Index src_pos = (b * time + tt) * freq + ff;
        const Index slot = (dt + 1) * 3 + (df + 1);
        const Real* in = col.data() + src_pos * width + slot * channels;
        for (std::size_t c = 0; c < channels; ++c) out[c] += in[c];
      }
    }
  }
}

template <typename Real>
void AttentionForward(const AttentionDims& d, std::span<const Real> q,
                      std::span<const Real> k, std::span<const Real> v,
                      std::span<Real> out, std::span<Real> weights) {
  const std::size_t W = d.window(), T = d.time, H = d.heads;
  const std::size_t qk_stride = H * d.key_dim, v_stride = H * d.value_dim;
  const Real scale = Real(1) / std::sqrt(static_cast<Real>(d.key_dim));
  const Index total = static_cast<Index>(d.batch * H * T);
#pragma omp parallel for schedule(static)
  for (Index idx = 0; idx < total; ++idx) {
    const std::size_t t = idx % T;
    const std::size_t h = (idx / T) % H;
    const std::size_t b = idx / (T * H);
    Real* w = weights.data() + idx * W;
    const Real* qt = q.data() + (b * T + t) * qk_stride + h * d.key_dim;
    Real max_logit = -std::numeric_limits<Real>::infinity();
    for (std::size_t j = 0; j < W; ++j) {
      const Index s = static_cast<Index>(t + j) - static_cast<Index>(d.left);
      if (s < 0 || s >= static_cast<Index>(T)) {
        w[j] = -std::numeric_limits<Real>::infinity();
        continue;
      }
      const Real* ks = k.data() + (b * T + s) * qk_stride + h * d.key_dim;
      Real dot = 0;
      for (std::size_t e = 0; e < d.key_dim; ++e) dot += qt[e] * ks[e];
      w[j] = dot * scale;
      max_logit = std::max(max_logit, w[j]);
    }
    Real denom = 0;
    for (std::size_t j = 0; j < W; ++j) {
      w[j] = std::isinf(w[j]) ? Real(0) : std::exp(w[j] - max_logit);
      denom += w[j];
    }
    for (std::size_t j = 0; j < W; ++j) w[j] /= denom;
    Real* ot = out.data() + (b * T + t) * v_stride + h * d.value_dim;
    std::fill(ot, ot + d.value_dim, Real(0));
    for (std::size_t j = 0; j < W; ++j) {
      if (w[j] == Real(0)) continue;
      const std::size_t s = t + j - d.left;
      const Real* vs = v.data() + (b * T + s) * v_stride + h * d.value_dim;
      for (std::size_t e = 0; e < d.value_dim; ++e) ot[e] += w[j] * vs[e];
    }
  }
}

template <typename Real>
void AttentionBackward(const AttentionDims& d, std::span<const Real> q,
                       std::span<const Real> k, std::span<const Real> v,
                       std::span<const Real> weights,
                       std::span<const Real> dout, std::span<Real> dq,
                       std::span<Real> dk, std::span<Real> dv) {
  const std::size_t W = d.window(), T = d.time, H = d.heads;
  const std::size_t qk_stride = H * d.key_dim, v_stride = H * d.value_dim;
  const Real scale = Real(1) / std::sqrt(static_cast<Real>(d.key_dim));
  const Index total = static_cast<Index>(d.batch * H * T);
  std::vector<Real> dlogit(weights.size(), Real(0));

  auto in_range = [T](Index s) { return s >= 0 && s < static_cast<Index>(T); };

  // Pass 1, per query frame: logit gradients and dq.
#pragma omp parallel for schedule(static)
  for (Index idx = 0; idx < total; ++idx) {
    const std::size_t t = idx % T;
    const std::size_t h = (idx / T) % H;
    const std::size_t b = idx / (T * H);
    const Real* w = weights.data() + idx * W;
    Real* dl = dlogit.data() + idx * W;
    const Real* dot_ = dout.data() + (b * T + t) * v_stride + h * d.value_dim;
    Real weighted = 0;
    for (std::size_t j = 0; j < W; ++j) {
      const Index s = static_cast<Index>(t + j) - static_cast<Index>(d.left);
      if (!in_range(s)) continue;
      const Real* vs = v.data() + (b * T + s) * v_stride + h * d.value_dim;
      Real dw = 0;
      for (std::size_t e = 0; e < d.value_dim; ++e) dw += dot_[e] * vs[e];
      dl[j] = dw;
      weighted += w[j] * dw;
    }
    Real* dqt = dq.data() + (b * T + t) * qk_stride + h * d.key_dim;
    std::fill(dqt, dqt + d.key_dim, Real(0));
    for (std::size_t j = 0; j < W; ++j) {
      const Index s = static_cast<Index>(t + j) - static_cast<Index>(d.left);
      if (!in_range(s)) {
        dl[j] = 0;
        continue;
      }
      dl[j] = w[j] * (dl[j] - weighted);
      const Real* ks = k.data() + (b * T + s) * qk_stride + h * d.key_dim;
      for (std::size_t e = 0; e < d.key_dim; ++e)
        dqt[e] += scale * dl[j] * ks[e];
    }
  }

  // Pass 2, per key/value frame s: gather from every query t = s - offset.
#pragma omp parallel for schedule(static)
  for (Index idx = 0; idx < total; ++idx) {
    const std::size_t s = idx % T;
    const std::size_t h = (idx / T) % H;
    const std::size_t b = idx / (T * H);
    Real* dks = dk.data() + (b * T + s) * qk_stride + h * d.key_dim;
    Real* dvs = dv.data() + (b * T + s) * v_stride + h * d.value_dim;
    std::fill(dks, dks + d.key_dim, Real(0));
    std::fill(dvs, dvs + d.value_dim, Real(0));
    for (std::size_t j = 0; j < W; ++j) {
      const Index t = static_cast<Index>(s + d.left) - static_cast<Index>(j);
      if (!in_range(t)) continue;
      const std::size_t row = (b * H + h) * T + t;
      const Real wj = weights[row * W + j];
      const Real dl = dlogit[row * W + j];
      const Real* qt = q.data() + (b * T + t) * qk_stride + h * d.key_dim;
      const Real* dot_ = dout.data() + (b * T + t) * v_stride + h * d.value_dim;
      for (std::size_t e = 0; e < d.key_dim; ++e) dks[e] += scale * dl * qt[e];
      for (std::size_t e = 0; e < d.value_dim; ++e) dvs[e] += wj * dot_[e];
    }
  }
}

namespace serial {

template <typename Real>
void MatMul(std::span<const Real> a, std::span<const Real> b, std::span<Real> c,
            std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Real sum = accumulate ? c[i * n + j] : Real(0);
      for (std::size_t p = 0; p < k; ++p) sum += a[i * k + p] * b[p * n + j];
      c[i * n + j] = sum;
    }
}

template <typename Real>
void MatMulTransA(std::span<const Real> a, std::span<const Real> b,
                  std::span<Real> c, std::size_t m, std::size_t k,
                  std::size_t n, bool accumulate) {
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t j = 0; j < n; ++j) {
      Real sum = accumulate ? c[p * n + j] : Real(0);
      for (std::size_t i = 0; i < m; ++i) sum += a[i * k + p] * b[i * n + j];
      c[p * n + j] = sum;
    }
}

template <typename Real>
void MatMulTransB(std::span<const Real> a, std::span<const Real> b,
                  std::span<Real> c, std::size_t m, std::size_t n,
                  std::size_t k, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      Real sum = accumulate ? c[i * k + p] : Real(0);
      for (std::size_t j = 0; j < n; ++j) sum += a[i * n + j] * b[p * n + j];
      c[i * k + p] = sum;
    }
}

template <typename Real>
void Im2Col3x3(std::span<const Real> x, std::span<Real> col, std::size_t batch,
               std::size_t time, std::size_t freq, std::size_t channels) {
  const std::size_t width = 9 * channels;
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t < time; ++t)
      for (std::size_t f = 0; f < freq; ++f) {
        const std::size_t row = (b * time + t) * freq + f;
        for (int dt = -1; dt <= 1; ++dt)
          for (int df = -1; df <= 1; ++df)
            for (std::size_t c = 0; c < channels; ++c) {
              const long tt = static_cast<long>(t) + dt;
              const long ff = static_cast<long>(f) + df;
              const bool inside = tt >= 0 && tt < static_cast<long>(time) &&
                                  ff >= 0 && ff < static_cast<long>(freq);
              const std::size_t slot = (dt + 1) * 3 + (df + 1);
              col[row * width + slot * channels + c] =
                  inside ? x[((b * time + tt) * freq + ff) * channels + c]
                         : Real(0);
            }
      }
}

template <typename Real>
void Col2Im3x3(std::span<const Real> col, std::span<Real> dx,
               std::size_t batch, std::size_t time, std::size_t freq,
               std::size_t channels) {
  std::fill(dx.begin(), dx.end(), Real(0));
  const std::size_t width = 9 * channels;
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t < time; ++t)
      for (std::size_t f = 0; f < freq; ++f) {
        const std::size_t row = (b * time + t) * freq + f;
        for (int dt = -1; dt <= 1; ++dt)
          for (int df = -1; df <= 1; ++df) {
            const long tt = static_cast<long>(t) + dt;
            const long ff = static_cast<long>(f) + df;
            if (tt < 0 || tt >= static_cast<long>(time) || ff < 0 ||
                ff >= static_cast<long>(freq))
              continue;
            const std::size_t slot = (dt + 1) * 3 + (df + 1);
            for (std::size_t c = 0; c < channels; ++c)
              dx[((b * time + tt) * freq + ff) * channels + c] +=
                  col[row * width + slot * channels + c];
          }
      }
}

template <typename Real>
void AttentionForward(const AttentionDims& d, std::span<const Real> q,
                      std::span<const Real> k, std::span<const Real> v,
                      std::span<Real> out, std::span<Real> weights) {
  const std::size_t W = d.window(), T = d.time, H = d.heads;
  const std::size_t qk_stride = H * d.key_dim, v_stride = H * d.value_dim;
  const Real scale = Real(1) / std::sqrt(static_cast<Real>(d.key_dim));
  std::fill(out.begin(), out.end(), Real(0));
  for (std::size_t b = 0; b < d.batch; ++b)
    for (std::size_t h = 0; h < H; ++h)
      for (std::size_t t = 0; t < T; ++t) {
        std::vector<Real> logits(W);
        std::vector<bool> valid(W);
        for (std::size_t j = 0; j < W; ++j) {
          const long s = static_cast<long>(t + j) - static_cast<long>(d.left);
          valid[j] = s >= 0 && s < static_cast<long>(T);
          if (!valid[j]) continue;
          Real dot = 0;
          for (std::size_t e = 0; e < d.key_dim; ++e)
            dot += q[(b * T + t) * qk_stride + h * d.key_dim + e] *
                   k[(b * T + s) * qk_stride + h * d.key_dim + e];
          logits[j] = dot * scale;
        }
        Real mx = -std::numeric_limits<Real>::infinity();
        for (std::size_t j = 0; j < W; ++j)
          if (valid[j]) mx = std::max(mx, logits[j]);
        Real z = 0;
        for (std::size_t j = 0; j < W; ++j)
          if (valid[j]) z += std::exp(logits[j] - mx);
        for (std::size_t j = 0; j < W; ++j) {
          const Real w = valid[j] ? std::exp(logits[j] - mx) / z : Real(0);
          weights[((b * H + h) * T + t) * W + j] = w;
          if (!valid[j]) continue;
          const std::size_t s = t + j - d.left;
          for (std::size_t e = 0; e < d.value_dim; ++e)
            out[(b * T + t) * v_stride + h * d.value_dim + e] +=
                w * v[(b * T + s) * v_stride + h * d.value_dim + e];
        }
      }
}

template <typename Real>
void AttentionBackward(const AttentionDims& d, std::span<const Real> q,
                       std::span<const Real> k, std::span<const Real> v,
                       std::span<const Real> weights,
                       std::span<const Real> dout, std::span<Real> dq,
                       std::span<Real> dk, std::span<Real> dv) {
  const std::size_t W = d.window(), T = d.time, H = d.heads;
  const std::size_t qk_stride = H * d.key_dim, v_stride = H * d.value_dim;
  const Real scale = Real(1) / std::sqrt(static_cast<Real>(d.key_dim));
  std::fill(dq.begin(), dq.end(), Real(0));
  std::fill(dk.begin(), dk.end(), Real(0));
  std::fill(dv.begin(), dv.end(), Real(0));
  for (std::size_t b = 0; b < d.batch; ++b)
    for (std::size_t h = 0; h < H; ++h)
      for (std::size_t t = 0; t < T; ++t) {
        const std::size_t row = (b * H + h) * T + t;
        std::vector<Real> dw(W, Real(0));
        Real weighted = 0;
        for (std::size_t j = 0; j < W; ++j) {
          const long s = static_cast<long>(t + j) - static_cast<long>(d.left);
          if (s < 0 || s >= static_cast<long>(T)) continue;
          const Real w = weights[row * W + j];
          for (std::size_t e = 0; e < d.value_dim; ++e) {
            const Real g = dout[(b * T + t) * v_stride + h * d.value_dim + e];
            dw[j] += g * v[(b * T + s) * v_stride + h * d.value_dim + e];
            dv[(b * T + s) * v_stride + h * d.value_dim + e] += w * g;
          }
          weighted += w * dw[j];
        }
        for (std::size_t j = 0; j < W; ++j) {
          const long s = static_cast<long>(t + j) - static_cast<long>(d.left);
          if (s < 0 || s >= static_cast<long>(T)) continue;
          const Real dl = weights[row * W + j] * (dw[j] - weighted);
          for (std::size_t e = 0; e < d.key_dim; ++e) {
            dq[(b * T + t) * qk_stride + h * d.key_dim + e] +=
                scale * dl * k[(b * T + s) * qk_stride + h * d.key_dim + e];
            dk[(b * T + s) * qk_stride + h * d.key_dim + e] +=
                scale * dl * q[(b * T + t) * qk_stride + h * d.key_dim + e];
          }
        }
      }
}

}  // namespace serial

#define ALTK_INSTANTIATE_KERNELS(NS, Real)                                    \
  template void NS::MatMul<Real>(std::span<const Real>, std::span<const Real>, \
                                 std::span<Real>, std::size_t, std::size_t,    \
                                 std::size_t, bool);                           \
  template void NS::MatMulTransA<Real>(                                        \
      std::span<const Real>, std::span<const Real>, std::span<Real>,           \
      std::size_t, std::size_t, std::size_t, bool);                            \
  template void NS::MatMulTransB<Real>(                                        \
      std::span<const Real>, std::span<const Real>, std::span<Real>,           \
      std::size_t, std::size_t, std::size_t, bool);                            \
  template void NS::Im2Col3x3<Real>(std::span<const Real>, std::span<Real>,    \
                                    std::size_t, std::size_t, std::size_t,     \
                                    std::size_t);                              \
  template void NS::Col2Im3x3<Real>(std::span<const Real>, std::span<Real>,    \
                                    std::size_t, std::size_t, std::size_t,     \
                                    std::size_t);                              \
  template void NS::AttentionForward<Real>(                                    \
      const AttentionDims&, std::span<const Real>, std::span<const Real>,      \
      std::span<const Real>, std::span<Real>, std::span<Real>);                \
  template void NS::AttentionBackward<Real>(                                   \
      const AttentionDims&, std::span<const Real>, std::span<const Real>,      \
      std::span<const Real>, std::span<const Real>, std::span<const Real>,     \
      std::span<Real>, std::span<Real>, std::span<Real>);

namespace par = ::altk::nn::kernels;
namespace ser = ::altk::nn::kernels::serial;
}  // namespace altk::nn::kernels

namespace altk::nn::kernels {
ALTK_INSTANTIATE_KERNELS(par, float)
ALTK_INSTANTIATE_KERNELS(par, double)
ALTK_INSTANTIATE_KERNELS(ser, float)
ALTK_INSTANTIATE_KERNELS(ser, double)
}  // namespace altk::nn::kernels
