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

#pragma once

#include <cstddef>
#include <span>

// Hot loops of the network. Every kernel has an OpenMP version (namespace
// kernels) and a plain serial twin (kernels::serial) with the same signature;
// the serial versions are the reference the parallel ones are tested and
// benchmarked against. Parallel kernels partition work so that every output
// element is produced by one fixed summation order, independent of the thread
// count.

namespace altk::nn::kernels {

// C[M,N] (+)= A[M,K] * B[K,N]
template <typename Real>
void MatMul(std::span<const Real> a, std::span<const Real> b, std::span<Real> c,
            std::size_t m, std::size_t k, std::size_t n, bool accumulate);

// C[K,N] (+)= A[M,K]^T * B[M,N]
template <typename Real>
void MatMulTransA(std::span<const Real> a, std::span<const Real> b,
                  std::span<Real> c, std::size_t m, std::size_t k,
                  std::size_t n, bool accumulate);

// C[M,K] (+)= A[M,N] * B[K,N]^T
template <typename Real>
void MatMulTransB(std::span<const Real> a, std::span<const Real> b,
                  std::span<Real> c, std::size_t m, std::size_t n,
                  std::size_t k, bool accumulate);

// x is [B,T,F,C]; col is [B*T*F, 9*C] holding the 3x3 (time x freq)
// neighbourhood of every position, zero outside the map. Column order is
// (dt, df, c) with dt, df in {-1,0,1}.
template <typename Real>
void Im2Col3x3(std::span<const Real> x, std::span<Real> col, std::size_t batch,
               std::size_t time, std::size_t freq, std::size_t channels);

// Adjoint of Im2Col3x3: dx[b,t,f,c] = sum of every col entry that copied it.
template <typename Real>
void Col2Im3x3(std::span<const Real> col, std::span<Real> dx,
               std::size_t batch, std::size_t time, std::size_t freq,
               std::size_t channels);

struct AttentionDims {
  std::size_t batch = 1;
  std::size_t time = 1;
  std::size_t heads = 1;
  std::size_t key_dim = 1;
  std::size_t value_dim = 1;
  std::size_t left = 0;
  std::size_t right = 0;
  std::size_t window() const { return left + right + 1; }
};

// q, k: [B,T,H*key_dim]; v: [B,T,H*value_dim]. Writes out [B,T,H*value_dim]
// and weights [B,H,T,L+R+1]; positions outside [0,T) get weight exactly 0.
template <typename Real>
void AttentionForward(const AttentionDims& d, std::span<const Real> q,
                      std::span<const Real> k, std::span<const Real> v,
                      std::span<Real> out, std::span<Real> weights);

// Overwrites dq, dk, dv.
template <typename Real>
void AttentionBackward(const AttentionDims& d, std::span<const Real> q,
                       std::span<const Real> k, std::span<const Real> v,
                       std::span<const Real> weights,
                       std::span<const Real> dout, std::span<Real> dq,
                       std::span<Real> dk, std::span<Real> dv);

namespace serial {

template <typename Real>
void MatMul(std::span<const Real> a, std::span<const Real> b, std::span<Real> c,
            std::size_t m, std::size_t k, std::size_t n, bool accumulate);
template <typename Real>
void MatMulTransA(std::span<const Real> a, std::span<const Real> b,
                  std::span<Real> c, std::size_t m, std::size_t k,
                  std::size_t n, bool accumulate);
template <typename Real>
void MatMulTransB(std::span<const Real> a, std::span<const Real> b,
                  std::span<Real> c, std::size_t m, std::size_t n,
                  std::size_t k, bool accumulate);
template <typename Real>
void Im2Col3x3(std::span<const Real> x, std::span<Real> col, std::size_t batch,
               std::size_t time, std::size_t freq, std::size_t channels);
template <typename Real>
void Col2Im3x3(std::span<const Real> col, std::span<Real> dx,
               std::size_t batch, std::size_t time, std::size_t freq,
               std::size_t channels);
template <typename Real>
void AttentionForward(const AttentionDims& d, std::span<const Real> q,
                      std::span<const Real> k, std::span<const Real> v,
                      std::span<Real> out, std::span<Real> weights);
template <typename Real>
void AttentionBackward(const AttentionDims& d, std::span<const Real> q,
                       std::span<const Real> k, std::span<const Real> v,
                       std::span<const Real> weights,
                       std::span<const Real> dout, std::span<Real> dq,
                       std::span<Real> dk, std::span<Real> dv);

}  // namespace serial

// Number of OpenMP threads used by the parallel kernels (--jobs).
void SetNumThreads(int n);
int NumThreads();

}  // namespace altk::nn::kernels
