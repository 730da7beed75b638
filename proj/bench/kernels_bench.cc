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

// Parallel kernels vs. their serial references at training-sized shapes.
// Run with OMP_NUM_THREADS=N to see scaling.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "altk/nn/kernels.hpp"

namespace k = altk::nn::kernels;

namespace {

std::vector<float> Random(std::size_t n) {
  std::mt19937_64 rng(n);
  std::normal_distribution<float> d;
  std::vector<float> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Conv as GEMM: rows = B*T*F, k = 9*C_in, n = C_out.
template <bool kSerial>
void BM_ConvGemm(benchmark::State& state) {
  const std::size_t m = 16 * 140 * 40, kk = 9 * state.range(0),
                    n = state.range(1);
  auto a = Random(m * kk), b = Random(kk * n);
  std::vector<float> c(m * n);
  for (auto _ : state) {
    if constexpr (kSerial)
      k::serial::MatMul<float>(a, b, c, m, kk, n, false);
    else
      k::MatMul<float>(a, b, c, m, kk, n, false);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * m * kk * n);
}
BENCHMARK(BM_ConvGemm<false>)->Args({8, 16})->Args({16, 32})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvGemm<true>)->Args({8, 16})->Args({16, 32})->Unit(benchmark::kMillisecond);

template <bool kSerial>
void BM_WeightGrad(benchmark::State& state) {
  const std::size_t m = 16 * 140 * 40, kk = 9 * 16, n = 32;
  auto a = Random(m * kk), b = Random(m * n);
  std::vector<float> c(kk * n);
  for (auto _ : state) {
    if constexpr (kSerial)
      k::serial::MatMulTransA<float>(a, b, c, m, kk, n, false);
    else
      k::MatMulTransA<float>(a, b, c, m, kk, n, false);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * m * kk * n);
}
BENCHMARK(BM_WeightGrad<false>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WeightGrad<true>)->Unit(benchmark::kMillisecond);

template <bool kSerial>
void BM_Im2Col(benchmark::State& state) {
  const std::size_t B = 16, T = 140, F = 40, C = 8;
  auto x = Random(B * T * F * C);
  std::vector<float> col(B * T * F * 9 * C);
  for (auto _ : state) {
    if constexpr (kSerial)
      k::serial::Im2Col3x3<float>(x, col, B, T, F, C);
    else
      k::Im2Col3x3<float>(x, col, B, T, F, C);
    benchmark::DoNotOptimize(col.data());
  }
}
BENCHMARK(BM_Im2Col<false>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Im2Col<true>)->Unit(benchmark::kMillisecond);

template <bool kSerial>
void BM_Attention(benchmark::State& state) {
  k::AttentionDims d{16, 140, static_cast<std::size_t>(state.range(0)), 15, 10, 15, 6};
  auto q = Random(d.batch * d.time * d.heads * d.key_dim);
  auto kk = Random(q.size());
  auto v = Random(d.batch * d.time * d.heads * d.value_dim);
  std::vector<float> out(v.size()), w(d.batch * d.heads * d.time * d.window());
  std::vector<float> dq(q.size()), dk(q.size()), dv(v.size());
  for (auto _ : state) {
    if constexpr (kSerial) {
      k::serial::AttentionForward<float>(d, q, kk, v, out, w);
      k::serial::AttentionBackward<float>(d, q, kk, v, w, out, dq, dk, dv);
    } else {
      k::AttentionForward<float>(d, q, kk, v, out, w);
      k::AttentionBackward<float>(d, q, kk, v, w, out, dq, dk, dv);
    }
    benchmark::DoNotOptimize(dq.data());
  }
}
BENCHMARK(BM_Attention<false>)->Arg(4)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Attention<true>)->Arg(4)->Arg(15)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
