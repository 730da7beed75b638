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

#include "altk/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace altk::nn {

template <typename Real>
Tensor<Real> LogSoftmax(const Tensor<Real>& logits) {
  Tensor<Real> out(logits.shape());
  const std::size_t K = logits.cols(), rows = logits.rows();
  for (std::size_t r = 0; r < rows; ++r) {
    const Real* in = logits.data() + r * K;
    const Real mx = *std::max_element(in, in + K);
    double z = 0;
    for (std::size_t k = 0; k < K; ++k) z += std::exp(static_cast<double>(in[k] - mx));
    const double lz = std::log(z) + mx;
    for (std::size_t k = 0; k < K; ++k)
      out[r * K + k] = static_cast<Real>(in[k] - lz);
  }
  return out;
}

template <typename Real>
XentResult<Real> LogSoftmaxXent(const Tensor<Real>& logits,
                                std::span<const std::int32_t> targets) {
  const std::size_t K = logits.cols(), rows = logits.rows();
  if (targets.size() != rows)
    throw std::invalid_argument("xent: " + std::to_string(targets.size()) +
                                " targets for " + std::to_string(rows) +
                                " frames");
  XentResult<Real> res;
  Tensor<Real> logp = LogSoftmax(logits);
  res.grad = Tensor<Real>(logits.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const std::int32_t y = targets[r];
    if (y < 0) continue;
    if (static_cast<std::size_t>(y) >= K)
      throw std::out_of_range("xent: target " + std::to_string(y) +
                              " out of range [0," + std::to_string(K) + ")");
    ++res.frames;
    res.loss -= logp[r * K + y];
  }
  if (res.frames == 0) return res;
  const double inv = 1.0 / static_cast<double>(res.frames);
  res.loss *= inv;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::int32_t y = targets[r];
    if (y < 0) continue;
    for (std::size_t k = 0; k < K; ++k) {
      const double p = std::exp(static_cast<double>(logp[r * K + k]));
      res.grad[r * K + k] =
          static_cast<Real>((p - (static_cast<std::int32_t>(k) == y ? 1.0 : 0.0)) * inv);
    }
  }
  return res;
}

template Tensor<float> LogSoftmax(const Tensor<float>&);
template Tensor<double> LogSoftmax(const Tensor<double>&);
template XentResult<float> LogSoftmaxXent(const Tensor<float>&,
                                          std::span<const std::int32_t>);
template XentResult<double> LogSoftmaxXent(const Tensor<double>&,
                                           std::span<const std::int32_t>);

}  // namespace altk::nn
