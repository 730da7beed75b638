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

#include <cstdint>
#include <span>

#include "altk/nn/tensor.hpp"

namespace altk::nn {

template <typename Real>
struct XentResult {
  double loss = 0;          // mean -log p(target) over counted frames
  std::size_t frames = 0;   // frames with target >= 0
  Tensor<Real> grad;        // d loss / d logits
};

// Frame-level cross-entropy on logits [..., K]. A negative target masks that
// frame out of both loss and gradient. grad = (softmax - onehot) / frames.
// Throws std::out_of_range for a target >= K.
template <typename Real>
XentResult<Real> LogSoftmaxXent(const Tensor<Real>& logits,
                                std::span<const std::int32_t> targets);

// Row-wise log-softmax over the last axis.
template <typename Real>
Tensor<Real> LogSoftmax(const Tensor<Real>& logits);

}  // namespace altk::nn
