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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "altk/nn/layers.hpp"

namespace altk::nn {

struct GradCheckOptions {
  double epsilon = 1e-5;
  // Denominator floor: error_i = |a - n| / max(|a|, |n|, abs_floor).
  double abs_floor = 1e-6;
  // Coordinates sampled per tensor (0 = all).
  std::size_t max_coords_per_tensor = 0;
  std::uint64_t seed = 1;
};

struct GradCheckResult {
  double max_rel_error = 0;
  std::size_t coords_checked = 0;
  std::string worst;  // "<tensor>[<index>]" of the largest error
};

double RelativeError(double analytic, double numeric, double abs_floor);

// Central differences of a scalar function against a supplied gradient, in
// 64-bit precision. `x` is perturbed in place and restored.
GradCheckResult CheckGradient(const std::function<double()>& loss,
                              std::span<double> x,
                              std::span<const double> analytic,
                              const std::string& name,
                              const GradCheckOptions& opts = {});

// Checks d/d(input) and d/d(every parameter) of L = sum(r * layer(x)) for a
// fixed random r. Uses `mode` for every forward pass.
GradCheckResult CheckLayerGradients(Layer<double>& layer, Tensor<double> x,
                                    Mode mode,
                                    const GradCheckOptions& opts = {});

}  // namespace altk::nn
