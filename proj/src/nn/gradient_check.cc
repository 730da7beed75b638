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

#include "altk/nn/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace altk::nn {
namespace {

std::vector<std::size_t> SampleCoords(std::size_t n, std::size_t max_coords,
                                      std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (max_coords == 0 || max_coords >= n) return idx;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(max_coords);
  std::sort(idx.begin(), idx.end());
  return idx;
}

void Merge(GradCheckResult& into, const GradCheckResult& from) {
  into.coords_checked += from.coords_checked;
  if (into.worst.empty() || from.max_rel_error > into.max_rel_error) {
    into.max_rel_error = from.max_rel_error;
    into.worst = from.worst;
  }
}

}  // namespace

double RelativeError(double analytic, double numeric, double abs_floor) {
  const double denom =
      std::max({std::abs(analytic), std::abs(numeric), abs_floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckResult CheckGradient(const std::function<double()>& loss,
                              std::span<double> x,
                              std::span<const double> analytic,
                              const std::string& name,
                              const GradCheckOptions& opts) {
  GradCheckResult res;
  std::mt19937_64 rng(opts.seed ^ std::hash<std::string>{}(name));
  for (std::size_t i : SampleCoords(x.size(), opts.max_coords_per_tensor, rng)) {
    const double saved = x[i];
    x[i] = saved + opts.epsilon;
    const double up = loss();
    x[i] = saved - opts.epsilon;
    const double down = loss();
    x[i] = saved;
    const double numeric = (up - down) / (2 * opts.epsilon);
    const double err = RelativeError(analytic[i], numeric, opts.abs_floor);
    ++res.coords_checked;
    if (err > res.max_rel_error || res.worst.empty()) {
      res.max_rel_error = std::max(res.max_rel_error, err);
      res.worst = name + "[" + std::to_string(i) + "]";
    }
  }
  return res;
}

GradCheckResult CheckLayerGradients(Layer<double>& layer, Tensor<double> x,
                                    Mode mode, const GradCheckOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  Tensor<double> y = layer.Forward(x, mode);
  Tensor<double> r(y.shape());
  for (auto& v : r.vec()) v = normal(rng);

  auto params = layer.Params();
  for (auto* p : params) p->ZeroGrad();
  layer.Forward(x, mode);
  Tensor<double> dx = layer.Backward(r);
  std::vector<Tensor<double>> analytic;
  for (auto* p : params) analytic.push_back(p->grad);

  auto loss = [&]() {
    Tensor<double> out = layer.Forward(x, mode);
    double s = 0;
    for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * r[i];
    return s;
  };

  GradCheckResult res =
      CheckGradient(loss, x.span(), dx.span(), "input", opts);
  for (std::size_t k = 0; k < params.size(); ++k)
    Merge(res, CheckGradient(loss, params[k]->value.span(), analytic[k].span(),
                             params[k]->name + "#" + std::to_string(k), opts));
  return res;
}

}  // namespace altk::nn
