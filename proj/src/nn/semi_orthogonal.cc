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

#include "altk/nn/semi_orthogonal.hpp"

#include <cmath>
#include <stdexcept>

namespace altk::nn {
namespace {

// P = A A^T in double.
template <typename Real>
std::vector<double> Gram(std::span<const Real> a, std::size_t rows,
                         std::size_t cols) {
  std::vector<double> p(rows * rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = i; j < rows; ++j) {
      double s = 0;
      for (std::size_t c = 0; c < cols; ++c)
        s += static_cast<double>(a[i * cols + c]) * a[j * cols + c];
      p[i * rows + j] = p[j * rows + i] = s;
    }
  return p;
}

double FloatingScale(const std::vector<double>& p, std::size_t rows) {
  double trace_p = 0, trace_pp = 0;
  for (std::size_t i = 0; i < rows; ++i) trace_p += p[i * rows + i];
  for (double v : p) trace_pp += v * v;  // P symmetric: tr(PP) = ||P||_F^2
  if (trace_p <= 0) throw std::invalid_argument("semi-orthogonal: A is all zero");
  return trace_pp / trace_p;
}

void CheckDims(std::size_t rows, std::size_t cols) {
  if (rows == 0 || rows > cols)
    throw std::invalid_argument(
        "semi-orthogonal constraint needs 0 < rows <= cols");
}

}  // namespace

template <typename Real>
void SemiOrthogonalStep(std::span<Real> a, std::size_t rows, std::size_t cols) {
  CheckDims(rows, cols);
  std::vector<double> p = Gram<Real>(a, rows, cols);
  const double s2 = FloatingScale(p, rows);
  for (std::size_t i = 0; i < rows; ++i) p[i * rows + i] -= s2;
  const double rate = 1.0 / (2.0 * s2);
  std::vector<double> update(rows * cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < rows; ++k) {
      const double pik = p[i * rows + k];
      if (pik == 0) continue;
      for (std::size_t c = 0; c < cols; ++c)
        update[i * cols + c] += pik * a[k * cols + c];
    }
  for (std::size_t e = 0; e < rows * cols; ++e)
    a[e] = static_cast<Real>(a[e] - rate * update[e]);
}

template <typename Real>
double SemiOrthogonalDeviation(std::span<const Real> a, std::size_t rows,
                               std::size_t cols) {
  CheckDims(rows, cols);
  std::vector<double> p = Gram<Real>(a, rows, cols);
  const double s2 = FloatingScale(p, rows);
  double num = 0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < rows; ++j) {
      const double d = p[i * rows + j] - (i == j ? s2 : 0.0);
      num += d * d;
    }
  return std::sqrt(num) / (s2 * std::sqrt(static_cast<double>(rows)));
}

template void SemiOrthogonalStep<float>(std::span<float>, std::size_t,
                                        std::size_t);
template void SemiOrthogonalStep<double>(std::span<double>, std::size_t,
                                         std::size_t);
template double SemiOrthogonalDeviation<float>(std::span<const float>,
                                               std::size_t, std::size_t);
template double SemiOrthogonalDeviation<double>(std::span<const double>,
                                                std::size_t, std::size_t);

}  // namespace altk::nn
