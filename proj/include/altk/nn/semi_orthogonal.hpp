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
#include <vector>

namespace altk::nn {

// One floating-scale semi-orthogonal step on a row-major rows x cols matrix
// A (rows <= cols):
//   P = A A^T,  s2 = tr(P P) / tr(P),  A <- A - (1 / (2 s2)) (P - s2 I) A.
// Throws std::invalid_argument for rows > cols or an all-zero A.
template <typename Real>
void SemiOrthogonalStep(std::span<Real> a, std::size_t rows, std::size_t cols);

template <typename Real>
std::vector<Real> SemiOrthogonalStepped(std::span<const Real> a,
                                        std::size_t rows, std::size_t cols) {
  std::vector<Real> out(a.begin(), a.end());
  SemiOrthogonalStep<Real>(out, rows, cols);
  return out;
}

// ||A A^T - s2 I||_F / ||s2 I||_F with s2 chosen as in SemiOrthogonalStep.
template <typename Real>
double SemiOrthogonalDeviation(std::span<const Real> a, std::size_t rows,
                               std::size_t cols);

}  // namespace altk::nn
