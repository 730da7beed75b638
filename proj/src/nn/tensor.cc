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

#include "altk/nn/tensor.hpp"

#include <atomic>
#include <sstream>

namespace altk::nn {

namespace {
#ifdef NDEBUG
std::atomic<bool> g_nan_checks{false};
#else
std::atomic<bool> g_nan_checks{true};
#endif
}  // namespace

std::string ShapeString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

void CheckShape(bool ok, const std::string& where, const Shape& got,
                const Shape& expected) {
  if (!ok)
    throw std::invalid_argument(where + ": shape mismatch, got " +
                                ShapeString(got) + ", expected " +
                                ShapeString(expected));
}

void SetNanChecks(bool enabled) { g_nan_checks = enabled; }
bool NanChecksEnabled() { return g_nan_checks; }

template <typename Real>
void CheckFinite(const Tensor<Real>& t, const char* where) {
  if (g_nan_checks && !t.AllFinite())
    throw std::runtime_error(std::string("non-finite values after ") + where);
}

template void CheckFinite(const Tensor<float>&, const char*);
template void CheckFinite(const Tensor<double>&, const char*);

}  // namespace altk::nn
