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

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace altk::nn {

using Shape = std::vector<std::size_t>;

inline std::size_t NumElements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string ShapeString(const Shape& shape);

// Dense row-major array. Rank is dynamic; layers document the rank they
// expect ([B,T,D] for sequences, [B,T,F,C] for conv feature maps).
template <typename Real>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, Real fill = Real(0))
      : shape_(std::move(shape)), data_(NumElements(shape_), fill) {}
  Tensor(Shape shape, std::vector<Real> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != NumElements(shape_))
      throw std::invalid_argument("Tensor: data size " +
                                  std::to_string(data_.size()) +
                                  " does not match shape " +
                                  ShapeString(shape_));
  }

  const Shape& shape() const { return shape_; }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  Real* data() { return data_.data(); }
  const Real* data() const { return data_.data(); }
  std::span<Real> span() { return data_; }
  std::span<const Real> span() const { return data_; }
  std::vector<Real>& vec() { return data_; }
  const std::vector<Real>& vec() const { return data_; }

  Real& operator[](std::size_t i) { return data_[i]; }
  const Real& operator[](std::size_t i) const { return data_[i]; }

  // Last dimension; rows() * cols() == size().
  std::size_t cols() const { return shape_.empty() ? 0 : shape_.back(); }
  std::size_t rows() const { return cols() == 0 ? 0 : size() / cols(); }

  void Reshape(Shape shape) {
    if (NumElements(shape) != data_.size())
      throw std::invalid_argument("Tensor::Reshape: " + ShapeString(shape_) +
                                  " -> " + ShapeString(shape));
    shape_ = std::move(shape);
  }
  Tensor Reshaped(Shape shape) const {
    Tensor t = *this;
    t.Reshape(std::move(shape));
    return t;
  }

  void Fill(Real v) { std::fill(data_.begin(), data_.end(), v); }
  void SetZero() { Fill(Real(0)); }

  bool AllFinite() const {
    for (Real v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  template <typename Other>
  Tensor<Other> Cast() const {
    return Tensor<Other>(shape_, std::vector<Other>(data_.begin(), data_.end()));
  }

 private:
  Shape shape_;
  std::vector<Real> data_;
};

// Trainable array plus its gradient buffer. lr_scale scales the global
// learning rate for this parameter only.
template <typename Real>
struct Parameter {
  std::string name;
  Tensor<Real> value;
  Tensor<Real> grad;
  Real lr_scale = Real(1);

  Parameter() = default;
  Parameter(std::string n, Shape shape)
      : name(std::move(n)), value(shape), grad(std::move(shape)) {}

  void ZeroGrad() { grad.SetZero(); }
};

// Throws with the offending shapes when `ok` is false.
void CheckShape(bool ok, const std::string& where, const Shape& got,
                const Shape& expected);

// NaN hook: enabled in debug builds, or at runtime via SetNanChecks(true).
void SetNanChecks(bool enabled);
bool NanChecksEnabled();
template <typename Real>
void CheckFinite(const Tensor<Real>& t, const char* where);

}  // namespace altk::nn
