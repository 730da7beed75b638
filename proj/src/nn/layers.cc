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

#include "altk/nn/layers.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "altk/nn/semi_orthogonal.hpp"

namespace altk::nn {

using Index = std::ptrdiff_t;
using nlohmann::json;

template <typename Real>
void FanInUniform(Tensor<Real>& w, std::size_t fan_in, std::mt19937_64& rng) {
  const double bound = std::sqrt(3.0 / static_cast<double>(std::max<std::size_t>(1, fan_in)));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : w.vec()) v = static_cast<Real>(dist(rng));
}

// ---------------------------------------------------------------- affine

template <typename Real>
AffineLayer<Real>::AffineLayer(std::size_t in_dim, std::size_t out_dim,
                               bool bias)
    : in_dim_(in_dim),
      out_dim_(out_dim),
      has_bias_(bias),
      weight_("weight", {in_dim, out_dim}),
      bias_("bias", {bias ? out_dim : 0}) {
  if (in_dim == 0 || out_dim == 0)
    throw std::invalid_argument("affine: dimensions must be positive");
}

template <typename Real>
json AffineLayer<Real>::Config() const {
  return {{"type", Type()}, {"in", in_dim_}, {"out", out_dim_},
          {"bias", has_bias_}};
}

template <typename Real>
std::vector<Parameter<Real>*> AffineLayer<Real>::Params() {
  if (has_bias_) return {&weight_, &bias_};
  return {&weight_};
}

template <typename Real>
void AffineLayer<Real>::Init(std::mt19937_64& rng) {
  FanInUniform(weight_.value, in_dim_, rng);
  bias_.value.SetZero();
}

template <typename Real>
Tensor<Real> AffineLayer<Real>::Forward(const Tensor<Real>& x, Mode) {
  if (x.rank() == 0 || x.cols() != in_dim_)
    throw std::invalid_argument("affine: input last dim " +
                                std::to_string(x.cols()) + " != " +
                                std::to_string(in_dim_));
  input_ = x;
  Shape out_shape = x.shape();
  out_shape.back() = out_dim_;
  Tensor<Real> y(out_shape);
  const std::size_t rows = x.rows();
  kernels::MatMul<Real>(x.span(), weight_.value.span(), y.span(), rows, in_dim_,
                        out_dim_, false);
  if (has_bias_) {
    const Real* b = bias_.value.data();
#pragma omp parallel for schedule(static)
    for (Index r = 0; r < static_cast<Index>(rows); ++r)
      for (std::size_t j = 0; j < out_dim_; ++j) y[r * out_dim_ + j] += b[j];
  }
  return y;
}

template <typename Real>
Tensor<Real> AffineLayer<Real>::Backward(const Tensor<Real>& dy) {
  const std::size_t rows = input_.rows();
  CheckShape(dy.size() == rows * out_dim_, "affine backward", dy.shape(),
             {rows, out_dim_});
  kernels::MatMulTransA<Real>(input_.span(), dy.span(), weight_.grad.span(),
                              rows, in_dim_, out_dim_, true);
  if (has_bias_) {
    Real* gb = bias_.grad.data();
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < static_cast<Index>(out_dim_); ++j) {
      Real s = 0;
      for (std::size_t r = 0; r < rows; ++r) s += dy[r * out_dim_ + j];
      gb[j] += s;
    }
  }
  Tensor<Real> dx(input_.shape());
  kernels::MatMulTransB<Real>(dy.span(), weight_.value.span(), dx.span(), rows,
                              out_dim_, in_dim_, false);
  return dx;
}

// --------------------------------------------------------- speaker input

template <typename Real>
SpeakerInputLayer<Real>::SpeakerInputLayer(std::size_t feat_dim,
                                           std::size_t height)
    : feat_dim_(feat_dim), height_(height), affine_(feat_dim, height, true) {}

template <typename Real>
json SpeakerInputLayer<Real>::Config() const {
  return {{"type", Type()}, {"feat_dim", feat_dim_}, {"height", height_}};
}

template <typename Real>
Tensor<Real> SpeakerInputLayer<Real>::Forward(const Tensor<Real>& x, Mode mode) {
  if (x.rank() != 3 || x.dim(2) != 2 * feat_dim_)
    throw std::invalid_argument("speaker-input: expected [B,T," +
                                std::to_string(2 * feat_dim_) + "], got " +
                                ShapeString(x.shape()));
  in_shape_ = x.shape();
  const std::size_t rows = x.dim(0) * x.dim(1);
  // Row 2r of this view is the feature half of frame r, row 2r+1 the
  // embedding half.
  Tensor<Real> halves = x.Reshaped({rows * 2, feat_dim_});
  Tensor<Real> mapped = affine_.Forward(halves, mode);  // [rows*2, height]
  Tensor<Real> y({x.dim(0), x.dim(1), height_, 2});
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < static_cast<Index>(rows); ++r)
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t f = 0; f < height_; ++f)
        y[(r * height_ + f) * 2 + c] = mapped[(r * 2 + c) * height_ + f];
  return y;
}

template <typename Real>
Tensor<Real> SpeakerInputLayer<Real>::Backward(const Tensor<Real>& dy) {
  const std::size_t rows = in_shape_[0] * in_shape_[1];
  Tensor<Real> dmapped({rows * 2, height_});
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < static_cast<Index>(rows); ++r)
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t f = 0; f < height_; ++f)
        dmapped[(r * 2 + c) * height_ + f] = dy[(r * height_ + f) * 2 + c];
  Tensor<Real> dx = affine_.Backward(dmapped);
  dx.Reshape(in_shape_);
  return dx;
}

// ----------------------------------------------------------------- conv2d

namespace {

// Per-column sums of f(r, c) over all rows, reduced in fixed row blocks so
// the result does not depend on the thread count.
template <typename F>
std::vector<double> ColumnReduce(std::size_t rows, std::size_t dim, F f) {
  constexpr std::size_t kMaxBlocks = 64;
  const std::size_t per = std::max<std::size_t>(1024, (rows + kMaxBlocks - 1) / kMaxBlocks);
  const std::size_t blocks = (rows + per - 1) / per;
  std::vector<double> partial(blocks * dim, 0.0);
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < static_cast<Index>(blocks); ++b) {
    double* acc = partial.data() + b * dim;
    const std::size_t hi = std::min(rows, (b + 1) * per);
    for (std::size_t r = b * per; r < hi; ++r)
      for (std::size_t c = 0; c < dim; ++c) acc[c] += f(r, c);
  }
  std::vector<double> out(dim, 0.0);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t c = 0; c < dim; ++c) out[c] += partial[b * dim + c];
  return out;
}

}  // namespace

template <typename Real>
Conv2dLayer<Real>::Conv2dLayer(std::size_t height, std::size_t in_channels,
                               std::size_t out_channels)
    : height_(height),
      in_ch_(in_channels),
      out_ch_(out_channels),
      filters_("filters", {9 * in_channels, out_channels}),
      bias_("bias", {out_channels}) {
  if (height == 0 || in_channels == 0 || out_channels == 0)
    throw std::invalid_argument("conv2d: dimensions must be positive");
}

template <typename Real>
json Conv2dLayer<Real>::Config() const {
  return {{"type", Type()},
          {"height", height_},
          {"in_channels", in_ch_},
          {"out_channels", out_ch_}};
}

template <typename Real>
void Conv2dLayer<Real>::Init(std::mt19937_64& rng) {
  FanInUniform(filters_.value, 9 * in_ch_, rng);
  bias_.value.SetZero();
}

template <typename Real>
Tensor<Real> Conv2dLayer<Real>::Forward(const Tensor<Real>& x, Mode) {
  if (x.rank() != 4 || x.dim(2) != height_ || x.dim(3) != in_ch_)
    throw std::invalid_argument(
        "conv2d: expected [B,T," + std::to_string(height_) + "," +
        std::to_string(in_ch_) + "], got " + ShapeString(x.shape()));
  in_shape_ = x.shape();
  const std::size_t B = x.dim(0), T = x.dim(1), F = height_;
  const std::size_t rows = B * T * F;
  // Reuse the buffer across calls; Im2Col3x3 overwrites every entry.
  if (col_.size() == rows * 9 * in_ch_)
    col_.Reshape({rows, 9 * in_ch_});
  else
    col_ = Tensor<Real>({rows, 9 * in_ch_});
  kernels::Im2Col3x3<Real>(x.span(), col_.span(), B, T, F, in_ch_);
  Tensor<Real> y({B, T, F, out_ch_});
  kernels::MatMul<Real>(col_.span(), filters_.value.span(), y.span(), rows,
                        9 * in_ch_, out_ch_, false);
  const Real* b = bias_.value.data();
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < static_cast<Index>(rows); ++r)
    for (std::size_t c = 0; c < out_ch_; ++c) y[r * out_ch_ + c] += b[c];
  return y;
}

template <typename Real>
Tensor<Real> Conv2dLayer<Real>::Backward(const Tensor<Real>& dy) {
  const std::size_t B = in_shape_[0], T = in_shape_[1], F = height_;
  const std::size_t rows = B * T * F;
  CheckShape(dy.size() == rows * out_ch_, "conv2d backward", dy.shape(),
             {B, T, F, out_ch_});
  kernels::MatMulTransA<Real>(col_.span(), dy.span(), filters_.grad.span(),
                              rows, 9 * in_ch_, out_ch_, true);
  const Real* pdy = dy.data();
  const auto bias_sum = ColumnReduce(rows, out_ch_, [&](std::size_t r, std::size_t c) {
    return static_cast<double>(pdy[r * out_ch_ + c]);
  });
  for (std::size_t c = 0; c < out_ch_; ++c) bias_.grad[c] += static_cast<Real>(bias_sum[c]);
  if (dcol_.size() == rows * 9 * in_ch_)
    dcol_.Reshape({rows, 9 * in_ch_});
  else
    dcol_ = Tensor<Real>({rows, 9 * in_ch_});
  kernels::MatMulTransB<Real>(dy.span(), filters_.value.span(), dcol_.span(),
                              rows, out_ch_, 9 * in_ch_, false);
  Tensor<Real> dx(in_shape_);
  kernels::Col2Im3x3<Real>(dcol_.span(), dx.span(), B, T, F, in_ch_);
  return dx;
}

// ------------------------------------------------------------ max pooling

template <typename Real>
Tensor<Real> MaxPoolFreqLayer<Real>::Forward(const Tensor<Real>& x, Mode) {
  if (x.rank() != 4 || x.dim(2) % 2 != 0)
    throw std::invalid_argument("maxpool-freq: need [B,T,F,C] with even F, got " +
                                ShapeString(x.shape()));
  in_shape_ = x.shape();
  const std::size_t F = x.dim(2), C = x.dim(3), outer = x.dim(0) * x.dim(1);
  Tensor<Real> y({x.dim(0), x.dim(1), F / 2, C});
  argmax_.assign(y.size(), 0);
#pragma omp parallel for schedule(static)
  for (Index o = 0; o < static_cast<Index>(outer); ++o)
    for (std::size_t f = 0; f < F / 2; ++f)
      for (std::size_t c = 0; c < C; ++c) {
        const Real a = x[(o * F + 2 * f) * C + c];
        const Real b = x[(o * F + 2 * f + 1) * C + c];
        const std::size_t out = (o * (F / 2) + f) * C + c;
        y[out] = b > a ? b : a;
        argmax_[out] = b > a ? 1 : 0;
      }
  return y;
}

template <typename Real>
Tensor<Real> MaxPoolFreqLayer<Real>::Backward(const Tensor<Real>& dy) {
  Tensor<Real> dx(in_shape_);
  const std::size_t F = in_shape_[2], C = in_shape_[3];
  const std::size_t outer = in_shape_[0] * in_shape_[1];
#pragma omp parallel for schedule(static)
  for (Index o = 0; o < static_cast<Index>(outer); ++o)
    for (std::size_t f = 0; f < F / 2; ++f)
      for (std::size_t c = 0; c < C; ++c) {
        const std::size_t out = (o * (F / 2) + f) * C + c;
        dx[(o * F + 2 * f + argmax_[out]) * C + c] = dy[out];
      }
  return dx;
}

// ------------------------------------------------------------------- relu

template <typename Real>
Tensor<Real> ReluLayer<Real>::Forward(const Tensor<Real>& x, Mode) {
  output_ = x;
  double min_abs = std::numeric_limits<double>::infinity();
  for (auto& v : output_.vec()) {
    min_abs = std::min(min_abs, std::abs(static_cast<double>(v)));
    v = v > Real(0) ? v : Real(0);
  }
  min_abs_input_ = min_abs;
  return output_;
}

template <typename Real>
Tensor<Real> ReluLayer<Real>::Backward(const Tensor<Real>& dy) {
  Tensor<Real> dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (!(output_[i] > Real(0))) dx[i] = 0;
  return dx;
}

// -------------------------------------------------------------- batchnorm

template <typename Real>
BatchNormLayer<Real>::BatchNormLayer(std::size_t dim)
    : dim_(dim), running_mean_({dim}, Real(0)), running_var_({dim}, Real(1)) {}

template <typename Real>
json BatchNormLayer<Real>::Config() const {
  return {{"type", Type()}, {"dim", dim_}};
}


template <typename Real>
Tensor<Real> BatchNormLayer<Real>::Forward(const Tensor<Real>& x, Mode mode) {
  if (x.cols() != dim_)
    throw std::invalid_argument("batchnorm: last dim " +
                                std::to_string(x.cols()) + " != " +
                                std::to_string(dim_));
  last_mode_ = mode;
  const std::size_t rows = x.rows();
  std::vector<Real> mean(dim_), var(dim_);
  if (mode == Mode::kTrain) {
    if (rows == 0) throw std::invalid_argument("batchnorm: empty batch");
    const Real* px = x.data();
    const auto sum = ColumnReduce(rows, dim_, [&](std::size_t r, std::size_t c) {
      return static_cast<double>(px[r * dim_ + c]);
    });
    std::vector<double> m(dim_);
    for (std::size_t c = 0; c < dim_; ++c) m[c] = sum[c] / rows;
    const auto ss = ColumnReduce(rows, dim_, [&](std::size_t r, std::size_t c) {
      const double d = px[r * dim_ + c] - m[c];
      return d * d;
    });
    for (std::size_t c = 0; c < dim_; ++c) {
      mean[c] = static_cast<Real>(m[c]);
      var[c] = static_cast<Real>(ss[c] / rows);
      running_mean_[c] = static_cast<Real>(kMomentum * running_mean_[c] +
                                           (1 - kMomentum) * mean[c]);
      running_var_[c] = static_cast<Real>(kMomentum * running_var_[c] +
                                          (1 - kMomentum) * var[c]);
    }
  } else {
    mean = running_mean_.vec();
    var = running_var_.vec();
  }
  inv_std_.resize(dim_);
  for (std::size_t c = 0; c < dim_; ++c)
    inv_std_[c] = Real(1) / std::sqrt(var[c] + static_cast<Real>(kEpsilon));
  normalized_ = Tensor<Real>(x.shape());
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < static_cast<Index>(rows); ++r)
    for (std::size_t c = 0; c < dim_; ++c)
      normalized_[r * dim_ + c] = (x[r * dim_ + c] - mean[c]) * inv_std_[c];
  return normalized_;
}

template <typename Real>
Tensor<Real> BatchNormLayer<Real>::Backward(const Tensor<Real>& dy) {
  const std::size_t rows = normalized_.rows();
  Tensor<Real> dx(normalized_.shape());
  if (last_mode_ == Mode::kInference) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < dim_; ++c)
        dx[r * dim_ + c] = dy[r * dim_ + c] * inv_std_[c];
    return dx;
  }
  // dx = inv_std * (dy - mean(dy) - xhat * mean(dy * xhat))
  const Real* pd = dy.data();
  const Real* pn = normalized_.data();
  auto mean_dy = ColumnReduce(rows, dim_, [&](std::size_t r, std::size_t c) {
    return static_cast<double>(pd[r * dim_ + c]);
  });
  auto mean_dy_xhat = ColumnReduce(rows, dim_, [&](std::size_t r, std::size_t c) {
    return static_cast<double>(pd[r * dim_ + c]) * pn[r * dim_ + c];
  });
  for (std::size_t c = 0; c < dim_; ++c) {
    mean_dy[c] /= rows;
    mean_dy_xhat[c] /= rows;
  }
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < static_cast<Index>(rows); ++r)
    for (std::size_t c = 0; c < dim_; ++c)
      dx[r * dim_ + c] = static_cast<Real>(
          inv_std_[c] * (pd[r * dim_ + c] - mean_dy[c] - pn[r * dim_ + c] * mean_dy_xhat[c]));
  return dx;
}

// ---------------------------------------------------------------- dropout

template <typename Real>
DropoutLayer<Real>::DropoutLayer(double rate, std::uint64_t seed) : rng_(seed) {
  SetRate(rate);
}

template <typename Real>
void DropoutLayer<Real>::SetRate(double rate) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw std::invalid_argument("dropout: rate must be in [0, 1), got " +
                                std::to_string(rate));
  rate_ = rate;
}

template <typename Real>
json DropoutLayer<Real>::Config() const {
  return {{"type", Type()}, {"rate", rate_}};
}

template <typename Real>
Tensor<Real> DropoutLayer<Real>::Forward(const Tensor<Real>& x, Mode mode) {
  if (mode == Mode::kInference || rate_ == 0.0) {
    mask_.clear();
    return x;
  }
  std::bernoulli_distribution keep(1.0 - rate_);
  const Real scale = static_cast<Real>(1.0 / (1.0 - rate_));
  mask_.resize(x.size());
  Tensor<Real> y = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mask_[i] = keep(rng_) ? scale : Real(0);
    y[i] *= mask_[i];
  }
  return y;
}

template <typename Real>
Tensor<Real> DropoutLayer<Real>::Backward(const Tensor<Real>& dy) {
  if (mask_.empty()) return dy;
  Tensor<Real> dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= mask_[i];
  return dx;
}

// ---------------------------------------------------------------- flatten

template <typename Real>
Tensor<Real> FlattenLayer<Real>::Forward(const Tensor<Real>& x, Mode) {
  if (x.rank() != 4)
    throw std::invalid_argument("flatten: expected rank 4, got " +
                                ShapeString(x.shape()));
  in_shape_ = x.shape();
  return x.Reshaped({x.dim(0), x.dim(1), x.dim(2) * x.dim(3)});
}

template <typename Real>
Tensor<Real> FlattenLayer<Real>::Backward(const Tensor<Real>& dy) {
  return dy.Reshaped(in_shape_);
}

// ------------------------------------------------------------------ tdnnf

template <typename Real>
TdnnfLayer<Real>::TdnnfLayer(std::size_t in_dim, std::size_t bottleneck,
                             std::size_t hidden, std::vector<int> offsets)
    : in_dim_(in_dim),
      offsets_(std::move(offsets)),
      factor_(in_dim * std::max<std::size_t>(1, offsets_.size()), bottleneck,
              false),
      expansion_(bottleneck, hidden, true),
      bn_(hidden) {
  if (offsets_.empty()) throw std::invalid_argument("tdnnf: no offsets");
}

template <typename Real>
json TdnnfLayer<Real>::Config() const {
  return {{"type", Type()},
          {"in", in_dim_},
          {"bottleneck", expansion_.in_dim()},
          {"hidden", expansion_.out_dim()},
          {"offsets", offsets_}};
}

template <typename Real>
std::vector<Parameter<Real>*> TdnnfLayer<Real>::Params() {
  auto p = factor_.Params();
  for (auto* q : expansion_.Params()) p.push_back(q);
  return p;
}

template <typename Real>
void TdnnfLayer<Real>::Init(std::mt19937_64& rng) {
  factor_.Init(rng);
  expansion_.Init(rng);
}

template <typename Real>
Tensor<Real> TdnnfLayer<Real>::Forward(const Tensor<Real>& x, Mode mode) {
  if (x.rank() != 3 || x.dim(2) != in_dim_)
    throw std::invalid_argument("tdnnf: expected [B,T," +
                                std::to_string(in_dim_) + "], got " +
                                ShapeString(x.shape()));
  if (x.dim(1) == 0) throw std::invalid_argument("tdnnf: empty input");
  in_shape_ = x.shape();
  const std::size_t B = x.dim(0), T = x.dim(1), D = in_dim_;
  const std::size_t K = offsets_.size();
  Tensor<Real> spliced({B, T, K * D});
#pragma omp parallel for schedule(static)
  for (Index bt = 0; bt < static_cast<Index>(B * T); ++bt) {
    const Index b = bt / T, t = bt % T;
    for (std::size_t o = 0; o < K; ++o) {
      const Index src = std::clamp<Index>(t + offsets_[o], 0, T - 1);
      const Real* in = x.data() + (b * T + src) * D;
      std::copy(in, in + D, spliced.data() + (bt * K + o) * D);
    }
  }
  Tensor<Real> h = factor_.Forward(spliced, mode);
  h = expansion_.Forward(h, mode);
  h = bn_.Forward(h, mode);
  return relu_.Forward(h, mode);
}

template <typename Real>
Tensor<Real> TdnnfLayer<Real>::Backward(const Tensor<Real>& dy) {
  Tensor<Real> g = relu_.Backward(dy);
  g = bn_.Backward(g);
  g = expansion_.Backward(g);
  g = factor_.Backward(g);  // [B,T,K*D]
  const std::size_t B = in_shape_[0], T = in_shape_[1], D = in_dim_;
  const std::size_t K = offsets_.size();
  Tensor<Real> dx(in_shape_);
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < static_cast<Index>(B); ++b)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t o = 0; o < K; ++o) {
        const Index src =
            std::clamp<Index>(static_cast<Index>(t) + offsets_[o], 0, T - 1);
        const Real* in = g.data() + ((b * T + t) * K + o) * D;
        Real* out = dx.data() + (b * T + src) * D;
        for (std::size_t d = 0; d < D; ++d) out[d] += in[d];
      }
  return dx;
}

template <typename Real>
void TdnnfLayer<Real>::ConstrainSemiOrthogonal() {
  // A is stored [in, bottleneck]; the constraint acts on A^T.
  Tensor<Real>& w = factor_.weight().value;
  const std::size_t in = w.dim(0), out = w.dim(1);
  std::vector<Real> at(out * in);
  for (std::size_t i = 0; i < in; ++i)
    for (std::size_t o = 0; o < out; ++o) at[o * in + i] = w[i * out + o];
  SemiOrthogonalStep<Real>(at, out, in);
  for (std::size_t i = 0; i < in; ++i)
    for (std::size_t o = 0; o < out; ++o) w[i * out + o] = at[o * in + i];
}

// -------------------------------------------------------------- attention

void AttentionContext::Validate() const {
  if (left + right < 1)
    throw std::invalid_argument("attention: left + right must be >= 1");
  if (num_heads == 0 || key_dim == 0 || value_dim == 0)
    throw std::invalid_argument("attention: heads/key_dim/value_dim must be > 0");
}

template <typename Real>
AttentionLayer<Real>::AttentionLayer(std::size_t in_dim, std::size_t out_dim,
                                     AttentionContext ctx)
    : in_dim_(in_dim),
      out_dim_(out_dim),
      ctx_(ctx),
      w_query_("query", {in_dim, ctx.num_heads * ctx.key_dim}),
      w_key_("key", {in_dim, ctx.num_heads * ctx.key_dim}),
      w_value_("value", {in_dim, ctx.num_heads * ctx.value_dim}),
      w_out_("output", {ctx.num_heads * ctx.value_dim, out_dim}) {
  ctx_.Validate();
}

template <typename Real>
json AttentionLayer<Real>::Config() const {
  return {{"type", Type()},         {"in", in_dim_},
          {"out", out_dim_},        {"left", ctx_.left},
          {"right", ctx_.right},    {"heads", ctx_.num_heads},
          {"key_dim", ctx_.key_dim}, {"value_dim", ctx_.value_dim}};
}

template <typename Real>
void AttentionLayer<Real>::Init(std::mt19937_64& rng) {
  FanInUniform(w_query_.value, in_dim_, rng);
  FanInUniform(w_key_.value, in_dim_, rng);
  FanInUniform(w_value_.value, in_dim_, rng);
  FanInUniform(w_out_.value, ctx_.num_heads * ctx_.value_dim, rng);
}

template <typename Real>
kernels::AttentionDims AttentionLayer<Real>::Dims(std::size_t batch,
                                                  std::size_t time) const {
  return {batch, time, ctx_.num_heads, ctx_.key_dim, ctx_.value_dim,
          ctx_.left, ctx_.right};
}

template <typename Real>
Tensor<Real> AttentionLayer<Real>::Forward(const Tensor<Real>& x, Mode) {
  if (x.rank() != 3 || x.dim(2) != in_dim_)
    throw std::invalid_argument("attention: expected [B,T," +
                                std::to_string(in_dim_) + "], got " +
                                ShapeString(x.shape()));
  if (x.dim(1) == 0) throw std::invalid_argument("attention: empty input");
  const std::size_t B = x.dim(0), T = x.dim(1), rows = B * T;
  const std::size_t H = ctx_.num_heads;
  input_ = x;
  q_ = Tensor<Real>({B, T, H * ctx_.key_dim});
  k_ = Tensor<Real>({B, T, H * ctx_.key_dim});
  v_ = Tensor<Real>({B, T, H * ctx_.value_dim});
  kernels::MatMul<Real>(x.span(), w_query_.value.span(), q_.span(), rows,
                        in_dim_, H * ctx_.key_dim, false);
  kernels::MatMul<Real>(x.span(), w_key_.value.span(), k_.span(), rows,
                        in_dim_, H * ctx_.key_dim, false);
  kernels::MatMul<Real>(x.span(), w_value_.value.span(), v_.span(), rows,
                        in_dim_, H * ctx_.value_dim, false);
  weights_ = Tensor<Real>({B, H, T, ctx_.window()});
  heads_out_ = Tensor<Real>({B, T, H * ctx_.value_dim});
  kernels::AttentionForward<Real>(Dims(B, T), q_.span(), k_.span(), v_.span(),
                                  heads_out_.span(), weights_.span());
  Tensor<Real> y({B, T, out_dim_});
  kernels::MatMul<Real>(heads_out_.span(), w_out_.value.span(), y.span(), rows,
                        H * ctx_.value_dim, out_dim_, false);
  return y;
}

template <typename Real>
Tensor<Real> AttentionLayer<Real>::Backward(const Tensor<Real>& dy) {
  const std::size_t B = input_.dim(0), T = input_.dim(1), rows = B * T;
  const std::size_t H = ctx_.num_heads;
  const std::size_t qk = H * ctx_.key_dim, vv = H * ctx_.value_dim;
  kernels::MatMulTransA<Real>(heads_out_.span(), dy.span(), w_out_.grad.span(),
                              rows, vv, out_dim_, true);
  Tensor<Real> dheads({B, T, vv});
  kernels::MatMulTransB<Real>(dy.span(), w_out_.value.span(), dheads.span(),
                              rows, out_dim_, vv, false);
  Tensor<Real> dq({B, T, qk}), dk({B, T, qk}), dv({B, T, vv});
  kernels::AttentionBackward<Real>(Dims(B, T), q_.span(), k_.span(), v_.span(),
                                   weights_.span(), dheads.span(), dq.span(),
                                   dk.span(), dv.span());
  kernels::MatMulTransA<Real>(input_.span(), dq.span(), w_query_.grad.span(),
                              rows, in_dim_, qk, true);
  kernels::MatMulTransA<Real>(input_.span(), dk.span(), w_key_.grad.span(),
                              rows, in_dim_, qk, true);
  kernels::MatMulTransA<Real>(input_.span(), dv.span(), w_value_.grad.span(),
                              rows, in_dim_, vv, true);
  Tensor<Real> dx(input_.shape());
  kernels::MatMulTransB<Real>(dq.span(), w_query_.value.span(), dx.span(),
                              rows, qk, in_dim_, false);
  kernels::MatMulTransB<Real>(dk.span(), w_key_.value.span(), dx.span(), rows,
                              qk, in_dim_, true);
  kernels::MatMulTransB<Real>(dv.span(), w_value_.value.span(), dx.span(),
                              rows, vv, in_dim_, true);
  return dx;
}

template <typename Real>
std::pair<Tensor<Real>, Tensor<Real>> TimeRestrictedSelfAttention(
    const Tensor<Real>& x, const Tensor<Real>& w_query,
    const Tensor<Real>& w_key, const Tensor<Real>& w_value,
    const AttentionContext& ctx) {
  ctx.Validate();
  if (x.rank() != 3 || x.dim(1) == 0)
    throw std::invalid_argument("attention: expected non-empty [B,T,D]");
  const std::size_t B = x.dim(0), T = x.dim(1), D = x.dim(2), rows = B * T;
  const std::size_t qk = ctx.num_heads * ctx.key_dim;
  const std::size_t vv = ctx.num_heads * ctx.value_dim;
  CheckShape(w_query.shape() == Shape{D, qk}, "attention query", w_query.shape(), {D, qk});
  CheckShape(w_key.shape() == Shape{D, qk}, "attention key", w_key.shape(), {D, qk});
  CheckShape(w_value.shape() == Shape{D, vv}, "attention value", w_value.shape(), {D, vv});
  Tensor<Real> q({B, T, qk}), k({B, T, qk}), v({B, T, vv});
  kernels::MatMul<Real>(x.span(), w_query.span(), q.span(), rows, D, qk, false);
  kernels::MatMul<Real>(x.span(), w_key.span(), k.span(), rows, D, qk, false);
  kernels::MatMul<Real>(x.span(), w_value.span(), v.span(), rows, D, vv, false);
  Tensor<Real> out({B, T, vv}), weights({B, ctx.num_heads, T, ctx.window()});
  kernels::AttentionDims dims{B, T, ctx.num_heads, ctx.key_dim, ctx.value_dim,
                              ctx.left, ctx.right};
  kernels::AttentionForward<Real>(dims, q.span(), k.span(), v.span(),
                                  out.span(), weights.span());
  return {std::move(out), std::move(weights)};
}

// ---------------------------------------------------------------- factory

template <typename Real>
std::unique_ptr<Layer<Real>> MakeLayer(const json& c) {
  const std::string type = c.at("type").get<std::string>();
  if (type == "affine")
    return std::make_unique<AffineLayer<Real>>(c.at("in"), c.at("out"),
                                               c.value("bias", true));
  if (type == "speaker-input")
    return std::make_unique<SpeakerInputLayer<Real>>(c.at("feat_dim"),
                                                     c.at("height"));
  if (type == "conv2d")
    return std::make_unique<Conv2dLayer<Real>>(
        c.at("height"), c.at("in_channels"), c.at("out_channels"));
  if (type == "maxpool-freq") return std::make_unique<MaxPoolFreqLayer<Real>>();
  if (type == "relu") return std::make_unique<ReluLayer<Real>>();
  if (type == "batchnorm")
    return std::make_unique<BatchNormLayer<Real>>(c.at("dim"));
  if (type == "dropout")
    return std::make_unique<DropoutLayer<Real>>(c.value("rate", 0.0));
  if (type == "flatten") return std::make_unique<FlattenLayer<Real>>();
  if (type == "tdnnf")
    return std::make_unique<TdnnfLayer<Real>>(
        c.at("in"), c.at("bottleneck"), c.at("hidden"),
        c.at("offsets").get<std::vector<int>>());
  if (type == "attention") {
    AttentionContext ctx;
    ctx.left = c.at("left");
    ctx.right = c.at("right");
    ctx.num_heads = c.at("heads");
    ctx.key_dim = c.at("key_dim");
    ctx.value_dim = c.at("value_dim");
    return std::make_unique<AttentionLayer<Real>>(c.at("in"), c.at("out"), ctx);
  }
  throw std::invalid_argument("unknown layer type '" + type + "'");
}

#define ALTK_INSTANTIATE_LAYERS(Real)                                       \
  template void FanInUniform<Real>(Tensor<Real>&, std::size_t,              \
                                   std::mt19937_64&);                       \
  template class AffineLayer<Real>;                                         \
  template class SpeakerInputLayer<Real>;                                   \
  template class Conv2dLayer<Real>;                                         \
  template class MaxPoolFreqLayer<Real>;                                    \
  template class ReluLayer<Real>;                                           \
  template class BatchNormLayer<Real>;                                      \
  template class DropoutLayer<Real>;                                        \
  template class FlattenLayer<Real>;                                        \
  template class TdnnfLayer<Real>;                                          \
  template class AttentionLayer<Real>;                                      \
  template std::pair<Tensor<Real>, Tensor<Real>>                            \
  TimeRestrictedSelfAttention<Real>(const Tensor<Real>&, const Tensor<Real>&, \
                                    const Tensor<Real>&, const Tensor<Real>&, \
                                    const AttentionContext&);               \
  template std::unique_ptr<Layer<Real>> MakeLayer<Real>(const json&);

ALTK_INSTANTIATE_LAYERS(float)
ALTK_INSTANTIATE_LAYERS(double)

}  // namespace altk::nn
