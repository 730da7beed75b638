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

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "altk/nn/kernels.hpp"
#include "altk/nn/tensor.hpp"
#include "json.hpp"

namespace altk::nn {

enum class Mode { kTrain, kInference };

// A differentiable block with cached forward state. Forward() must precede
// Backward(); Backward() accumulates into parameter gradients and returns the
// gradient w.r.t. the forward input.
template <typename Real>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string Type() const = 0;
  virtual nlohmann::json Config() const = 0;
  virtual Tensor<Real> Forward(const Tensor<Real>& x, Mode mode) = 0;
  virtual Tensor<Real> Backward(const Tensor<Real>& dy) = 0;
  virtual std::vector<Parameter<Real>*> Params() { return {}; }
  // Non-trainable buffers that still belong in a checkpoint.
  virtual std::vector<Tensor<Real>*> Buffers() { return {}; }
  virtual void Init(std::mt19937_64& /*rng*/) {}
  virtual std::unique_ptr<Layer<Real>> Clone() const = 0;
};

template <typename Real>
std::unique_ptr<Layer<Real>> MakeLayer(const nlohmann::json& config);

// Uniform(-sqrt(3/fan_in), sqrt(3/fan_in)), i.e. unit-variance outputs for
// unit-variance inputs.
template <typename Real>
void FanInUniform(Tensor<Real>& w, std::size_t fan_in, std::mt19937_64& rng);

// y = x W + b over the last axis. W is [in, out].
template <typename Real>
class AffineLayer : public Layer<Real> {
 public:
  AffineLayer(std::size_t in_dim, std::size_t out_dim, bool bias = true);
  std::string Type() const override { return "affine"; }
  nlohmann::json Config() const override;
  Tensor<Real> Forward(const Tensor<Real>& x, Mode mode) override;
  Tensor<Real> Backward(const Tensor<Real>& dy) override;
  std::vector<Parameter<Real>*> Params() override;
  void Init(std::mt19937_64& rng) override;
  std::unique_ptr<Layer<Real>> Clone() const override {
    return std::make_unique<AffineLayer>(*this);
  }

  Parameter<Real>& weight() { return weight_; }
  Parameter<Real>& bias() { return bias_; }
  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }

 private:
  std::size_t in_dim_, out_dim_;
  bool has_bias_;
  Parameter<Real> weight_, bias_;
  Tensor<Real> input_;
};

// Input [B,T,2*D]: the first D dims are filterbank features, the last D a
// per-speaker embedding. One shared affine map is applied to each half and
// the results are stacked as two channels: output [B,T,height,2].
template <typename Real>
class SpeakerInputLayer : public Layer<Real> {
 public:
  SpeakerInputLayer(std::size_t feat_dim, std::size_t height);
  std::string Type() const override { return "speaker-input"; }
  nlohmann::json Config() const override;
  Tensor<Real> Forward(const Tensor<Real>& x, Mode mode) override;
  Tensor<Real> Backward(const Tensor<Real>& dy) override;
  std::vector<Parameter<Real>*> Params() override { return affine_.Params(); }
  void Init(std::mt19937_64& rng) override { affine_.Init(rng); }
  std::unique_ptr<Layer<Real>> Clone() const override {
    return std::make_unique<SpeakerInputLayer>(*this);
  }

 private:
  std::size_t feat_dim_, height_;
  AffineLayer<Real> affine_;
  Shape in_shape_;
};

// 3x3 convolution over (time, freq), stride 1, zero "same" padding.
// Input [B,T,height,in_ch] -> [B,T,height,out_ch]. Filters are stored as
// [9*in_ch, out_ch] in Im2Col3x3 column order.
template <typename Real>
class Conv2dLayer : public Layer<Real> {
 public:
  Conv2dLayer(std::size_t height, std::size_t in_channels,
              std::size_t out_channels);
  std::string Type() const override { return "conv2d"; }
  nlohmann::json Config() const override;
  Tensor<Real> Forward(const Tensor<Real>& x, Mode mode) override;
  Tensor<Real> Backward(const Tensor<Real>& dy) override;
  std::vector<Parameter<Real>*> Params() override {
    return {&filters_, &bias_};
  }
  void Init(std::mt19937_64& rng) override;
  std::unique_ptr<Layer<Real>> Clone() const override {
    return std::make_unique<Conv2dLayer>(*this);
  }

  Parameter<Real>& filters() { return filters_; }
  Parameter<Real>& bias() { return bias_; }

 private:
  std::size_t height_, in_ch_, out_ch_;
  Parameter<Real> filters_, bias_;
  Tensor<Real> col_, dcol_;
  Shape in_shape_;
};

// Max over non-overlapping pairs along the frequency axis; time untouched.
template <typename Real>
class MaxPoolFreqLayer : public Layer<Real> {
 public:
  std::string Type() const override { return "maxpool-freq"; }
  nlohmann::json Config() const override { return {{"type", Type()}}; }
  Tensor<Real> Forward(const Tensor<Real>& x, Mode mode) override;
  Tensor<Real> Backward(const Tensor<Real>& dy) override;
  std::unique_ptr<Layer<Real>> Clone() const override {
    return std::make_unique<MaxPoolFreqLayer>(*this);
  }

 private:
  Shape in_shape_;
  std::vector<unsigned char> argmax_;  // 0 or 1 within each pair
};

template <typename Real>
class ReluLayer : public Layer<Real> {
 public:
  std::string Type() const override { return "relu"; }
  nlohmann::json Config() const override { return {{"type", Type()}}; }
  Tensor<Real> Forward(const Tensor<Real>& x, Mode mode) override;
  Tensor<Real> Backward(const Tensor<Real>& dy) override;
  std::unique_ptr<Layer<Real>> Clone() const override {
    return std::make_unique<ReluLayer>(*this);
  }

  // Smallest |input| seen by the latest Forward(); gradient checks use it to
  // reject points that sit on the kink.
  double min_abs_input() const { return min_abs_input_; }

 private:
  Tensor<Real> output_;
  double min_abs_input_ = 0;
};

// Normalizes every column of the last axis over all leading positions
// (minibatch x time [x freq]). No trainable scale or offset.
template <typename Real>
class BatchNormLayer : public Layer<Real> {
 public:
  static constexpr double kEpsilon = 1e-5;
  static constexpr double kMomentum = 0.9;

  explicit BatchNormLayer(std::size_t dim);
  std::string Type() const override { return "batchnorm"; }
  nlohmann::json Config() const override;
  Tensor<Real> Forward(const Tensor<Real>& x, Mode mode) override;
  Tensor<Real> Backward(const Tensor<Real>& dy) override;
  std::vector<Tensor<Real>*> Buffers() override {
    return {&running_mean_, &running_var_};
  }
  std::unique_ptr<Layer<Real>> Clone() const override {
    return std::make_unique<BatchNormLayer>(*this);
  }

  const Tensor<Real>& running_mean() const { return running_mean_; }
  const Tensor<Real>& running_var() const { return running_var_; }

 private:
  std::size_t dim_;
  Tensor<Real> running_mean_, running_var_;
  Tensor<Real> normalized_;
  std::vector<Real> inv_std_;
  Mode last_mode_ = Mode::kInference;
};

// Inverted dropout; identity at inference and whenever rate == 0.
template <typename Real>
class DropoutLayer : public Layer<Real> {
 public:
  explicit DropoutLayer(double rate = 0.0, std::uint64_t seed = 0);
  std::string Type() const override { return "dropout"; }
  nlohmann::json Config() const override;
  Tensor<Real> Forward(const Tensor<Real>& x, Mode mode) override;
  Tensor<Real> Backward(const Tensor<Real>& dy) override;
  std::unique_ptr<Layer<Real>> Clone() const override {
    return std::make_unique<DropoutLayer>(*this);
  }

  void SetRate(double rate);
  double rate() const { return rate_; }

 private:
  double rate_;
  std::mt19937_64 rng_;
  std::vector<Real> mask_;
};

// [B,T,F,C] -> [B,T,F*C].
template <typename Real>
class FlattenLayer : public Layer<Real> {
 public:
  std::string Type() const override { return "flatten"; }
  nlohmann::json Config() const override { return {{"type", Type()}}; }
  Tensor<Real> Forward(const Tensor<Real>& x, Mode mode) override;
  Tensor<Real> Backward(const Tensor<Real>& dy) override;
  std::unique_ptr<Layer<Real>> Clone() const override {
    return std::make_unique<FlattenLayer>(*this);
  }

 private:
  Shape in_shape_;
};

// Factorized time-delay layer on [B,T,D]:
//   y = ReLU(BN(B * A * splice(x, offsets)))
// A maps D*|offsets| -> bottleneck without bias and is kept semi-orthogonal
// by ConstrainSemiOrthogonal(); B maps bottleneck -> hidden with bias.
// Frames outside the sequence are replaced by the nearest edge frame.
template <typename Real>
class TdnnfLayer : public Layer<Real> {
 public:
  TdnnfLayer(std::size_t in_dim, std::size_t bottleneck, std::size_t hidden,
             std::vector<int> offsets);
  std::string Type() const override { return "tdnnf"; }
  nlohmann::json Config() const override;
  Tensor<Real> Forward(const Tensor<Real>& x, Mode mode) override;
  Tensor<Real> Backward(const Tensor<Real>& dy) override;
  std::vector<Parameter<Real>*> Params() override;
  std::vector<Tensor<Real>*> Buffers() override { return bn_.Buffers(); }
  void Init(std::mt19937_64& rng) override;
  std::unique_ptr<Layer<Real>> Clone() const override {
    return std::make_unique<TdnnfLayer>(*this);
  }

  // One floating-scale semi-orthogonal update of the factor A.
  void ConstrainSemiOrthogonal();

  AffineLayer<Real>& factor() { return factor_; }
  AffineLayer<Real>& expansion() { return expansion_; }
  const std::vector<int>& offsets() const { return offsets_; }
  const ReluLayer<Real>& relu() const { return relu_; }

 private:
  std::size_t in_dim_;
  std::vector<int> offsets_;
  AffineLayer<Real> factor_;     // A: in*|offsets| -> bottleneck, no bias
  AffineLayer<Real> expansion_;  // B: bottleneck -> hidden
  BatchNormLayer<Real> bn_;
  ReluLayer<Real> relu_;
  Shape in_shape_;
};

struct AttentionContext {
  std::size_t left = 15;   // past frames
  std::size_t right = 6;   // future frames
  std::size_t num_heads = 15;
  std::size_t key_dim = 60;
  std::size_t value_dim = 40;

  std::size_t window() const { return left + right + 1; }
  // Index of offset 0 inside a weight row.
  std::size_t center_bin() const { return left; }
  void Validate() const;
};

// Time-restricted multi-head self-attention on [B,T,in]: per-head query, key
// and value projections (no bias), windowed softmax attention, then one
// shared output projection [heads*value_dim, out] (no bias).
template <typename Real>
class AttentionLayer : public Layer<Real> {
 public:
  AttentionLayer(std::size_t in_dim, std::size_t out_dim, AttentionContext ctx);
  std::string Type() const override { return "attention"; }
  nlohmann::json Config() const override;
  Tensor<Real> Forward(const Tensor<Real>& x, Mode mode) override;
  Tensor<Real> Backward(const Tensor<Real>& dy) override;
  std::vector<Parameter<Real>*> Params() override {
    return {&w_query_, &w_key_, &w_value_, &w_out_};
  }
  void Init(std::mt19937_64& rng) override;
  std::unique_ptr<Layer<Real>> Clone() const override {
    return std::make_unique<AttentionLayer>(*this);
  }

  static std::size_t ParameterCount(std::size_t in_dim, std::size_t out_dim,
                                    const AttentionContext& ctx) {
    return ctx.num_heads * in_dim * (2 * ctx.key_dim + ctx.value_dim) +
           ctx.num_heads * ctx.value_dim * out_dim;
  }

  const AttentionContext& context() const { return ctx_; }
  // [B,H,T,L+R+1] from the latest Forward().
  const Tensor<Real>& last_weights() const { return weights_; }
  // [B,T,H*value_dim] from the latest Forward(), before the output projection.
  const Tensor<Real>& last_head_output() const { return heads_out_; }

  Parameter<Real>& w_query() { return w_query_; }
  Parameter<Real>& w_key() { return w_key_; }
  Parameter<Real>& w_value() { return w_value_; }
  Parameter<Real>& w_out() { return w_out_; }

 private:
  kernels::AttentionDims Dims(std::size_t batch, std::size_t time) const;

  std::size_t in_dim_, out_dim_;
  AttentionContext ctx_;
  Parameter<Real> w_query_, w_key_, w_value_, w_out_;
  Tensor<Real> input_, q_, k_, v_, weights_, heads_out_;
};

// Functional form of the attention core, used by tests and analysis:
// returns (head outputs [B,T,H*value_dim], weights [B,H,T,L+R+1]).
template <typename Real>
std::pair<Tensor<Real>, Tensor<Real>> TimeRestrictedSelfAttention(
    const Tensor<Real>& x, const Tensor<Real>& w_query,
    const Tensor<Real>& w_key, const Tensor<Real>& w_value,
    const AttentionContext& ctx);

}  // namespace altk::nn
