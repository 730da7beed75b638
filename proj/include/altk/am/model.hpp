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

#include "altk/am/config.hpp"
#include "altk/nn/layers.hpp"

namespace altk::am {

struct LossPoint {
  std::size_t iteration = 0;
  double train_loss = 0;
  double valid_loss = 0;  // NaN when not evaluated at this iteration
};

struct TrainingMetadata {
  std::size_t iterations = 0;
  std::vector<LossPoint> loss_history;
};

// The CTDNN stack, optionally with self-attention (CTDNN_SA):
//   speaker-input affine -> 6 x (conv, relu, batchnorm[, maxpool]) -> flatten
//   -> 9 x (tdnnf, dropout) -> [attention] -> affine.
// Forward() returns logits; log-softmax is applied by the caller.
template <typename Real>
class Network {
 public:
  Network() = default;
  explicit Network(const ModelConfig& config);  // uninitialized parameters
  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const ModelConfig& config() const { return config_; }
  TrainingMetadata& metadata() { return metadata_; }
  const TrainingMetadata& metadata() const { return metadata_; }

  void Init(std::uint64_t seed);
  // x: [B, T, 2*feat_dim] (features then speaker embedding). -> [B, T, K]
  nn::Tensor<Real> Forward(const nn::Tensor<Real>& x, nn::Mode mode);
  nn::Tensor<Real> Backward(const nn::Tensor<Real>& dlogits);

  std::vector<nn::Parameter<Real>*> Params();
  std::vector<nn::Tensor<Real>*> Buffers();
  std::size_t NumParameters() const;
  void ZeroGrad();

  void SetDropout(double rate);
  void ConstrainTdnnf();
  // Halves (multiplier) the learning rate of the last two weight layers.
  void SetFinalLayerLrScale(Real multiplier);

  // nullptr for the CTDNN baseline.
  nn::AttentionLayer<Real>* attention();
  std::vector<std::string> LayerTypes() const;
  std::size_t num_layers() const { return layers_.size(); }
  nn::Layer<Real>& layer(std::size_t i) { return *layers_.at(i); }
  const std::vector<std::unique_ptr<nn::Layer<Real>>>& layers() const { return layers_; }

  void Save(const std::string& path) const;
  static Network Load(const std::string& path);

  template <typename Other>
  Network<Other> Cast() const;

 private:
  template <typename>
  friend class Network;

  ModelConfig config_;
  TrainingMetadata metadata_;
  std::vector<std::unique_ptr<nn::Layer<Real>>> layers_;
};

using AcousticModel = Network<float>;

// Closed-form trainable-parameter count of a config.
std::size_t AnalyticParameterCount(const ModelConfig& config);

// Uniform average of parameters and batchnorm statistics. Throws
// std::invalid_argument on an empty list or a config mismatch.
AcousticModel AverageCheckpoints(const std::vector<const AcousticModel*>& models);

}  // namespace altk::am
