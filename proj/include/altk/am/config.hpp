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
#include <optional>
#include <vector>

#include "altk/nn/layers.hpp"
#include "json.hpp"

namespace altk::am {

struct ModelConfig {
  std::size_t feat_dim = 40;      // mel bands; the speaker embedding has the same size
  std::size_t input_height = 40;  // output height of the shared input affine
  std::vector<std::size_t> conv_heights = {40, 40, 40, 20, 20, 10};
  std::vector<std::size_t> conv_channels = {48, 48, 64, 64, 64, 128};
  std::vector<std::size_t> pool_after = {3, 5, 6};  // 1-based conv indices
  std::size_t num_tdnnf_layers = 9;
  std::size_t tdnnf_hidden = 1024;
  std::size_t tdnnf_bottleneck = 128;
  // One offset list per TDNN-F layer.
  std::vector<std::vector<int>> tdnnf_offsets;
  std::optional<nn::AttentionContext> attention;
  std::size_t output_units = 0;
  double dropout_max = 0.2;
  bool desk_scale = false;

  // Full-size network; K output units.
  static ModelConfig Paper(std::size_t output_units);
  // Shrunken dims for single-machine runs.
  static ModelConfig Desk(std::size_t output_units);

  bool PoolsAfter(std::size_t conv_index) const;  // 0-based
  std::size_t FlattenedDim() const;
  // Throws std::invalid_argument on inconsistent heights, pools or dims.
  void Validate() const;
};

// Attention settings matched to the desk dims: L=15, R=6, 4 heads, key 15,
// value 10.
nn::AttentionContext DeskAttention();

nlohmann::json ToJson(const ModelConfig& c);
ModelConfig ModelConfigFromJson(const nlohmann::json& j);

struct TrainConfig {
  double lr_initial = 0.0005;
  double lr_final = 0.00005;
  std::size_t epochs = 8;
  std::size_t minibatch_size = 128;  // chunks per minibatch
  std::vector<std::size_t> chunk_sizes = {140, 100, 160};
  double final_layer_lr_multiplier = 0.5;
  std::size_t models_to_average = 10;
  std::vector<double> augmentation = {0.9, 1.0, 1.1};
  double momentum = 0.9;
  std::size_t constraint_interval = 4;   // optimizer steps per semi-orthogonal step
  std::size_t valid_interval = 1;        // iterations between held-out evaluations
  std::size_t max_valid_utterances = 0;  // 0 = whole held-out set
  double max_grad_norm = 0;              // 0 disables clipping
  bool keep_average_members = false;     // return the averaged iterates too
  std::uint64_t seed = 1;

  static TrainConfig Paper() { return {}; }
  static TrainConfig Desk();

  // lr_initial * (lr_final / lr_initial)^(i / n).
  double LearningRate(std::size_t iteration, std::size_t total) const;
  // 0 -> dropout_max -> 0, piecewise linear in progress in [0, 1].
  static double DropoutRate(double progress, double dropout_max);
  void Validate() const;
};

nlohmann::json ToJson(const TrainConfig& c);

}  // namespace altk::am
