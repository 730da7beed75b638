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

#include "altk/am/config.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace altk::am {
namespace {

std::vector<std::vector<int>> DefaultOffsets(std::size_t layers) {
  // First layer looks at adjacent frames, the rest are dilated by 3.
  std::vector<std::vector<int>> out(layers, {-3, 0, 3});
  if (!out.empty()) out[0] = {-1, 0, 1};
  return out;
}

}  // namespace

ModelConfig ModelConfig::Paper(std::size_t output_units) {
  ModelConfig c;
  c.tdnnf_offsets = DefaultOffsets(c.num_tdnnf_layers);
  c.output_units = output_units;
  return c;
}

ModelConfig ModelConfig::Desk(std::size_t output_units) {
  ModelConfig c = Paper(output_units);
  c.conv_channels = {8, 8, 16, 16, 16, 32};
  c.tdnnf_hidden = 64;
  c.tdnnf_bottleneck = 16;
  c.desk_scale = true;
  return c;
}

nn::AttentionContext DeskAttention() {
  nn::AttentionContext ctx;
  ctx.left = 15;
  ctx.right = 6;
  ctx.num_heads = 4;
  ctx.key_dim = 15;
  ctx.value_dim = 10;
  return ctx;
}

bool ModelConfig::PoolsAfter(std::size_t conv_index) const {
  return std::find(pool_after.begin(), pool_after.end(), conv_index + 1) != pool_after.end();
}

std::size_t ModelConfig::FlattenedDim() const {
  if (conv_heights.empty()) return input_height * 2;
  const std::size_t last = conv_heights.size() - 1;
  return (PoolsAfter(last) ? conv_heights[last] / 2 : conv_heights[last]) *
         conv_channels[last];
}

void ModelConfig::Validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("ModelConfig: " + m); };
  if (feat_dim == 0 || input_height == 0) fail("feat_dim and input_height must be positive");
  if (conv_heights.size() != conv_channels.size())
    fail("conv_heights and conv_channels differ in length");
  for (std::size_t p : pool_after)
    if (p == 0 || p > conv_heights.size())
      fail("pool_after index " + std::to_string(p) + " is not a conv layer");
  std::size_t height = input_height;
  for (std::size_t i = 0; i < conv_heights.size(); ++i) {
    if (conv_channels[i] == 0) fail("conv channels must be positive");
    if (conv_heights[i] != height)
      fail("conv layer " + std::to_string(i + 1) + " expects height " +
           std::to_string(conv_heights[i]) + " but receives " + std::to_string(height));
    if (PoolsAfter(i)) {
      if (height % 2 != 0)
        fail("pooling after conv layer " + std::to_string(i + 1) + " needs an even height, got " +
             std::to_string(height));
      height /= 2;
    }
  }
  if (tdnnf_hidden == 0 || tdnnf_bottleneck == 0) fail("tdnnf dims must be positive");
  if (tdnnf_offsets.size() != num_tdnnf_layers)
    fail("need one offset list per tdnnf layer (" + std::to_string(num_tdnnf_layers) + "), got " +
         std::to_string(tdnnf_offsets.size()));
  for (const auto& o : tdnnf_offsets)
    if (o.empty()) fail("empty tdnnf offset list");
  if (attention) attention->Validate();
  if (output_units == 0) fail("output_units must be positive");
  if (!(dropout_max >= 0 && dropout_max < 1)) fail("dropout_max must be in [0, 1)");
}

nlohmann::json ToJson(const ModelConfig& c) {
  nlohmann::json j = {{"feat_dim", c.feat_dim},
                      {"input_height", c.input_height},
                      {"conv_heights", c.conv_heights},
                      {"conv_channels", c.conv_channels},
                      {"pool_after", c.pool_after},
                      {"num_tdnnf_layers", c.num_tdnnf_layers},
                      {"tdnnf_hidden", c.tdnnf_hidden},
                      {"tdnnf_bottleneck", c.tdnnf_bottleneck},
                      {"tdnnf_offsets", c.tdnnf_offsets},
                      {"output_units", c.output_units},
                      {"dropout_max", c.dropout_max},
                      {"desk_scale", c.desk_scale}};
  if (c.attention)
    j["attention"] = {{"left", c.attention->left},
                      {"right", c.attention->right},
                      {"heads", c.attention->num_heads},
                      {"key_dim", c.attention->key_dim},
                      {"value_dim", c.attention->value_dim}};
  return j;
}

ModelConfig ModelConfigFromJson(const nlohmann::json& j) {
  ModelConfig c;
  c.feat_dim = j.at("feat_dim");
  c.input_height = j.at("input_height");
  c.conv_heights = j.at("conv_heights").get<std::vector<std::size_t>>();
  c.conv_channels = j.at("conv_channels").get<std::vector<std::size_t>>();
  c.pool_after = j.at("pool_after").get<std::vector<std::size_t>>();
  c.num_tdnnf_layers = j.at("num_tdnnf_layers");
  c.tdnnf_hidden = j.at("tdnnf_hidden");
  c.tdnnf_bottleneck = j.at("tdnnf_bottleneck");
  c.tdnnf_offsets = j.at("tdnnf_offsets").get<std::vector<std::vector<int>>>();
  c.output_units = j.at("output_units");
  c.dropout_max = j.at("dropout_max");
  c.desk_scale = j.at("desk_scale");
  if (j.contains("attention")) {
    const auto& a = j["attention"];
    nn::AttentionContext ctx;
    ctx.left = a.at("left");
    ctx.right = a.at("right");
    ctx.num_heads = a.at("heads");
    ctx.key_dim = a.at("key_dim");
    ctx.value_dim = a.at("value_dim");
    c.attention = ctx;
  }
  return c;
}

TrainConfig TrainConfig::Desk() {
  TrainConfig c;
  c.minibatch_size = 16;
  c.lr_initial = 0.05;
  c.lr_final = 0.005;
  c.valid_interval = 10;
  c.max_valid_utterances = 16;
  c.max_grad_norm = 5.0;
  return c;
}

double TrainConfig::LearningRate(std::size_t iteration, std::size_t total) const {
  if (total == 0) return lr_initial;
  const double frac = std::min(1.0, static_cast<double>(iteration) / static_cast<double>(total));
  return lr_initial * std::pow(lr_final / lr_initial, frac);
}

double TrainConfig::DropoutRate(double progress, double dropout_max) {
  progress = std::clamp(progress, 0.0, 1.0);
  return progress <= 0.5 ? dropout_max * progress / 0.5 : dropout_max * (1.0 - progress) / 0.5;
}

void TrainConfig::Validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("TrainConfig: " + m); };
  if (!(lr_initial > 0 && lr_final > 0)) fail("learning rates must be positive");
  if (!(lr_final < lr_initial)) fail("lr_final must be below lr_initial");
  if (epochs == 0 || minibatch_size == 0 || models_to_average == 0)
    fail("epochs, minibatch_size and models_to_average must be positive");
  if (chunk_sizes.empty()) fail("need at least one chunk size");
  for (std::size_t s : chunk_sizes)
    if (s == 0) fail("chunk sizes must be positive");
  if (!(final_layer_lr_multiplier > 0)) fail("final_layer_lr_multiplier must be positive");
  if (augmentation.empty()) fail("augmentation needs at least one factor");
  for (double f : augmentation)
    if (!(f > 0)) fail("augmentation factors must be positive");
  if (!(momentum >= 0 && momentum < 1)) fail("momentum must be in [0, 1)");
  if (constraint_interval == 0 || valid_interval == 0)
    fail("constraint_interval and valid_interval must be positive");
  if (max_grad_norm < 0) fail("max_grad_norm must be non-negative");
}

nlohmann::json ToJson(const TrainConfig& c) {
  return {{"lr_initial", c.lr_initial},
          {"lr_final", c.lr_final},
          {"epochs", c.epochs},
          {"minibatch_size", c.minibatch_size},
          {"chunk_sizes", c.chunk_sizes},
          {"final_layer_lr_multiplier", c.final_layer_lr_multiplier},
          {"models_to_average", c.models_to_average},
          {"augmentation", c.augmentation},
          {"momentum", c.momentum},
          {"constraint_interval", c.constraint_interval},
          {"valid_interval", c.valid_interval},
          {"max_valid_utterances", c.max_valid_utterances},
          {"max_grad_norm", c.max_grad_norm},
          {"keep_average_members", c.keep_average_members},
          {"seed", c.seed}};
}

}  // namespace altk::am
