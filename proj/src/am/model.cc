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

#include "altk/am/model.hpp"

#include <cmath>
#include <stdexcept>

#include "altk/nn/checkpoint.hpp"
#include "altk/util/error.hpp"
#include "altk/util/seed.hpp"

namespace altk::am {

template <typename Real>
Network<Real>::Network(const ModelConfig& config) : config_(config) {
  config_.Validate();
  const auto& c = config_;
  layers_.push_back(std::make_unique<nn::SpeakerInputLayer<Real>>(c.feat_dim, c.input_height));
  std::size_t channels = 2;
  for (std::size_t i = 0; i < c.conv_heights.size(); ++i) {
    layers_.push_back(
        std::make_unique<nn::Conv2dLayer<Real>>(c.conv_heights[i], channels, c.conv_channels[i]));
    layers_.push_back(std::make_unique<nn::ReluLayer<Real>>());
    layers_.push_back(std::make_unique<nn::BatchNormLayer<Real>>(c.conv_channels[i]));
    if (c.PoolsAfter(i)) layers_.push_back(std::make_unique<nn::MaxPoolFreqLayer<Real>>());
    channels = c.conv_channels[i];
  }
  layers_.push_back(std::make_unique<nn::FlattenLayer<Real>>());
  std::size_t dim = c.FlattenedDim();
  for (std::size_t j = 0; j < c.num_tdnnf_layers; ++j) {
    layers_.push_back(std::make_unique<nn::TdnnfLayer<Real>>(dim, c.tdnnf_bottleneck,
                                                             c.tdnnf_hidden, c.tdnnf_offsets[j]));
    layers_.push_back(std::make_unique<nn::DropoutLayer<Real>>(0.0));
    dim = c.tdnnf_hidden;
  }
  if (c.attention)
    layers_.push_back(std::make_unique<nn::AttentionLayer<Real>>(dim, dim, *c.attention));
  layers_.push_back(std::make_unique<nn::AffineLayer<Real>>(dim, c.output_units));
}

template <typename Real>
Network<Real>::Network(const Network& other)
    : config_(other.config_), metadata_(other.metadata_) {
  for (const auto& l : other.layers_) layers_.push_back(l->Clone());
}

template <typename Real>
Network<Real>& Network<Real>::operator=(const Network& other) {
  if (this != &other) {
    Network tmp(other);
    *this = std::move(tmp);
  }
  return *this;
}

template <typename Real>
void Network<Real>::Init(std::uint64_t seed) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const std::string tag = "layer/" + std::to_string(i);
    if (layers_[i]->Type() == "dropout") {
      const double rate = static_cast<nn::DropoutLayer<Real>&>(*layers_[i]).rate();
      layers_[i] = std::make_unique<nn::DropoutLayer<Real>>(rate, SubSeed(seed, tag));
      continue;
    }
    std::mt19937_64 rng(SubSeed(seed, tag));
    layers_[i]->Init(rng);
  }
}

template <typename Real>
nn::Tensor<Real> Network<Real>::Forward(const nn::Tensor<Real>& x, nn::Mode mode) {
  if (x.rank() != 3 || x.dim(2) != 2 * config_.feat_dim)
    throw std::invalid_argument("Network: expected input [B, T, " +
                                std::to_string(2 * config_.feat_dim) + "], got " +
                                nn::ShapeString(x.shape()));
  nn::Tensor<Real> h = layers_.front()->Forward(x, mode);
  for (std::size_t i = 1; i < layers_.size(); ++i) h = layers_[i]->Forward(h, mode);
  return h;
}

template <typename Real>
nn::Tensor<Real> Network<Real>::Backward(const nn::Tensor<Real>& dlogits) {
  nn::Tensor<Real> g = layers_.back()->Backward(dlogits);
  for (std::size_t i = layers_.size() - 1; i-- > 0;) g = layers_[i]->Backward(g);
  return g;
}

template <typename Real>
std::vector<nn::Parameter<Real>*> Network<Real>::Params() {
  std::vector<nn::Parameter<Real>*> out;
  for (auto& l : layers_)
    for (auto* p : l->Params()) out.push_back(p);
  return out;
}

template <typename Real>
std::vector<nn::Tensor<Real>*> Network<Real>::Buffers() {
  std::vector<nn::Tensor<Real>*> out;
  for (auto& l : layers_)
    for (auto* b : l->Buffers()) out.push_back(b);
  return out;
}

template <typename Real>
std::size_t Network<Real>::NumParameters() const {
  std::size_t n = 0;
  for (auto* p : const_cast<Network*>(this)->Params()) n += p->value.size();
  return n;
}

template <typename Real>
void Network<Real>::ZeroGrad() {
  for (auto* p : Params()) p->ZeroGrad();
}

template <typename Real>
void Network<Real>::SetDropout(double rate) {
  for (auto& l : layers_)
    if (l->Type() == "dropout") static_cast<nn::DropoutLayer<Real>&>(*l).SetRate(rate);
}

template <typename Real>
void Network<Real>::ConstrainTdnnf() {
  for (auto& l : layers_)
    if (l->Type() == "tdnnf") static_cast<nn::TdnnfLayer<Real>&>(*l).ConstrainSemiOrthogonal();
}

template <typename Real>
void Network<Real>::SetFinalLayerLrScale(Real multiplier) {
  int remaining = 2;
  for (std::size_t i = layers_.size(); i-- > 0 && remaining > 0;) {
    auto params = layers_[i]->Params();
    if (params.empty()) continue;
    for (auto* p : params) p->lr_scale = multiplier;
    --remaining;
  }
}

template <typename Real>
nn::AttentionLayer<Real>* Network<Real>::attention() {
  for (auto& l : layers_)
    if (l->Type() == "attention") return static_cast<nn::AttentionLayer<Real>*>(l.get());
  return nullptr;
}

template <typename Real>
std::vector<std::string> Network<Real>::LayerTypes() const {
  std::vector<std::string> out;
  for (const auto& l : layers_) out.push_back(l->Type());
  return out;
}

namespace {

nlohmann::json MetadataJson(const TrainingMetadata& m) {
  nlohmann::json losses = nlohmann::json::array();
  for (const auto& p : m.loss_history)
    losses.push_back({p.iteration, p.train_loss,
                      std::isnan(p.valid_loss) ? nlohmann::json(nullptr)
                                               : nlohmann::json(p.valid_loss)});
  return {{"iterations", m.iterations}, {"loss_history", losses}};
}

TrainingMetadata MetadataFromJson(const nlohmann::json& j) {
  TrainingMetadata m;
  m.iterations = j.value("iterations", std::size_t{0});
  for (const auto& row : j.value("loss_history", nlohmann::json::array())) {
    LossPoint p;
    p.iteration = row.at(0);
    p.train_loss = row.at(1);
    p.valid_loss = row.at(2).is_null() ? std::nan("") : row.at(2).get<double>();
    m.loss_history.push_back(p);
  }
  return m;
}

}  // namespace

template <typename Real>
void Network<Real>::Save(const std::string& path) const {
  nn::WriteCheckpoint<Real>(path, layers_,
                            {{"kind", "altk-acoustic-model"},
                             {"config", ToJson(config_)},
                             {"metadata", MetadataJson(metadata_)}});
}

template <typename Real>
Network<Real> Network<Real>::Load(const std::string& path) {
  auto ck = nn::ReadCheckpoint<Real>(path);
  if (ck.meta.value("kind", "") != "altk-acoustic-model")
    throw FormatError(path + ": not an acoustic model checkpoint");
  Network net(ModelConfigFromJson(ck.meta.at("config")));
  net.metadata_ = MetadataFromJson(ck.meta.at("metadata"));
  if (ck.layers.size() != net.layers_.size())
    throw FormatError(path + ": layer list does not match its config");
  for (std::size_t i = 0; i < ck.layers.size(); ++i)
    if (ck.layers[i]->Config() != net.layers_[i]->Config())
      throw FormatError(path + ": layer " + std::to_string(i) + " does not match its config");
  net.layers_ = std::move(ck.layers);
  return net;
}

template <typename Real>
template <typename Other>
Network<Other> Network<Real>::Cast() const {
  Network<Other> out(config_);
  out.metadata_ = metadata_;
  auto* self = const_cast<Network*>(this);
  auto src = self->Params();
  auto dst = out.Params();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i]->value = src[i]->value.template Cast<Other>();
    dst[i]->grad = src[i]->grad.template Cast<Other>();
    dst[i]->lr_scale = static_cast<Other>(src[i]->lr_scale);
  }
  auto sb = self->Buffers();
  auto db = out.Buffers();
  for (std::size_t i = 0; i < sb.size(); ++i) *db[i] = sb[i]->template Cast<Other>();
  return out;
}

std::size_t AnalyticParameterCount(const ModelConfig& c) {
  std::size_t n = c.feat_dim * c.input_height + c.input_height;
  std::size_t in_ch = 2;
  for (std::size_t ch : c.conv_channels) {
    n += 9 * in_ch * ch + ch;
    in_ch = ch;
  }
  std::size_t dim = c.FlattenedDim();
  for (const auto& offsets : c.tdnnf_offsets) {
    n += dim * offsets.size() * c.tdnnf_bottleneck;
    n += c.tdnnf_bottleneck * c.tdnnf_hidden + c.tdnnf_hidden;
    dim = c.tdnnf_hidden;
  }
  if (c.attention) {
    const auto& a = *c.attention;
    n += a.num_heads * dim * (2 * a.key_dim + a.value_dim) + a.num_heads * a.value_dim * dim;
  }
  n += dim * c.output_units + c.output_units;
  return n;
}

AcousticModel AverageCheckpoints(const std::vector<const AcousticModel*>& models) {
  if (models.empty()) throw std::invalid_argument("AverageCheckpoints: no models");
  const auto ref = ToJson(models.front()->config());
  for (const auto* m : models)
    if (ToJson(m->config()) != ref)
      throw std::invalid_argument("AverageCheckpoints: models have different configs");
  AcousticModel out(*models.front());
  auto params = out.Params();
  auto buffers = out.Buffers();
  std::vector<std::vector<double>> acc_p(params.size()), acc_b(buffers.size());
  for (std::size_t i = 0; i < params.size(); ++i) acc_p[i].assign(params[i]->value.size(), 0.0);
  for (std::size_t i = 0; i < buffers.size(); ++i) acc_b[i].assign(buffers[i]->size(), 0.0);
  for (const auto* m : models) {
    auto* mm = const_cast<AcousticModel*>(m);
    auto mp = mm->Params();
    auto mb = mm->Buffers();
    for (std::size_t i = 0; i < mp.size(); ++i)
      for (std::size_t k = 0; k < acc_p[i].size(); ++k) acc_p[i][k] += mp[i]->value[k];
    for (std::size_t i = 0; i < mb.size(); ++i)
      for (std::size_t k = 0; k < acc_b[i].size(); ++k) acc_b[i][k] += (*mb[i])[k];
  }
  const double inv = 1.0 / static_cast<double>(models.size());
  for (std::size_t i = 0; i < params.size(); ++i)
    for (std::size_t k = 0; k < acc_p[i].size(); ++k)
      params[i]->value[k] = static_cast<float>(acc_p[i][k] * inv);
  for (std::size_t i = 0; i < buffers.size(); ++i)
    for (std::size_t k = 0; k < acc_b[i].size(); ++k)
      (*buffers[i])[k] = static_cast<float>(acc_b[i][k] * inv);
  out.ZeroGrad();
  return out;
}

template class Network<float>;
template class Network<double>;
template Network<double> Network<float>::Cast<double>() const;
template Network<float> Network<double>::Cast<float>() const;

}  // namespace altk::am
