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

#include "altk/am/train.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "altk/nn/loss.hpp"
#include "altk/util/error.hpp"
#include "altk/util/seed.hpp"

namespace altk::am {
namespace {

// Rows of a kEmbeddingDim x in_dim matrix with orthonormal rows.
std::vector<double> Projection(std::size_t in_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> p(kEmbeddingDim * in_dim);
  for (std::size_t r = 0; r < kEmbeddingDim; ++r) {
    double* row = p.data() + r * in_dim;
    for (std::size_t c = 0; c < in_dim; ++c) row[c] = n(rng);
    for (std::size_t q = 0; q < r; ++q) {
      const double* prev = p.data() + q * in_dim;
      double dot = 0;
      for (std::size_t c = 0; c < in_dim; ++c) dot += row[c] * prev[c];
      for (std::size_t c = 0; c < in_dim; ++c) row[c] -= dot * prev[c];
    }
    double norm = 0;
    for (std::size_t c = 0; c < in_dim; ++c) norm += row[c] * row[c];
    norm = std::sqrt(norm);
    for (std::size_t c = 0; c < in_dim; ++c) row[c] /= norm;
  }
  return p;
}

}  // namespace

SpeakerEmbedding ComputeSpeakerEmbedding(
    const std::vector<const features::FeatureMatrix*>& utterances, std::uint64_t seed) {
  if (utterances.empty()) throw std::invalid_argument("speaker embedding: no utterances");
  const std::size_t dims = utterances.front()->dims;
  if (2 * dims < kEmbeddingDim)
    throw std::invalid_argument("speaker embedding: feature dim too small");
  std::vector<double> sum(dims, 0.0), sum_sq(dims, 0.0);
  std::size_t count = 0;
  for (const auto* f : utterances) {
    if (f->dims != dims) throw std::invalid_argument("speaker embedding: inconsistent dims");
    if (f->speaker_id != utterances.front()->speaker_id)
      throw std::invalid_argument("speaker embedding: utterances from several speakers");
    for (std::size_t t = 0; t < f->frames; ++t)
      for (std::size_t d = 0; d < dims; ++d) {
        const double v = f->at(t, d);
        sum[d] += v;
        sum_sq[d] += v * v;
      }
    count += f->frames;
  }
  if (count == 0) throw std::invalid_argument("speaker embedding: no frames");
  std::vector<double> stats(2 * dims);
  for (std::size_t d = 0; d < dims; ++d) {
    const double mean = sum[d] / count;
    stats[d] = mean;
    stats[dims + d] = std::max(0.0, sum_sq[d] / count - mean * mean);
  }
  const auto p = Projection(2 * dims, seed);
  SpeakerEmbedding e;
  e.speaker_id = utterances.front()->speaker_id;
  e.vector.resize(kEmbeddingDim);
  for (std::size_t r = 0; r < kEmbeddingDim; ++r) {
    double acc = 0;
    for (std::size_t c = 0; c < 2 * dims; ++c) acc += p[r * 2 * dims + c] * stats[c];
    e.vector[r] = static_cast<float>(acc);
  }
  return e;
}

void WriteEmbeddings(const std::string& path, const std::map<std::string, SpeakerEmbedding>& e) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot write");
  out << std::setprecision(9);
  for (const auto& [spk, emb] : e) {
    out << spk;
    for (float v : emb.vector) out << ' ' << v;
    out << '\n';
  }
}

std::map<std::string, SpeakerEmbedding> ReadEmbeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open");
  std::map<std::string, SpeakerEmbedding> out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    std::istringstream ss(line);
    SpeakerEmbedding e;
    if (!(ss >> e.speaker_id)) continue;
    float v;
    while (ss >> v) e.vector.push_back(v);
    if (!ss.eof() || e.vector.size() != kEmbeddingDim)
      throw FormatError(path + ":" + std::to_string(lineno) + ": expected speaker and " +
                        std::to_string(kEmbeddingDim) + " values");
    out[e.speaker_id] = std::move(e);
  }
  return out;
}

void WriteLabels(const std::string& path, const LabelMap& labels) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot write");
  for (const auto& [utt, seq] : labels) {
    out << utt;
    for (auto l : seq) out << ' ' << l;
    out << '\n';
  }
}

LabelMap ReadLabels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open");
  LabelMap out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    std::istringstream ss(line);
    std::string utt;
    if (!(ss >> utt)) continue;
    std::vector<std::int32_t> seq;
    long long v;
    while (ss >> v) {
      if (v < 0 || v > std::numeric_limits<std::int32_t>::max())
        throw FormatError(path + ":" + std::to_string(lineno) + ": bad label");
      seq.push_back(static_cast<std::int32_t>(v));
    }
    if (!ss.eof()) throw FormatError(path + ":" + std::to_string(lineno) + ": bad label");
    if (!out.emplace(utt, std::move(seq)).second)
      throw FormatError(path + ":" + std::to_string(lineno) + ": duplicate utterance " + utt);
  }
  return out;
}

std::vector<Chunk> MakeChunks(const std::vector<std::size_t>& lengths,
                              const std::vector<std::size_t>& sizes) {
  if (sizes.empty()) throw std::invalid_argument("MakeChunks: no chunk sizes");
  std::vector<Chunk> out;
  std::size_t next = 0;
  for (std::size_t u = 0; u < lengths.size(); ++u)
    for (std::size_t start = 0; start < lengths[u];) {
      const std::size_t size = sizes[next++ % sizes.size()];
      const std::size_t valid = std::min(size, lengths[u] - start);
      out.push_back({u, start, size, valid});
      start += valid;
    }
  return out;
}

template <typename Real>
nn::Tensor<Real> MakeInput(const features::FeatureMatrix& f, const SpeakerEmbedding& e) {
  if (f.kind != features::FeatureKind::kMelSpec)
    throw std::invalid_argument("acoustic model input must be melspec features, got " +
                                features::KindName(f.kind));
  if (e.vector.size() != kEmbeddingDim)
    throw std::invalid_argument("speaker embedding must have " + std::to_string(kEmbeddingDim) +
                                " dims");
  const std::size_t d = f.dims, width = d + e.vector.size();
  nn::Tensor<Real> x({1, f.frames, width});
  for (std::size_t t = 0; t < f.frames; ++t) {
    for (std::size_t k = 0; k < d; ++k) x[t * width + k] = f.at(t, k);
    for (std::size_t k = 0; k < e.vector.size(); ++k) x[t * width + d + k] = e.vector[k];
  }
  return x;
}

template nn::Tensor<float> MakeInput<float>(const features::FeatureMatrix&,
                                            const SpeakerEmbedding&);
template nn::Tensor<double> MakeInput<double>(const features::FeatureMatrix&,
                                              const SpeakerEmbedding&);

nn::Tensor<float> ForwardPosteriors(AcousticModel& model, const features::FeatureMatrix& f,
                                    const SpeakerEmbedding& e) {
  if (f.dims != model.config().feat_dim)
    throw std::invalid_argument("acoustic model expects " +
                                std::to_string(model.config().feat_dim) + "-dim features, got " +
                                std::to_string(f.dims));
  auto logits = model.Forward(MakeInput<float>(f, e), nn::Mode::kInference);
  auto out = nn::LogSoftmax(logits);
  out.Reshape({f.frames, model.config().output_units});
  return out;
}

namespace {

void CheckUtterance(const Utterance& u, std::size_t k) {
  if (!u.features || !u.labels || !u.embedding)
    throw std::invalid_argument("training utterance with missing parts");
  if (u.labels->size() != u.features->frames)
    throw std::invalid_argument("utterance " + u.features->utterance_id + " has " +
                                std::to_string(u.features->frames) + " frames but " +
                                std::to_string(u.labels->size()) + " labels");
  for (auto l : *u.labels)
    if (l < 0 || static_cast<std::size_t>(l) >= k)
      throw std::invalid_argument("utterance " + u.features->utterance_id + ": label " +
                                  std::to_string(l) + " outside [0, " + std::to_string(k) + ")");
}

}  // namespace

double EvaluateLoss(AcousticModel& model, const std::vector<Utterance>& data) {
  double total = 0;
  std::size_t frames = 0;
  for (const auto& u : data) {
    CheckUtterance(u, model.config().output_units);
    auto logits = model.Forward(MakeInput<float>(*u.features, *u.embedding), nn::Mode::kInference);
    auto r = nn::LogSoftmaxXent<float>(logits, *u.labels);
    total += r.loss * static_cast<double>(r.frames);
    frames += r.frames;
  }
  return frames ? total / static_cast<double>(frames) : std::nan("");
}

TrainResult Train(AcousticModel model, const std::vector<Utterance>& train,
                  const std::vector<Utterance>& valid, const TrainConfig& config,
                  const std::function<void(const LossPoint&)>& progress) {
  config.Validate();
  if (train.empty()) throw std::invalid_argument("Train: empty training set");
  const std::size_t k = model.config().output_units;
  const std::size_t width = 2 * model.config().feat_dim;
  std::vector<std::size_t> lengths;
  for (const auto& u : train) {
    CheckUtterance(u, k);
    lengths.push_back(u.features->frames);
  }
  for (const auto& u : valid) CheckUtterance(u, k);
  std::vector<Utterance> valid_subset = valid;
  if (config.max_valid_utterances && valid_subset.size() > config.max_valid_utterances)
    valid_subset.resize(config.max_valid_utterances);

  const auto chunks = MakeChunks(lengths, config.chunk_sizes);
  std::map<std::size_t, std::vector<std::size_t>> by_size;
  for (std::size_t i = 0; i < chunks.size(); ++i) by_size[chunks[i].size].push_back(i);
  std::size_t per_epoch = 0;
  for (const auto& [size, ids] : by_size)
    per_epoch += (ids.size() + config.minibatch_size - 1) / config.minibatch_size;
  const std::size_t total = per_epoch * config.epochs;

  model.SetFinalLayerLrScale(static_cast<float>(config.final_layer_lr_multiplier));
  auto params = model.Params();
  std::vector<std::vector<float>> velocity;
  for (auto* p : params) velocity.emplace_back(p->value.size(), 0.0f);

  std::mt19937_64 rng(SubSeed(config.seed, "am/shuffle"));
  std::deque<AcousticModel> recent;
  TrainResult result;
  std::size_t iter = 0;
  double loss_acc = 0;
  std::size_t loss_count = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    struct Batch {
      std::size_t size;
      std::vector<std::size_t> ids;
    };
    std::vector<Batch> batches;
    for (auto& [size, ids] : by_size) {
      std::shuffle(ids.begin(), ids.end(), rng);
      for (std::size_t i = 0; i < ids.size(); i += config.minibatch_size)
        batches.push_back({size, std::vector<std::size_t>(
                                     ids.begin() + i,
                                     ids.begin() + std::min(ids.size(), i + config.minibatch_size))});
    }
    std::shuffle(batches.begin(), batches.end(), rng);

    for (const auto& batch : batches) {
      model.SetDropout(TrainConfig::DropoutRate(static_cast<double>(iter) / total,
                                                model.config().dropout_max));
      const std::size_t b = batch.ids.size(), s = batch.size;
      nn::Tensor<float> x({b, s, width});
      std::vector<std::int32_t> targets(b * s, -1);
      for (std::size_t i = 0; i < b; ++i) {
        const Chunk& c = chunks[batch.ids[i]];
        const Utterance& u = train[c.utterance];
        const std::size_t d = u.features->dims;
        for (std::size_t t = 0; t < s; ++t) {
          const std::size_t src = c.start + std::min(t, c.valid - 1);
          float* row = x.data() + (i * s + t) * width;
          std::copy(u.features->row(src), u.features->row(src) + d, row);
          std::copy(u.embedding->vector.begin(), u.embedding->vector.end(), row + d);
          if (t < c.valid) targets[i * s + t] = (*u.labels)[src];
        }
      }
      auto logits = model.Forward(x, nn::Mode::kTrain);
      auto xent = nn::LogSoftmaxXent<float>(logits, targets);
      model.ZeroGrad();
      model.Backward(xent.grad);

      double scale = 1.0;
      if (config.max_grad_norm > 0) {
        double sq = 0;
        for (auto* p : params)
          for (float g : p->grad.vec()) sq += static_cast<double>(g) * g;
        const double norm = std::sqrt(sq);
        if (norm > config.max_grad_norm) scale = config.max_grad_norm / norm;
      }
      const double lr = config.LearningRate(iter + 1, total);
      for (std::size_t pi = 0; pi < params.size(); ++pi) {
        auto* p = params[pi];
        const float step = static_cast<float>(lr * scale * p->lr_scale);
        const float mu = static_cast<float>(config.momentum);
        float* v = velocity[pi].data();
        float* w = p->value.data();
        const float* g = p->grad.data();
        for (std::size_t e = 0; e < p->value.size(); ++e) {
          v[e] = mu * v[e] - step * g[e];
          w[e] += v[e];
        }
      }
      ++iter;
      if (iter % config.constraint_interval == 0) model.ConstrainTdnnf();
      loss_acc += xent.loss;
      ++loss_count;

      if (iter % config.valid_interval == 0 || iter == total) {
        LossPoint pt;
        pt.iteration = iter;
        pt.train_loss = loss_acc / loss_count;
        pt.valid_loss = valid_subset.empty() ? std::nan("") : EvaluateLoss(model, valid_subset);
        loss_acc = 0;
        loss_count = 0;
        result.curve.push_back(pt);
        if (progress) progress(pt);
      }
      if (total - iter < config.models_to_average) recent.push_back(model);
    }
  }

  std::vector<const AcousticModel*> ptrs;
  for (const auto& m : recent) ptrs.push_back(&m);
  result.model = AverageCheckpoints(ptrs);
  result.model.SetDropout(0.0);
  result.model.metadata().iterations = total;
  result.model.metadata().loss_history = result.curve;
  if (config.keep_average_members) result.members.assign(recent.begin(), recent.end());
  result.last = std::move(model);
  result.last.SetDropout(0.0);
  result.last.metadata() = result.model.metadata();
  return result;
}

void WriteLossCsv(const std::string& path, const std::vector<LossPoint>& curve) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot write");
  out << "iteration,train_loss,valid_loss\n" << std::setprecision(8);
  for (const auto& p : curve) {
    out << p.iteration << ',' << p.train_loss << ',';
    if (!std::isnan(p.valid_loss)) out << p.valid_loss;
    out << '\n';
  }
}

}  // namespace altk::am
