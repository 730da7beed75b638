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

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "altk/am/model.hpp"
#include "altk/features/features.hpp"

namespace altk::am {

inline constexpr std::size_t kEmbeddingDim = 40;
inline constexpr std::uint64_t kEmbeddingSeed = 0x5eed0f5eaceULL;

// Stand-in for an i-vector: per-speaker mean and diagonal variance of the
// features, projected to 40 dims by a fixed seeded orthonormal matrix.
struct SpeakerEmbedding {
  std::string speaker_id;
  std::vector<float> vector;
};

// Throws std::invalid_argument on an empty list or inconsistent dims.
SpeakerEmbedding ComputeSpeakerEmbedding(
    const std::vector<const features::FeatureMatrix*>& utterances,
    std::uint64_t seed = kEmbeddingSeed);

// One line per speaker: "<speaker> v1 ... v40".
void WriteEmbeddings(const std::string& path, const std::map<std::string, SpeakerEmbedding>& e);
std::map<std::string, SpeakerEmbedding> ReadEmbeddings(const std::string& path);

// Frame labels: "<utt_id> l1 l2 ...".
using LabelMap = std::map<std::string, std::vector<std::int32_t>>;
void WriteLabels(const std::string& path, const LabelMap& labels);
LabelMap ReadLabels(const std::string& path);

struct Utterance {
  const features::FeatureMatrix* features = nullptr;
  const std::vector<std::int32_t>* labels = nullptr;
  const SpeakerEmbedding* embedding = nullptr;
};

// A span of one utterance. Frames past `valid` are edge-replicated padding.
struct Chunk {
  std::size_t utterance = 0;
  std::size_t start = 0;
  std::size_t size = 0;
  std::size_t valid = 0;
};

// Splits every utterance into consecutive chunks whose nominal sizes cycle
// through `sizes` (the cycle continues across utterances).
std::vector<Chunk> MakeChunks(const std::vector<std::size_t>& lengths,
                              const std::vector<std::size_t>& sizes);

// Network input [1, T, 2*feat_dim] for a whole utterance.
template <typename Real>
nn::Tensor<Real> MakeInput(const features::FeatureMatrix& f, const SpeakerEmbedding& e);

// Per-frame log-posteriors [T, K]. Throws std::invalid_argument for a
// non-melspec input or wrong dims.
nn::Tensor<float> ForwardPosteriors(AcousticModel& model, const features::FeatureMatrix& f,
                                    const SpeakerEmbedding& e);

// Mean per-frame cross-entropy over a set of utterances (inference mode).
double EvaluateLoss(AcousticModel& model, const std::vector<Utterance>& data);

struct TrainResult {
  AcousticModel model;             // average of the last models_to_average iterates
  AcousticModel last;              // final iterate
  std::vector<LossPoint> curve;
  std::vector<AcousticModel> members;  // only with keep_average_members
};

// Frame-level cross-entropy with momentum SGD, exponential learning-rate
// decay, the dropout schedule, periodic semi-orthogonal constraints and final
// iterate averaging. `model` must be initialized. Throws
// std::invalid_argument for an empty training set or a label/frame mismatch.
TrainResult Train(AcousticModel model, const std::vector<Utterance>& train,
                  const std::vector<Utterance>& valid, const TrainConfig& config,
                  const std::function<void(const LossPoint&)>& progress = {});

void WriteLossCsv(const std::string& path, const std::vector<LossPoint>& curve);

}  // namespace altk::am
