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
#include <map>
#include <string>
#include <vector>

#include "altk/features/wav.hpp"

namespace altk::features {

struct FeatureConfig {
  double frame_length_ms = 25.0;
  double hop_ms = 15.0;
  int num_mel_banks = 40;
  int num_cepstra = 13;
  double low_freq = 20.0;
  double high_freq = 0.0;  // <= 0 means Nyquist
  double dither = 1e-5;    // uniform noise amplitude added to band energies
  int delta_window = 2;

  void Validate() const;
  std::size_t FrameSamples(int sample_rate) const;
  std::size_t HopSamples(int sample_rate) const;
  // 1 + floor((num_samples - frame) / hop); 0 if shorter than one frame.
  std::size_t NumFrames(std::size_t num_samples, int sample_rate) const;
};

enum class FeatureKind { kMelSpec, kMfcc, kMfccDeltas, kSpliced };
std::string KindName(FeatureKind kind);
FeatureKind KindFromName(const std::string& name);

// frames x dims, row-major.
struct FeatureMatrix {
  std::size_t frames = 0;
  std::size_t dims = 0;
  std::vector<float> data;
  FeatureConfig config;
  std::string speaker_id;
  std::string utterance_id;
  FeatureKind kind = FeatureKind::kMelSpec;

  float& at(std::size_t t, std::size_t d) { return data[t * dims + d]; }
  float at(std::size_t t, std::size_t d) const { return data[t * dims + d]; }
  const float* row(std::size_t t) const { return data.data() + t * dims; }
  bool AllFinite() const;
};

// Center frequency (Hz) of each mel band, low to high.
std::vector<double> MelBandCenters(const FeatureConfig& config, int sample_rate);

// Log mel filterbank energies, num_mel_banks dims. Throws
// std::invalid_argument when the signal is shorter than one frame.
FeatureMatrix MelSpectrogram(const AudioSignal& signal,
                             const FeatureConfig& config);

// num_cepstra static MFCCs (orthonormal DCT-II of the log mel energies, c0
// included) followed by their deltas and delta-deltas.
FeatureMatrix MfccWithDeltas(const AudioSignal& signal,
                             const FeatureConfig& config);

// Regression deltas over +-window frames with edge replication:
//   d_t = sum_n n (x_{t+n} - x_{t-n}) / (2 sum_n n^2)
std::vector<float> ComputeDeltas(const std::vector<float>& x,
                                 std::size_t frames, std::size_t dims,
                                 int window);

struct SpeakerStats {
  std::string speaker_id;
  std::size_t dims = 0;
  std::size_t count = 0;
  std::vector<double> sum, sum_sq;

  std::vector<double> Mean() const;
  std::vector<double> Variance() const;
};

// Accumulates per-speaker statistics over every matrix; matrices must share
// a dimension per speaker.
std::map<std::string, SpeakerStats> AccumulateSpeakerStats(
    const std::vector<FeatureMatrix>& features);

// Subtracts the speaker mean (and divides by the speaker std if
// normalize_variance). Throws on speaker mismatch or empty stats.
FeatureMatrix ApplyCmvn(const FeatureMatrix& features, const SpeakerStats& stats,
                        bool normalize_variance = false);

// Concatenates frames t-left..t+right with edge replication.
FeatureMatrix Splice(const FeatureMatrix& features, int left_context = 4,
                     int right_context = 4);

// Linear-interpolation resampling to round(len / factor) samples; the sample
// rate is left unchanged so tempo and pitch both scale by `factor`.
AudioSignal SpeedPerturb(const AudioSignal& signal, double factor);

}  // namespace altk::features
