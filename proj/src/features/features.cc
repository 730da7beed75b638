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

#include "altk/features/features.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "altk/util/seed.hpp"

namespace altk::features {
namespace {

double HzToMel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

std::size_t FftSize(std::size_t frame) {
  std::size_t n = 1;
  while (n < frame) n <<= 1;
  return n;
}

// FFTW planning is not thread-safe; execution with new-array APIs is.
class FftPlans {
 public:
  static FftPlans& Get() {
    static FftPlans plans;
    return plans;
  }
  fftw_plan PlanFor(std::size_t n) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<double> in(n);
    fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(out);
    plans_.emplace(n, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::unordered_map<std::size_t, fftw_plan> plans_;
};

// Triangular filters in the mel domain, one row of FFT-bin weights per band.
struct MelBank {
  std::vector<std::size_t> first_bin;
  std::vector<std::vector<double>> weights;
};

MelBank MakeMelBank(const FeatureConfig& cfg, int sample_rate,
                    std::size_t fft_size) {
  const double nyquist = sample_rate / 2.0;
  const double high = cfg.high_freq > 0 ? std::min(cfg.high_freq, nyquist) : nyquist;
  const double mel_lo = HzToMel(cfg.low_freq), mel_hi = HzToMel(high);
  const int n = cfg.num_mel_banks;
  const double step = (mel_hi - mel_lo) / (n + 1);
  MelBank bank;
  const std::size_t bins = fft_size / 2 + 1;
  for (int b = 0; b < n; ++b) {
    const double left = mel_lo + b * step, center = left + step,
                 right = center + step;
    std::vector<double> row;
    std::size_t first = bins;
    for (std::size_t k = 0; k < bins; ++k) {
      const double mel = HzToMel(static_cast<double>(k) * sample_rate / fft_size);
      double w = 0;
      if (mel > left && mel < right)
        w = mel <= center ? (mel - left) / step : (right - mel) / step;
      if (w > 0) {
        if (first == bins) first = k;
        row.resize(k - first + 1, 0.0);
        row[k - first] = w;
      }
    }
    bank.first_bin.push_back(first == bins ? 0 : first);
    bank.weights.push_back(std::move(row));
  }
  return bank;
}

void CheckSignal(const AudioSignal& signal, const FeatureConfig& config) {
  config.Validate();
  ValidateSignal(signal);
  if (signal.samples.size() < config.FrameSamples(signal.sample_rate))
    throw std::invalid_argument(
        "features: signal " + signal.utterance_id + " shorter than one frame (" +
        std::to_string(signal.samples.size()) + " samples)");
}

}  // namespace

void FeatureConfig::Validate() const {
  if (!(frame_length_ms > hop_ms && hop_ms > 0))
    throw std::invalid_argument("features: need frame_length_ms > hop_ms > 0");
  if (num_mel_banks < num_cepstra || num_cepstra <= 0)
    throw std::invalid_argument("features: need num_mel_banks >= num_cepstra > 0");
  if (delta_window < 1) throw std::invalid_argument("features: delta_window < 1");
}

std::size_t FeatureConfig::FrameSamples(int sample_rate) const {
  return static_cast<std::size_t>(std::lround(sample_rate * frame_length_ms / 1000.0));
}

std::size_t FeatureConfig::HopSamples(int sample_rate) const {
  return static_cast<std::size_t>(std::lround(sample_rate * hop_ms / 1000.0));
}

std::size_t FeatureConfig::NumFrames(std::size_t num_samples,
                                     int sample_rate) const {
  const std::size_t frame = FrameSamples(sample_rate);
  if (num_samples < frame) return 0;
  return 1 + (num_samples - frame) / HopSamples(sample_rate);
}

std::string KindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kMelSpec: return "melspec";
    case FeatureKind::kMfcc: return "mfcc";
    case FeatureKind::kMfccDeltas: return "mfcc+deltas";
    case FeatureKind::kSpliced: return "spliced";
  }
  return "unknown";
}

FeatureKind KindFromName(const std::string& name) {
  for (auto k : {FeatureKind::kMelSpec, FeatureKind::kMfcc,
                 FeatureKind::kMfccDeltas, FeatureKind::kSpliced})
    if (KindName(k) == name) return k;
  throw std::invalid_argument("unknown feature kind '" + name + "'");
}

bool FeatureMatrix::AllFinite() const {
  return std::all_of(data.begin(), data.end(),
                     [](float v) { return std::isfinite(v); });
}

std::vector<double> MelBandCenters(const FeatureConfig& config,
                                   int sample_rate) {
  const double nyquist = sample_rate / 2.0;
  const double high =
      config.high_freq > 0 ? std::min(config.high_freq, nyquist) : nyquist;
  const double mel_lo = HzToMel(config.low_freq), mel_hi = HzToMel(high);
  const double step = (mel_hi - mel_lo) / (config.num_mel_banks + 1);
  std::vector<double> centers;
  for (int b = 0; b < config.num_mel_banks; ++b)
    centers.push_back(MelToHz(mel_lo + (b + 1) * step));
  return centers;
}

FeatureMatrix MelSpectrogram(const AudioSignal& signal,
                             const FeatureConfig& config) {
  CheckSignal(signal, config);
  const int sr = signal.sample_rate;
  const std::size_t frame = config.FrameSamples(sr), hop = config.HopSamples(sr);
  const std::size_t frames = config.NumFrames(signal.samples.size(), sr);
  const std::size_t fft_size = FftSize(frame);
  const MelBank bank = MakeMelBank(config, sr, fft_size);
  fftw_plan plan = FftPlans::Get().PlanFor(fft_size);

  std::vector<double> window(frame);
  for (std::size_t i = 0; i < frame; ++i)
    window[i] = 0.54 - 0.46 * std::cos(2 * std::numbers::pi * i / (frame - 1));

  FeatureMatrix out;
  out.frames = frames;
  out.dims = static_cast<std::size_t>(config.num_mel_banks);
  out.data.resize(frames * out.dims);
  out.config = config;
  out.speaker_id = signal.speaker_id;
  out.utterance_id = signal.utterance_id;
  out.kind = FeatureKind::kMelSpec;

  std::mt19937_64 rng(SubSeed(HashString(signal.utterance_id), "dither"));
  std::uniform_real_distribution<double> noise(0.0, config.dither);
  std::vector<double> buf(fft_size);
  fftw_complex* spec = fftw_alloc_complex(fft_size / 2 + 1);
  std::vector<double> power(fft_size / 2 + 1);
  for (std::size_t t = 0; t < frames; ++t) {
    const float* s = signal.samples.data() + t * hop;
    double mean = 0;
    for (std::size_t i = 0; i < frame; ++i) mean += s[i];
    mean /= frame;
    std::fill(buf.begin(), buf.end(), 0.0);
    for (std::size_t i = 0; i < frame; ++i) buf[i] = (s[i] - mean) * window[i];
    fftw_execute_dft_r2c(plan, buf.data(), spec);
    for (std::size_t k = 0; k < power.size(); ++k)
      power[k] = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
    for (std::size_t b = 0; b < out.dims; ++b) {
      double e = 0;
      const auto& w = bank.weights[b];
      for (std::size_t j = 0; j < w.size(); ++j) e += w[j] * power[bank.first_bin[b] + j];
      const double jitter = config.dither > 0 ? noise(rng) : 0.0;
      out.data[t * out.dims + b] =
          static_cast<float>(std::log(std::max(e + jitter, 1e-30)));
    }
  }
  fftw_free(spec);
  return out;
}

std::vector<float> ComputeDeltas(const std::vector<float>& x,
                                 std::size_t frames, std::size_t dims,
                                 int window) {
  std::vector<float> d(frames * dims, 0.0f);
  double norm = 0;
  for (int n = 1; n <= window; ++n) norm += n * n;
  norm *= 2;
  const long last = static_cast<long>(frames) - 1;
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t j = 0; j < dims; ++j) {
      double acc = 0;
      for (int n = 1; n <= window; ++n) {
        const long ahead = std::min<long>(static_cast<long>(t) + n, last);
        const long behind = std::max<long>(static_cast<long>(t) - n, 0);
        acc += n * (static_cast<double>(x[ahead * dims + j]) - x[behind * dims + j]);
      }
      d[t * dims + j] = static_cast<float>(acc / norm);
    }
  return d;
}

FeatureMatrix MfccWithDeltas(const AudioSignal& signal,
                             const FeatureConfig& config) {
  FeatureMatrix mel = MelSpectrogram(signal, config);
  const std::size_t nb = mel.dims, nc = static_cast<std::size_t>(config.num_cepstra);
  std::vector<float> ceps(mel.frames * nc);
  for (std::size_t t = 0; t < mel.frames; ++t)
    for (std::size_t k = 0; k < nc; ++k) {
      double acc = 0;
      for (std::size_t n = 0; n < nb; ++n)
        acc += mel.data[t * nb + n] *
               std::cos(std::numbers::pi * k * (n + 0.5) / nb);
      acc *= std::sqrt((k == 0 ? 1.0 : 2.0) / nb);
      ceps[t * nc + k] = static_cast<float>(acc);
    }
  const auto d1 = ComputeDeltas(ceps, mel.frames, nc, config.delta_window);
  const auto d2 = ComputeDeltas(d1, mel.frames, nc, config.delta_window);
  FeatureMatrix out = mel;
  out.dims = 3 * nc;
  out.kind = FeatureKind::kMfccDeltas;
  out.data.assign(mel.frames * out.dims, 0.0f);
  for (std::size_t t = 0; t < mel.frames; ++t)
    for (std::size_t k = 0; k < nc; ++k) {
      out.data[t * out.dims + k] = ceps[t * nc + k];
      out.data[t * out.dims + nc + k] = d1[t * nc + k];
      out.data[t * out.dims + 2 * nc + k] = d2[t * nc + k];
    }
  return out;
}

std::vector<double> SpeakerStats::Mean() const {
  std::vector<double> m(dims);
  for (std::size_t d = 0; d < dims; ++d) m[d] = sum[d] / count;
  return m;
}

std::vector<double> SpeakerStats::Variance() const {
  std::vector<double> v(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    const double mean = sum[d] / count;
    v[d] = std::max(0.0, sum_sq[d] / count - mean * mean);
  }
  return v;
}

std::map<std::string, SpeakerStats> AccumulateSpeakerStats(
    const std::vector<FeatureMatrix>& features) {
  std::map<std::string, SpeakerStats> stats;
  for (const auto& f : features) {
    auto& s = stats[f.speaker_id];
    if (s.count == 0 && s.dims == 0) {
      s.speaker_id = f.speaker_id;
      s.dims = f.dims;
      s.sum.assign(f.dims, 0.0);
      s.sum_sq.assign(f.dims, 0.0);
    } else if (s.dims != f.dims) {
      throw std::invalid_argument("cmvn: speaker " + f.speaker_id +
                                  " has matrices of different dims");
    }
    for (std::size_t t = 0; t < f.frames; ++t)
      for (std::size_t d = 0; d < f.dims; ++d) {
        const double v = f.at(t, d);
        s.sum[d] += v;
        s.sum_sq[d] += v * v;
      }
    s.count += f.frames;
  }
  return stats;
}

FeatureMatrix ApplyCmvn(const FeatureMatrix& features, const SpeakerStats& stats,
                        bool normalize_variance) {
  if (stats.speaker_id != features.speaker_id)
    throw std::invalid_argument("cmvn: stats for speaker '" + stats.speaker_id +
                                "' applied to speaker '" + features.speaker_id +
                                "'");
  if (stats.count == 0) throw std::invalid_argument("cmvn: empty stats");
  if (stats.dims != features.dims)
    throw std::invalid_argument("cmvn: dimension mismatch");
  const auto mean = stats.Mean();
  std::vector<double> scale(stats.dims, 1.0);
  if (normalize_variance) {
    const auto var = stats.Variance();
    for (std::size_t d = 0; d < stats.dims; ++d)
      scale[d] = 1.0 / std::sqrt(std::max(var[d], 1e-10));
  }
  FeatureMatrix out = features;
  for (std::size_t t = 0; t < out.frames; ++t)
    for (std::size_t d = 0; d < out.dims; ++d)
      out.at(t, d) = static_cast<float>((features.at(t, d) - mean[d]) * scale[d]);
  return out;
}

FeatureMatrix Splice(const FeatureMatrix& features, int left_context,
                     int right_context) {
  if (features.frames == 0) throw std::invalid_argument("splice: empty input");
  if (left_context < 0 || right_context < 0)
    throw std::invalid_argument("splice: negative context");
  const std::size_t width = left_context + right_context + 1;
  FeatureMatrix out = features;
  out.dims = features.dims * width;
  out.kind = FeatureKind::kSpliced;
  out.data.resize(features.frames * out.dims);
  const long last = static_cast<long>(features.frames) - 1;
  for (std::size_t t = 0; t < features.frames; ++t)
    for (int o = -left_context; o <= right_context; ++o) {
      const long src = std::clamp<long>(static_cast<long>(t) + o, 0, last);
      std::copy(features.row(src), features.row(src) + features.dims,
                out.data.begin() + t * out.dims + (o + left_context) * features.dims);
    }
  return out;
}

AudioSignal SpeedPerturb(const AudioSignal& signal, double factor) {
  if (!(factor > 0)) throw std::invalid_argument("speed_perturb: factor must be > 0");
  AudioSignal out = signal;
  if (factor == 1.0) return out;
  const std::size_t n = signal.samples.size();
  const auto m = static_cast<std::size_t>(std::llround(n / factor));
  out.samples.assign(m, 0.0f);
  if (n == 0) return out;
  for (std::size_t i = 0; i < m; ++i) {
    const double pos = i * factor;
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= n) {
      out.samples[i] = signal.samples[n - 1];
      continue;
    }
    const double frac = pos - lo;
    out.samples[i] = static_cast<float>((1 - frac) * signal.samples[lo] +
                                        frac * signal.samples[lo + 1]);
  }
  return out;
}

}  // namespace altk::features
