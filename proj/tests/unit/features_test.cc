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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "altk/features/archive.hpp"
#include "altk/features/features.hpp"
#include "altk/features/wav.hpp"
#include "doctest.h"

using namespace altk::features;
namespace fs = std::filesystem;

namespace {

fs::path TempDir() {
  auto dir = fs::temp_directory_path() / "altk_features_test";
  fs::create_directories(dir);
  return dir;
}

AudioSignal Sine(double hz, std::size_t n, const std::string& utt = "u",
                 const std::string& spk = "s") {
  AudioSignal s;
  s.utterance_id = utt;
  s.speaker_id = spk;
  s.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    s.samples[i] = static_cast<float>(0.5 * std::sin(2 * std::numbers::pi * hz * i / 16000));
  return s;
}

// Hand-assembled RIFF header so malformed variants are easy to produce.
std::string WavBytes(std::uint16_t format, std::uint16_t channels,
                     std::uint32_t data_bytes_claimed,
                     std::uint32_t data_bytes_present) {
  std::string b;
  auto u32 = [&](std::uint32_t v) { for (int i = 0; i < 4; ++i) b.push_back(char(v >> (8 * i))); };
  auto u16 = [&](std::uint16_t v) { for (int i = 0; i < 2; ++i) b.push_back(char(v >> (8 * i))); };
  b += "RIFF";
  u32(36 + data_bytes_claimed);
  b += "WAVEfmt ";
  u32(16);
  u16(format);
  u16(channels);
  u32(16000);
  u32(16000 * 2 * channels);
  u16(2 * channels);
  u16(16);
  b += "data";
  u32(data_bytes_claimed);
  b.append(data_bytes_present, '\0');
  return b;
}

void WriteBytes(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

}  // namespace

TEST_CASE("wav: one second mono round trip") {
  auto path = TempDir() / "one.wav";
  WriteBytes(path, WavBytes(1, 1, 32000, 32000));
  auto sig = LoadWav(path.string());
  CHECK(sig.samples.size() == 16000);
  CHECK(sig.sample_rate == 16000);

  auto sine = Sine(440, 1600);
  WriteWav(path.string(), sine);
  auto back = LoadWav(path.string());
  REQUIRE(back.samples.size() == sine.samples.size());
  for (std::size_t i = 0; i < back.samples.size(); ++i)
    CHECK(std::abs(back.samples[i] - sine.samples[i]) < 1e-4);
}

TEST_CASE("wav: distinct error kinds") {
  auto dir = TempDir();
  auto kind_of = [](const fs::path& p) {
    try {
      LoadWav(p.string());
    } catch (const WavError& e) {
      return e.kind();
    }
    FAIL("expected WavError");
    return WavErrorKind::kMalformedHeader;
  };
  CHECK(kind_of(dir / "does_not_exist.wav") == WavErrorKind::kMissingFile);

  WriteBytes(dir / "stereo.wav", WavBytes(1, 2, 400, 400));
  CHECK(kind_of(dir / "stereo.wav") == WavErrorKind::kChannelsUnsupported);
  CHECK_THROWS_WITH_AS(LoadWav((dir / "stereo.wav").string()),
                       doctest::Contains("channels unsupported"), WavError);

  WriteBytes(dir / "float.wav", WavBytes(3, 1, 400, 400));
  CHECK(kind_of(dir / "float.wav") == WavErrorKind::kUnsupportedCodec);

  WriteBytes(dir / "trunc.wav", WavBytes(1, 1, 32000, 1000));
  CHECK(kind_of(dir / "trunc.wav") == WavErrorKind::kTruncated);
  CHECK_THROWS_WITH_AS(LoadWav((dir / "trunc.wav").string()),
                       doctest::Contains("truncated"), WavError);

  auto header_only = WavBytes(1, 1, 0, 0).substr(0, 20);
  WriteBytes(dir / "short.wav", header_only);
  CHECK(kind_of(dir / "short.wav") == WavErrorKind::kTruncated);
}

TEST_CASE("mel: frame count and dims") {
  FeatureConfig cfg;
  auto mel = MelSpectrogram(Sine(300, 16000), cfg);
  CHECK(mel.frames == 66);
  CHECK(mel.dims == 40);
  CHECK(mel.AllFinite());
  CHECK(mel.kind == FeatureKind::kMelSpec);
  CHECK_THROWS_AS(MelSpectrogram(Sine(300, 399), cfg), std::invalid_argument);
}

TEST_CASE("mel: framing formula on random lengths") {
  // Oracle: count window starts by stepping the hop explicitly.
  FeatureConfig cfg;
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::size_t> len(400, 6000);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = len(rng);
    std::size_t expected = 0;
    for (std::size_t start = 0; start + 400 <= n; start += 240) ++expected;
    CHECK(cfg.NumFrames(n, 16000) == expected);
    if (trial % 8 == 0) CHECK(MelSpectrogram(Sine(500, n), cfg).frames == expected);
  }
}

TEST_CASE("mel: 1 kHz sine peaks at the band centred nearest 1 kHz") {
  // Band centres: equal spacing on 1127 ln(1 + f/700) between 20 Hz and 8 kHz.
  auto mel = [](double f) { return 1127.0 * std::log1p(f / 700.0); };
  auto inv = [](double m) { return 700.0 * std::expm1(m / 1127.0); };
  const double lo = mel(20), hi = mel(8000);
  int nearest = 0;
  double best = 1e9;
  for (int b = 0; b < 40; ++b) {
    const double c = inv(lo + (b + 1) * (hi - lo) / 41);
    if (std::abs(c - 1000) < best) best = std::abs(c - 1000), nearest = b;
  }
  FeatureConfig cfg;
  auto centers = MelBandCenters(cfg, 16000);
  CHECK(centers[nearest] == doctest::Approx(inv(lo + (nearest + 1) * (hi - lo) / 41)));
  auto m = MelSpectrogram(Sine(1000, 16000), cfg);
  for (std::size_t t = 0; t < m.frames; ++t) {
    std::size_t arg = 0;
    for (std::size_t d = 1; d < m.dims; ++d)
      if (m.at(t, d) > m.at(t, arg)) arg = d;
    CHECK(arg == static_cast<std::size_t>(nearest));
  }
}

TEST_CASE("mfcc: dims and stationary deltas") {
  FeatureConfig cfg;
  // A pulse train with an 80-sample period: the hop is a whole number of
  // periods, so every frame sees the same waveform, and the harmonics put
  // energy in every band well above the dither.
  AudioSignal pulses;
  pulses.utterance_id = "p";
  pulses.samples.assign(8000, 0.0f);
  for (std::size_t i = 0; i < 8000; i += 80) pulses.samples[i] = 0.8f;
  auto f = MfccWithDeltas(pulses, cfg);
  CHECK(f.dims == 39);
  CHECK(f.kind == FeatureKind::kMfccDeltas);
  double max_delta = 0;
  for (std::size_t t = 0; t < f.frames; ++t)
    for (std::size_t d = 13; d < 39; ++d) max_delta = std::max(max_delta, double(std::abs(f.at(t, d))));
  CHECK(max_delta < 1e-3);
}

TEST_CASE("deltas: ramp gives the slope") {
  // Hand evaluation on a 5-frame ramp x_t = 2t + 1 with window 2:
  // centre frame: (1*(7-3) + 2*(9-1)) / 10 = 2.
  std::vector<float> x = {1, 3, 5, 7, 9};
  auto d = ComputeDeltas(x, 5, 1, 2);
  CHECK(d[2] == doctest::Approx(2.0));
  // Edge frame 0 with replication: (1*(3-1) + 2*(5-1)) / 10 = 1.
  CHECK(d[0] == doctest::Approx(1.0));
  CHECK(d[4] == doctest::Approx(1.0));
  std::vector<float> ramp(20);
  for (int t = 0; t < 20; ++t) ramp[t] = 0.5f * t;
  auto dr = ComputeDeltas(ramp, 20, 1, 2);
  for (int t = 2; t < 18; ++t) CHECK(dr[t] == doctest::Approx(0.5));
}

TEST_CASE("cmvn: zero mean per speaker and idempotence") {
  FeatureConfig cfg;
  std::vector<FeatureMatrix> feats = {MelSpectrogram(Sine(300, 4000, "a1", "A"), cfg),
                                      MelSpectrogram(Sine(700, 6000, "a2", "A"), cfg),
                                      MelSpectrogram(Sine(900, 5000, "b1", "B"), cfg)};
  auto stats = AccumulateSpeakerStats(feats);
  REQUIRE(stats.size() == 2);
  std::vector<FeatureMatrix> normed;
  for (int i = 0; i < 2; ++i) normed.push_back(ApplyCmvn(feats[i], stats.at("A")));
  auto after = AccumulateSpeakerStats(normed).at("A").Mean();
  for (double m : after) CHECK(std::abs(m) < 1e-5);

  std::vector<FeatureMatrix> twice;
  auto restats = AccumulateSpeakerStats(normed).at("A");
  for (auto& n : normed) twice.push_back(ApplyCmvn(n, restats));
  for (std::size_t i = 0; i < normed.size(); ++i)
    for (std::size_t k = 0; k < normed[i].data.size(); ++k)
      CHECK(std::abs(twice[i].data[k] - normed[i].data[k]) < 1e-5);

  CHECK_THROWS_AS(ApplyCmvn(feats[2], stats.at("A")), std::invalid_argument);
  SpeakerStats empty;
  empty.speaker_id = "A";
  CHECK_THROWS_AS(ApplyCmvn(feats[0], empty), std::invalid_argument);

  FeatureMatrix c;
  c.frames = 4, c.dims = 3, c.speaker_id = "C";
  c.data.assign(12, 2.5f);
  auto cz = ApplyCmvn(c, AccumulateSpeakerStats({c}).at("C"));
  for (float v : cz.data) CHECK(v == 0.0f);
}

TEST_CASE("splice: dims, interior and edges") {
  FeatureMatrix f;
  f.frames = 12, f.dims = 39;
  f.data.resize(12 * 39);
  for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] = float(i);
  auto s = Splice(f);
  CHECK(s.dims == 351);
  CHECK(s.kind == FeatureKind::kSpliced);
  for (int o = -4; o <= 4; ++o)
    for (std::size_t d = 0; d < 39; ++d) {
      CHECK(s.at(6, (o + 4) * 39 + d) == f.at(6 + o, d));
      CHECK(s.at(0, (o + 4) * 39 + d) == f.at(std::max(o, 0), d));
    }
  CHECK(Splice(f, 0, 0).data == f.data);
  FeatureMatrix empty;
  CHECK_THROWS_AS(Splice(empty), std::invalid_argument);
}

TEST_CASE("speed perturbation lengths") {
  auto s = Sine(440, 16000);
  CHECK(SpeedPerturb(s, 1.0).samples == s.samples);
  const auto slow = SpeedPerturb(s, 0.9);
  CHECK(std::llabs(static_cast<long long>(slow.samples.size()) - 17778) <= 1);
  CHECK_THROWS_AS(SpeedPerturb(s, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SpeedPerturb(s, -1.1), std::invalid_argument);
  std::mt19937 rng(3);
  std::uniform_int_distribution<std::size_t> len(100, 30000);
  for (double f : {0.9, 1.1, 0.73, 1.37}) {
    auto x = Sine(300, len(rng));
    auto round_trip = SpeedPerturb(SpeedPerturb(x, f), 1.0 / f);
    CHECK(std::llabs(static_cast<long long>(round_trip.samples.size()) -
                     static_cast<long long>(x.samples.size())) <= 2);
  }
}

TEST_CASE("archive and manifest round trip") {
  auto dir = TempDir();
  FeatureConfig cfg;
  auto a = MelSpectrogram(Sine(300, 4000, "utt_a", "spk1"), cfg);
  auto b = MfccWithDeltas(Sine(600, 3000, "utt_b", "spk2"), cfg);
  {
    ArchiveWriter w((dir / "f.ark").string(), (dir / "f.idx").string());
    w.Write(a);
    w.Write(b);
  }
  ArchiveReader r((dir / "f.ark").string(), (dir / "f.idx").string());
  CHECK(r.keys() == std::vector<std::string>{"utt_a", "utt_b"});
  auto rb = r.Read("utt_b");
  CHECK(rb.data == b.data);
  CHECK(rb.dims == 39);
  CHECK(rb.speaker_id == "spk2");
  CHECK(rb.kind == FeatureKind::kMfccDeltas);
  CHECK(ReadArchive((dir / "f.ark").string()).size() == 2);

  std::ofstream((dir / "bad.ark"), std::ios::binary) << "NOTMAGIC";
  CHECK_THROWS_AS(ReadArchive((dir / "bad.ark").string()), altk::FormatError);

  std::vector<ManifestEntry> m = {{"u1", "a.wav", "s1", "hello there"},
                                  {"u2", "b.wav", "s2", ""}};
  WriteManifest((dir / "m.tsv").string(), m);
  auto back = ReadManifest((dir / "m.tsv").string());
  REQUIRE(back.size() == 2);
  CHECK(back[0].transcript == "hello there");
  CHECK(back[1].speaker_id == "s2");
}
