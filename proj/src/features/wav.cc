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

#include "altk/features/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace altk::features {
namespace {

std::uint32_t ReadU32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (std::uint32_t(p[3]) << 24);
}
std::uint16_t ReadU16(const unsigned char* p) { return p[0] | (p[1] << 8); }

void PutU32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void PutU16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}

}  // namespace

void ValidateSignal(const AudioSignal& signal) {
  if (signal.sample_rate <= 0)
    throw std::invalid_argument("audio: sample rate must be positive");
  for (float s : signal.samples)
    if (!std::isfinite(s))
      throw std::invalid_argument("audio: non-finite sample in " +
                                  signal.utterance_id);
}

AudioSignal LoadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WavError(WavErrorKind::kMissingFile, path + ": cannot open");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12)
    throw WavError(WavErrorKind::kTruncated, path + ": truncated header");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw WavError(WavErrorKind::kMalformedHeader, path + ": not RIFF/WAVE");

  bool have_fmt = false;
  int channels = 0, sample_rate = 0, bits = 0;
  std::size_t pos = 12;
  while (true) {
    if (pos + 8 > bytes.size())
      throw WavError(WavErrorKind::kTruncated,
                     path + ": truncated header (no data chunk)");
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = ReadU32(chunk + 4);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (pos + 8 + 16 > bytes.size())
        throw WavError(WavErrorKind::kTruncated,
                       path + ": truncated header (fmt chunk)");
      if (size < 16)
        throw WavError(WavErrorKind::kMalformedHeader, path + ": short fmt chunk");
      const std::uint16_t format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      sample_rate = static_cast<int>(ReadU32(chunk + 12));
      bits = ReadU16(chunk + 22);
      if (format != 1 || bits != 16)
        throw WavError(WavErrorKind::kUnsupportedCodec,
                       path + ": unsupported codec (format " +
                           std::to_string(format) + ", " +
                           std::to_string(bits) + " bits); need 16-bit PCM");
      if (channels != 1)
        throw WavError(WavErrorKind::kChannelsUnsupported,
                       path + ": channels unsupported (" +
                           std::to_string(channels) + "), need mono");
      if (sample_rate <= 0)
        throw WavError(WavErrorKind::kMalformedHeader, path + ": bad sample rate");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt)
        throw WavError(WavErrorKind::kMalformedHeader,
                       path + ": data chunk before fmt chunk");
      const std::size_t available = bytes.size() - (pos + 8);
      if (size > available)
        throw WavError(WavErrorKind::kTruncated,
                       path + ": truncated (header claims " +
                           std::to_string(size) + " data bytes, " +
                           std::to_string(available) + " present)");
      AudioSignal sig;
      sig.sample_rate = sample_rate;
      sig.samples.resize(size / 2);
      const unsigned char* data = chunk + 8;
      for (std::size_t i = 0; i < sig.samples.size(); ++i) {
        const auto v = static_cast<std::int16_t>(ReadU16(data + 2 * i));
        sig.samples[i] = static_cast<float>(v) / 32768.0f;
      }
      return sig;
    }
    pos += 8 + size + (size & 1);
  }
}

void WriteWav(const std::string& path, const AudioSignal& signal) {
  ValidateSignal(signal);
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(signal.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutU32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  PutU32(out, 16);
  PutU16(out, 1);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(signal.sample_rate));
  PutU32(out, static_cast<std::uint32_t>(signal.sample_rate * 2));
  PutU16(out, 2);
  PutU16(out, 16);
  out += "data";
  PutU32(out, data_bytes);
  for (float s : signal.samples) {
    const float c = std::clamp(s, -1.0f, 1.0f);
    const long v = std::lround(c * 32767.0f);
    PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(path + ": cannot write");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

}  // namespace altk::features
