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
#include <string>
#include <vector>

#include "altk/util/error.hpp"

namespace altk::features {

struct AudioSignal {
  std::vector<float> samples;  // in [-1, 1]
  int sample_rate = 16000;
  std::string speaker_id;
  std::string utterance_id;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class WavErrorKind {
  kMissingFile,
  kMalformedHeader,
  kUnsupportedCodec,
  kChannelsUnsupported,
  kTruncated,
};

class WavError : public FormatError {
 public:
  WavError(WavErrorKind kind, const std::string& msg)
      : FormatError(msg), kind_(kind) {}
  WavErrorKind kind() const { return kind_; }

 private:
  WavErrorKind kind_;
};

// RIFF/WAVE, PCM 16-bit, mono only.
AudioSignal LoadWav(const std::string& path);

// Writes 16-bit PCM mono; samples are clipped to [-1, 1].
void WriteWav(const std::string& path, const AudioSignal& signal);

// Throws std::invalid_argument when sample_rate <= 0 or a sample is not finite.
void ValidateSignal(const AudioSignal& signal);

}  // namespace altk::features
