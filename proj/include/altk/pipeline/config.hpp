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

#include "altk/am/config.hpp"
#include "altk/decoder/decoder.hpp"
#include "altk/decoder/rescore.hpp"
#include "altk/lm/rnnlm.hpp"
#include "altk/synth/synth.hpp"

namespace altk::pipeline {

struct LmSettings {
  int first_pass_order = 3;
  int rescore_order = 4;
  bool unk = true;     // also build the *_unk variants
  bool rnnlm = true;   // also rescore with the recurrent LM
  double unk_continuation = 0.5;
  lm::RnnlmConfig rnnlm_config;
  decoder::RnnlmRescoreOptions rnnlm_rescore;
};

struct RunConfig {
  std::string output_dir = "altk_run";
  std::uint64_t seed = 1;
  int jobs = 0;  // 0: OpenMP default

  synth::SynthSpec synth;  // synth.features is the feature config
  std::vector<double> speed_factors = {0.9, 1.0, 1.1};

  // Models trained by train-am and run-all; the first one fills results.csv.
  std::vector<std::string> models = {"ctdnn_sa", "ctdnn"};
  bool desk_scale = true;
  nn::AttentionContext attention = am::DeskAttention();
  am::TrainConfig train = am::TrainConfig::Desk();

  LmSettings lm;
  decoder::DecodeParams decode;

  // Model config for "ctdnn" or "ctdnn_sa" with K outputs.
  am::ModelConfig ModelFor(const std::string& name, std::size_t output_units) const;
  void Validate() const;
};

// INI-style text: "[section]" headers, "key = value" lines, '#' or ';'
// comments. Unknown sections or keys and unparsable values throw
// ConfigError naming the source, line and key.
RunConfig ParseRunConfig(const std::string& text, const std::string& source = "<config>");
RunConfig LoadRunConfig(const std::string& path);

// The full default configuration in the same format, with every key.
std::string DefaultConfigText();

}  // namespace altk::pipeline
