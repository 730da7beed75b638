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

#include <functional>
#include <string>
#include <vector>

#include "altk/pipeline/config.hpp"

namespace altk::pipeline {

// Run-directory layout, all relative to RunConfig::output_dir:
//   data/                      synthetic corpus (wav, manifests, lexicon, LM text)
//   features/<split>.{ark,idx}, <split>_labels.txt, <split>_embeddings.txt
//   am/<model>/final.mdl, loss.csv
//   lm/3g.arpa, 3g_unk.arpa, 4g.arpa, 4g_unk.arpa, rnnlm.json
//   decode/<model>/<split>/<LM>.lats, <LM>_<rescore>.hyp
//   decode/<model>/results.csv and results.csv (first model)
//   analysis/<model>/attention*.{csv,svg,txt}, analysis/params.csv
//   manifests/<stage>.txt      files produced by each stage
//
// Every stage checks its inputs first and throws altk::Error naming the
// missing file. Files are written through a temporary and renamed.

using Log = std::function<void(const std::string&)>;

std::vector<std::string> RunSynth(const RunConfig& config, const Log& log = {});
std::vector<std::string> RunFeatures(const RunConfig& config, const Log& log = {});
std::vector<std::string> RunTrainAm(const RunConfig& config, const Log& log = {});
std::vector<std::string> RunTrainLm(const RunConfig& config, const Log& log = {});
std::vector<std::string> RunDecode(const RunConfig& config, const Log& log = {});
std::vector<std::string> RunRescore(const RunConfig& config, const Log& log = {});
std::vector<std::string> RunScore(const RunConfig& config, const Log& log = {});
std::vector<std::string> RunAnalyzeAttention(const RunConfig& config, const Log& log = {});
std::vector<std::string> RunParamsReport(const RunConfig& config, const Log& log = {});
// All of the above in order.
std::vector<std::string> RunAll(const RunConfig& config, const Log& log = {});

// Rows of results.csv in order: 3G, 3G_unk, 4G, 4G_unk (the _unk rows only
// with lm.unk; the orders follow the LM settings).
std::vector<std::string> LmKeys(const RunConfig& config);

}  // namespace altk::pipeline
