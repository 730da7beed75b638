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

#include "altk/decoder/lattice.hpp"
#include "altk/lm/ngram.hpp"
#include "altk/lm/rnnlm.hpp"

namespace altk::decoder {

// Replaces every LM score with `lm`'s, splitting nodes whose incoming paths
// carry different (order-1)-word histories. Acoustic scores are copied
// unchanged. Throws VocabularyError for a word the LM cannot map.
Lattice RescoreNgram(const Lattice& lattice, const lm::NGramModel& lm);

struct RnnlmRescoreOptions {
  double weight = 0.5;          // LM score <- (1-w) * old + w * rnnlm
  double pruning_beam = 8.0;    // drop expanded copies this far below the best copy
  int history_words = 3;        // copies of a node merge when these many words agree
};

// Expands the lattice by recurrent-LM history. Each expanded node keeps the
// recurrent state of its best incoming path.
Lattice RescoreRnnlm(const Lattice& lattice, const lm::RecurrentLM& rnnlm,
                     const RnnlmRescoreOptions& options = {});

}  // namespace altk::decoder
