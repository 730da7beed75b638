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

#include <cstddef>
#include <vector>

#include "altk/decoder/graph.hpp"
#include "altk/decoder/lattice.hpp"

namespace altk::decoder {

struct DecodeParams {
  double beam = 16.0;
  double lattice_beam = 8.0;
  double acoustic_scale = 1.0;
  double word_insertion_penalty = 0.0;
  int max_active_tokens = 10000;

  void Validate() const;
};

// Frame-level acoustic log-scores, frames x num_phones row-major (the AM's
// log-posteriors).
struct ScoreMatrix {
  std::size_t frames = 0;
  std::size_t num_phones = 0;
  std::vector<float> data;

  float at(std::size_t t, std::size_t k) const { return data[t * num_phones + k]; }
};

struct DecodeResult {
  Hypothesis hypothesis;  // always equal to BestPath(lattice)
  Lattice lattice;
  std::size_t max_tokens = 0;  // peak active tokens, for diagnostics
};

// Token passing over the lexicon tree with the graph's n-gram applied at
// word ends. Every word arc may absorb trailing silence; the first arc may
// also absorb leading silence. The <unk> loop's pronunciation log-prob is
// folded into the arc's acoustic score (divided by acoustic_scale) so that
// LM rescoring leaves it in place.
DecodeResult Decode(const ScoreMatrix& scores, const DecodeGraph& graph,
                    const DecodeParams& params);

}  // namespace altk::decoder
