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
#include <unordered_map>
#include <vector>

#include "altk/lm/ngram.hpp"

namespace altk::lm {

struct RnnlmConfig {
  int dim = 64;  // embedding and recurrent state (embeddings are tied)
  int epochs = 15;
  double learning_rate = 0.01;  // Adam
  int bptt = 16;                // steps of backpropagation through time
  double clip = 5.0;            // per-sentence gradient norm clip
  std::uint64_t seed = 1;
};

// Single tanh recurrent layer with tied input/output embeddings:
//   P(w | h) = softmax(h E^T + c)[w],   h' = tanh(E[w] Wx + h Wh + b)
// The start-of-sentence context is the zero state.
class RecurrentLM {
 public:
  using State = std::vector<double>;

  struct Params {
    std::vector<double> embed;   // V x d
    std::vector<double> w_in;    // d x d
    std::vector<double> w_rec;   // d x d
    std::vector<double> bias;    // d
    std::vector<double> out_bias;  // V

    void Resize(std::size_t vocab, std::size_t dim);
    void Zero();
    std::vector<std::vector<double>*> Tensors();
  };

  struct StepResult {
    double logp;
    State next;
  };

  RecurrentLM() = default;
  // Vocabulary: </s>, <unk>, then `words` (sorted, deduplicated).
  RecurrentLM(const std::vector<std::string>& words, int dim, std::uint64_t seed);

  int dim() const { return dim_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  WordId eos() const { return 0; }
  WordId unk() const { return 1; }
  WordId IdOrUnk(const std::string& word) const;

  State InitialState() const { return State(dim_, 0.0); }
  // Log-distribution over the vocabulary for the next word.
  std::vector<double> LogDistribution(const State& state) const;
  StepResult Step(const State& state, WordId word) const;
  double SentenceLogProb(const Sentence& words) const;

  // Negative log-likelihood of `ids` followed by </s>, and its gradient
  // accumulated into `grad` (which must be sized like params()).
  double LossAndGradient(const std::vector<WordId>& ids, int bptt,
                         Params* grad) const;

  Params& params() { return params_; }
  const Params& params() const { return params_; }

  void Save(const std::string& path) const;
  static RecurrentLM Load(const std::string& path);

 private:
  void IndexVocab();

  int dim_ = 0;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, WordId> ids_;
  Params params_;
};

double Perplexity(const RecurrentLM& model, const TextCorpus& corpus);

struct RnnlmTrainResult {
  RecurrentLM model;  // parameters from the epoch with the best held-out perplexity
  std::vector<double> train_perplexity;
  std::vector<double> heldout_perplexity;
};

RnnlmTrainResult TrainRnnlm(const TextCorpus& train, const TextCorpus& heldout,
                            const RnnlmConfig& config);

}  // namespace altk::lm
