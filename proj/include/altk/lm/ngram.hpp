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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "altk/lexicon/lexicon.hpp"

namespace altk::lm {

using WordId = std::int32_t;
using Sentence = std::vector<std::string>;

inline constexpr const char* kBos = "<s>";
inline constexpr const char* kEos = "</s>";

struct TextCorpus {
  std::vector<Sentence> sentences;
  std::size_t NumWords() const;
};

// One sentence per line, normalized like the scorer does; blank lines skipped.
TextCorpus ReadCorpus(const std::string& path);
TextCorpus CorpusFromLines(const std::vector<std::string>& lines);

enum class Smoothing { kKneserNey, kMaximumLikelihood };

struct NGramOptions {
  int order = 3;
  Smoothing smoothing = Smoothing::kKneserNey;
  double discount = 0.75;
};

// Unused trailing slots hold -1.
using NGramKey = std::array<WordId, 4>;

struct KeyHash {
  std::size_t operator()(const NGramKey& k) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (WordId w : k) h = (h ^ static_cast<std::uint32_t>(w)) * 1099511628211ULL;
    return static_cast<std::size_t>(h);
  }
};

// Backoff n-gram model. Probabilities are stored in natural log; ARPA I/O
// converts to log10. A history h of length k < order carries a backoff
// weight on its own k-gram entry.
class NGramModel {
 public:
  static constexpr int kMaxOrder = 4;
  using Key = NGramKey;
  struct Entry {
    double logp = 0.0;
    double backoff = 0.0;  // log beta(h) when this n-gram is a history
  };

  int order() const { return order_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  WordId bos() const { return bos_; }
  WordId eos() const { return eos_; }
  WordId unk() const { return unk_; }
  bool has_unk() const { return unk_ >= 0; }

  // Returns -1 when absent.
  WordId Find(const std::string& word) const;
  // Maps OOV words to <unk> when available, else throws VocabularyError.
  WordId IdOrUnk(const std::string& word) const;

  // Natural-log P(word | history); only the last order-1 history words are
  // used. Unseen events under maximum-likelihood smoothing give -inf.
  double Score(std::span<const WordId> history, WordId word) const;
  double Score(const std::vector<std::string>& history,
               const std::string& word) const;
  // Sum over the sentence plus </s>, starting from <s>.
  double SentenceLogProb(const Sentence& words) const;

  // Words the model can predict: everything except <s>.
  std::vector<WordId> PredictableWords() const;

  std::size_t NumEntries(int order) const { return tables_.at(order - 1).size(); }
  const Entry* Lookup(std::span<const WordId> ngram) const;
  // Entries of the given order (1-based), unordered.
  const std::unordered_map<Key, Entry, KeyHash>& Table(int order) const {
    return tables_.at(order - 1);
  }

  // Recomputes every backoff weight from the explicit probabilities so that
  // each history normalizes over PredictableWords().
  void RecomputeBackoffs();

  friend NGramModel TrainNGram(const TextCorpus&, const NGramOptions&,
                               const std::vector<std::string>&);
  friend NGramModel AttachUnk(const NGramModel&);
  friend NGramModel ParseArpa(const std::string&, const std::string&);

 private:
  void IndexVocab();
  std::unordered_map<Key, Entry, KeyHash>& MutableTable(int order) {
    return tables_.at(order - 1);
  }

  int order_ = 0;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, WordId> ids_;
  WordId bos_ = -1, eos_ = -1, unk_ = -1;
  std::vector<std::unordered_map<Key, Entry, KeyHash>> tables_;
};

// Interpolated Kneser-Ney (or ML) estimation. `extra_vocab` words are added
// to the vocabulary even if unseen (they receive only the uniform share).
NGramModel TrainNGram(const TextCorpus& corpus, const NGramOptions& options,
                      const std::vector<std::string>& extra_vocab = {});

// exp(-mean log P) over every token including </s>.
double Perplexity(const NGramModel& model, const TextCorpus& corpus);

// Adds <unk> with the smallest existing unigram probability, rescales the
// other unigrams and recomputes backoffs. Throws if <unk> is present.
NGramModel AttachUnk(const NGramModel& model);

void WriteArpa(const NGramModel& model, const std::string& path);
std::string ArpaString(const NGramModel& model);
NGramModel ReadArpa(const std::string& path);
NGramModel ParseArpa(const std::string& text, const std::string& source = "<string>");

}  // namespace altk::lm
