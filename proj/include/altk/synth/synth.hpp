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
#include <map>
#include <string>
#include <vector>

#include "altk/features/archive.hpp"
#include "altk/features/features.hpp"
#include "altk/lexicon/lexicon.hpp"

namespace altk::synth {

struct SynthSpec {
  std::size_t num_phones = 12;
  std::size_t num_words = 10;
  std::size_t min_word_phones = 2;
  std::size_t max_word_phones = 4;
  std::size_t min_phone_frames = 8;
  std::size_t max_phone_frames = 20;
  std::size_t min_words_per_utterance = 2;
  std::size_t max_words_per_utterance = 5;
  std::size_t num_speakers = 8;
  std::size_t train_utterances = 200;
  std::size_t dev_utterances = 30;
  std::size_t test_utterances = 50;
  // Words never seen in the lexicon or LM text, used only in test.
  std::size_t num_oov_words = 2;
  double test_oov_rate = 0.03;  // per-word probability in test utterances
  std::size_t lm_sentences = 2000;
  int sample_rate = 16000;
  features::FeatureConfig features;
  std::uint64_t seed = 1;

  void Validate() const;
};

// Deterministic inventory and vocabulary for a spec: phone names, the
// in-vocabulary lexicon and the out-of-vocabulary pronunciations.
struct Inventory {
  std::vector<std::string> phones;  // without SIL
  lexicon::Lexicon lexicon;         // in-vocabulary words
  std::map<std::string, lexicon::Pronunciation> oov;
  // Per word: successor words and their probabilities (sentence grammar).
  std::map<std::string, std::vector<std::pair<std::string, double>>> successors;
};

Inventory MakeInventory(const SynthSpec& spec);

// Checks that every pronunciation uses inventory phones only; throws
// VocabularyError otherwise.
void CheckInventory(const Inventory& inv);

struct SynthUtterance {
  std::string id;
  std::string speaker;
  std::vector<std::string> words;
  features::AudioSignal audio;
  std::vector<std::int32_t> labels;  // phone-table ids per feature frame
};

// Waveform samples for a frame-label sequence: frame t's samples are the hop
// centred on its analysis window, so features line up with labels exactly.
std::size_t SamplesForFrames(std::size_t frames, const features::FeatureConfig& config,
                             int sample_rate);

// Label sequence of a speed-perturbed copy: each new frame takes the label
// of the original frame whose window centre maps closest to its own.
std::vector<std::int32_t> StretchLabels(const std::vector<std::int32_t>& labels, double factor,
                                        std::size_t new_frames,
                                        const features::FeatureConfig& config, int sample_rate);

struct SynthDataset {
  Inventory inventory;
  lexicon::PhoneTable phone_table;
  std::map<std::string, std::vector<SynthUtterance>> splits;  // train, dev, test
  std::vector<std::string> lm_corpus;
};

SynthDataset Generate(const SynthSpec& spec);

// Files written under `dir`:
//   wav/<utt>.wav, <split>/manifest.tsv, <split>/labels.txt,
//   lexicon.txt, phones.txt, lm_corpus.txt
// Returns the written paths, relative to dir.
std::vector<std::string> WriteDataset(const SynthDataset& data, const std::string& dir);

}  // namespace altk::synth
