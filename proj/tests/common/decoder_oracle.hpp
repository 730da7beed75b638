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

// Brute-force decoding oracle shared by the decoder tests and the
// acceptance suite.

#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "altk/decoder/decoder.hpp"
#include "altk/lexicon/lexicon.hpp"
#include "altk/lm/ngram.hpp"

namespace altk::testing {

using decoder::DecodeParams;
using decoder::kInf;
using decoder::ScoreMatrix;

using SequenceScores = std::map<std::vector<std::string>, double>;

inline ScoreMatrix RandomLogPosteriors(std::size_t frames, std::size_t phones, std::mt19937& rng) {
  ScoreMatrix m{frames, phones, std::vector<float>(frames * phones)};
  std::normal_distribution<double> n(0.0, 1.5);
  for (std::size_t t = 0; t < frames; ++t) {
    std::vector<double> row(phones);
    double mx = -1e30, sum = 0;
    for (auto& v : row) mx = std::max(mx, v = n(rng));
    for (double v : row) sum += std::exp(v - mx);
    for (std::size_t k = 0; k < phones; ++k)
      m.data[t * phones + k] = static_cast<float>(row[k] - mx - std::log(sum));
  }
  return m;
}

// Exhaustive search over every frame-level segmentation: silence runs may
// appear anywhere, every phone lasts at least one frame, and <unk> may spell
// any non-silence phone string.
struct Oracle {
  const ScoreMatrix& am;
  const lexicon::Lexicon& lex;
  const lexicon::PhoneTable& phones;
  const lm::NGramModel& lm;
  const DecodeParams& params;
  const lexicon::UnkModel* unk = nullptr;
  SequenceScores best;

  double Span(int phone, std::size_t from, std::size_t to) const {
    double s = 0;
    for (std::size_t t = from; t < to; ++t) s += am.at(t, phone);
    return params.acoustic_scale * s;
  }

  // Spell `pron` starting at frame t; calls done(end_frame, score).
  void Spell(const std::vector<int>& pron, std::size_t i, std::size_t t, double score,
             const std::function<void(std::size_t, double)>& done) const {
    if (i == pron.size()) return done(t, score);
    for (std::size_t end = t + 1; end <= am.frames; ++end)
      Spell(pron, i + 1, end, score + Span(pron[i], t, end), done);
  }

  void Word(const std::string& label, const std::vector<int>& pron, double extra,
            std::vector<std::string>& words, std::size_t t, double score) {
    const double lmscore = lm.Score(Hist(words), label == lexicon::kUnkWord ? label : label);
    words.push_back(label);
    Spell(pron, 0, t, score + lmscore + params.word_insertion_penalty + extra,
          [&](std::size_t end, double s) { Rec(words, end, s, true); });
    words.pop_back();
  }

  std::vector<std::string> Hist(const std::vector<std::string>& words) const {
    std::vector<std::string> h = {"<s>"};
    h.insert(h.end(), words.begin(), words.end());
    return h;
  }

  void Rec(std::vector<std::string>& words, std::size_t t, double score, bool sil_ok) {
    if (t == am.frames) {
      const double total = score + lm.Score(Hist(words), "</s>");
      auto [it, inserted] = best.emplace(words, total);
      if (!inserted) it->second = std::max(it->second, total);
      return;
    }
    if (sil_ok)
      for (std::size_t end = t + 1; end <= am.frames; ++end)
        Rec(words, end, score + Span(0, t, end), false);
    for (const auto& [label, prons] : lex.entries())
      for (const auto& pron : prons) {
        std::vector<int> ids;
        for (const auto& p : pron) ids.push_back(phones.Id(p));
        Word(label, ids, 0.0, words, t, score);
      }
    if (unk) {
      // Every phone string up to the remaining length.
      std::vector<std::vector<int>> strings = {{}};
      for (std::size_t k = 0; k < strings.size(); ++k) {
        if (strings[k].size() == am.frames - t) continue;
        for (std::size_t p = 0; p < unk->phones.size(); ++p) {
          auto s = strings[k];
          s.push_back(static_cast<int>(p));
          strings.push_back(s);
        }
      }
      for (const auto& s : strings) {
        if (s.empty()) continue;
        std::vector<int> ids;
        lexicon::Pronunciation pron;
        for (int p : s) {
          ids.push_back(phones.Id(unk->phones[p]));
          pron.push_back(unk->phones[p]);
        }
        Word(lexicon::kUnkWord, ids, unk->LogProb(pron), words, t, score);
      }
    }
  }

  void Run() {
    std::vector<std::string> words;
    Rec(words, 0, 0.0, true);
  }
};

struct Toy {
  lexicon::Lexicon lex;
  lm::NGramModel lm;
};

inline Toy RandomToy(std::mt19937& rng, bool with_unk) {
  const std::vector<std::string> phone_names = {"PA", "PB", "PC"};
  std::ostringstream text;
  const std::vector<std::string> words = {"WA", "WB", "WC"};
  for (const auto& w : words) {
    text << w;
    const int len = 1 + static_cast<int>(rng() % 2);
    for (int i = 0; i < len; ++i) text << ' ' << phone_names[rng() % 3];
    text << '\n';
  }
  Toy toy;
  toy.lex = lexicon::ParseLexicon(text.str());
  std::vector<std::string> lines;
  for (int i = 0; i < 6; ++i) {
    std::string line;
    for (int k = 0, n = 1 + static_cast<int>(rng() % 3); k < n; ++k) line += words[rng() % 3] + " ";
    lines.push_back(line);
  }
  lm::NGramOptions opts;
  opts.order = 2 + static_cast<int>(rng() % 2);
  toy.lm = lm::TrainNGram(lm::CorpusFromLines(lines), opts, words);
  if (with_unk) toy.lm = lm::AttachUnk(toy.lm);
  return toy;
}

inline DecodeParams Exhaustive() {
  DecodeParams p;
  p.beam = kInf;
  p.lattice_beam = kInf;
  p.max_active_tokens = 1 << 30;
  return p;
}

}  // namespace altk::testing
