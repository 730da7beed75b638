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

#include "altk/decoder/graph.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "altk/util/error.hpp"

namespace altk::decoder {

DecodeGraph BuildGraph(const lexicon::Lexicon& lexicon, const lm::NGramModel& lm,
                       const GraphOptions& options) {
  if (lexicon.entries().empty()) throw std::invalid_argument("graph: empty lexicon");
  if (options.use_unk && !lm.has_unk())
    throw VocabularyError("graph: unk requested but the LM has no <unk>");
  DecodeGraph g;
  g.phones_ = lexicon::PhoneTable(lexicon);
  g.lm_ = &lm;
  const int sil = g.phones_.silence();
  g.phone_of_.push_back(sil);  // leading silence

  for (const auto& [word, prons] : lexicon.entries()) {
    lm::WordId id = lm.Find(word);
    if (id < 0) {
      if (!options.use_unk)
        throw VocabularyError("graph: lexicon word " + word + " missing from the LM");
      id = lm.unk();
    }
    g.words_.push_back({word, id});
  }
  for (lm::WordId w : lm.PredictableWords()) {
    const auto& label = lm.vocab()[w];
    if (w == lm.eos() || w == lm.unk()) continue;
    if (!lexicon.Contains(label) && !options.use_unk)
      throw VocabularyError("graph: LM word " + label + " has no pronunciation");
  }

  // Prefix tree over pronunciations, keyed by (parent state, phone).
  std::map<std::pair<int, int>, int> child_of;
  int word_index = 0;
  for (const auto& [word, prons] : lexicon.entries()) {
    for (const auto& pron : prons) {
      int parent = -1;
      for (const auto& ph : pron) {
        const int phone = g.phones_.Id(ph);
        auto [it, inserted] = child_of.try_emplace({parent, phone}, 0);
        if (inserted) {
          it->second = g.tree_begin_ + static_cast<int>(g.tree_.size());
          g.tree_.push_back({phone, {}, {}});
          if (parent < 0) g.root_children_.push_back(it->second);
          else g.tree_[parent - g.tree_begin_].children.push_back(it->second);
        }
        parent = it->second;
      }
      g.tree_[parent - g.tree_begin_].words.push_back(word_index);
    }
    ++word_index;
  }
  for (const auto& t : g.tree_) g.phone_of_.push_back(t.phone);
  g.unk_begin_ = g.tree_begin_ + static_cast<int>(g.tree_.size());

  if (options.use_unk) {
    const auto model = lexicon::MakeUnkModel(lexicon, options.unk_continuation);
    for (std::size_t i = 0; i < model.phones.size(); ++i) {
      if (model.phones[i] == lexicon::kSilencePhone || model.probs[i] <= 0) continue;
      g.phone_of_.push_back(g.phones_.Id(model.phones[i]));
      g.unk_phone_logp_.push_back(std::log(model.probs[i]));
    }
    g.unk_log_continue_ = std::log(model.continuation);
    g.unk_log_stop_ = std::log1p(-model.continuation);
    g.unk_word_ = static_cast<int>(g.words_.size());
    g.words_.push_back({lexicon::kUnkWord, lm.unk()});
  }
  g.sil_begin_ = g.unk_begin_ + static_cast<int>(g.unk_phone_logp_.size());
  for (std::size_t w = 0; w < g.words_.size(); ++w) g.phone_of_.push_back(sil);
  return g;
}

}  // namespace altk::decoder
