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

#include <string>
#include <vector>

#include "altk/lexicon/lexicon.hpp"
#include "altk/lm/ngram.hpp"

namespace altk::decoder {

// Search states, one HMM state per phone with a self-loop:
//   state 0                 optional silence before the first word
//   tree states             lexicon prefix tree, one per (prefix, phone)
//   unk states              phone loop for <unk>, one per non-silence phone
//   trailing-silence states one per graph word, after that word ends
struct GraphWord {
  std::string label;
  lm::WordId lm_id = -1;
};

struct TreeState {
  int phone = 0;                    // AM output index
  std::vector<int> children;        // state ids
  std::vector<int> words;           // graph words ending here
};

struct GraphOptions {
  bool use_unk = false;
  double unk_continuation = 0.5;
};

class DecodeGraph {
 public:
  static constexpr int kLeadSilence = 0;

  const lexicon::PhoneTable& phones() const { return phones_; }
  const lm::NGramModel& lm() const { return *lm_; }
  const std::vector<GraphWord>& words() const { return words_; }
  int num_states() const { return static_cast<int>(phone_of_.size()); }
  int PhoneOf(int state) const { return phone_of_[state]; }
  const std::vector<int>& RootChildren() const { return root_children_; }
  bool IsTreeState(int s) const { return s >= tree_begin_ && s < unk_begin_; }
  bool IsUnkState(int s) const { return s >= unk_begin_ && s < sil_begin_; }
  bool IsTrailingSilence(int s) const { return s >= sil_begin_; }
  const TreeState& Tree(int s) const { return tree_[s - tree_begin_]; }
  int num_tree_states() const { return static_cast<int>(tree_.size()); }
  int TrailingSilence(int word) const { return sil_begin_ + word; }
  int WordOfTrailingSilence(int s) const { return s - sil_begin_; }

  bool has_unk() const { return unk_word_ >= 0; }
  int unk_word() const { return unk_word_; }
  int num_unk_states() const { return sil_begin_ - unk_begin_; }
  int UnkState(int i) const { return unk_begin_ + i; }
  // log p(phone) for entering unk state s, and the loop constants.
  double UnkPhoneLogProb(int s) const { return unk_phone_logp_[s - unk_begin_]; }
  double unk_log_continue() const { return unk_log_continue_; }
  double unk_log_stop() const { return unk_log_stop_; }

  friend DecodeGraph BuildGraph(const lexicon::Lexicon&, const lm::NGramModel&,
                                const GraphOptions&);

 private:
  lexicon::PhoneTable phones_;
  const lm::NGramModel* lm_ = nullptr;
  std::vector<GraphWord> words_;
  std::vector<TreeState> tree_;
  std::vector<int> root_children_;
  std::vector<int> phone_of_;
  int tree_begin_ = 1, unk_begin_ = 1, sil_begin_ = 1;
  int unk_word_ = -1;
  std::vector<double> unk_phone_logp_;
  double unk_log_continue_ = 0, unk_log_stop_ = 0;
};

// The LM must outlive the graph. Throws VocabularyError when a lexicon word
// is missing from the LM (and the LM has no <unk>), when an LM word has no
// pronunciation and unk is off, or when unk is requested and the LM lacks it.
DecodeGraph BuildGraph(const lexicon::Lexicon& lexicon, const lm::NGramModel& lm,
                       const GraphOptions& options = {});

}  // namespace altk::decoder
