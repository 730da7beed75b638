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

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace altk::scoring {

using Words = std::vector<std::string>;

// Uppercases ASCII letters, splits on whitespace and strips punctuation,
// keeping apostrophes between word characters ("don't" -> "DON'T") and
// angle-bracketed symbols such as "<unk>" whole. Non-ASCII bytes are kept.
Words NormalizeText(const std::string& text);

enum class EditOp { kMatch, kSubstitution, kDeletion, kInsertion };

struct AlignmentStep {
  EditOp op;
  std::string ref;  // empty for insertions
  std::string hyp;  // empty for deletions
};

struct UtteranceScore {
  std::string utterance_id;
  int substitutions = 0, deletions = 0, insertions = 0, ref_words = 0;
  bool missing_hypothesis = false;
  std::vector<AlignmentStep> alignment;

  int errors() const { return substitutions + deletions + insertions; }
};

struct WerReport {
  int substitutions = 0, deletions = 0, insertions = 0, ref_words = 0;
  double wer = 0.0;  // percent
  std::vector<UtteranceScore> utterances;
  std::vector<std::string> warnings;

  int errors() const { return substitutions + deletions + insertions; }
  std::string Summary() const;
  // utt_id,ref_words,substitutions,deletions,insertions,wer followed by a
  // final "TOTAL" row.
  std::string Csv() const;
};

// Minimal edit alignment with unit costs. Among equal-cost alignments the
// backtrace prefers substitution (or match), then deletion, then insertion.
// Accepts an empty reference.
UtteranceScore Align(const Words& reference, const Words& hypothesis);

// Single-pair WER. Throws std::invalid_argument on an empty reference.
WerReport Wer(const Words& reference, const Words& hypothesis);

// Corpus WER: counts are summed before dividing. Missing hypotheses score as
// empty and are reported in `warnings`. Throws on duplicate reference ids or
// when the total reference length is zero.
WerReport ScoreDataset(
    const std::vector<std::pair<std::string, std::string>>& references,
    const std::map<std::string, std::string>& hypotheses);

// "<utt_id>\t<text>" per line; a line with no tab is an empty hypothesis.
std::map<std::string, std::string> ReadHypotheses(const std::string& path);
void WriteHypotheses(const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& hyps);

}  // namespace altk::scoring
