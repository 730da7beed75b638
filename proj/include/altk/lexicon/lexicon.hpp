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
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace altk::lexicon {

using Pronunciation = std::vector<std::string>;

inline constexpr const char* kUnkWord = "<unk>";
inline constexpr const char* kSilencePhone = "SIL";

struct LexiconOptions {
  bool strip_stress = true;
  // When set, every phone must belong to it; otherwise the inventory is
  // inferred from the file.
  std::optional<std::set<std::string>> inventory;
};

class Lexicon {
 public:
  Lexicon() = default;

  // Adds a pronunciation, extending the inventory. Duplicates are ignored.
  void Add(const std::string& word, const Pronunciation& pron);

  bool Contains(const std::string& word) const { return prons_.count(word) > 0; }
  const std::vector<Pronunciation>& Pronunciations(const std::string& word) const;
  const std::map<std::string, std::vector<Pronunciation>>& entries() const {
    return prons_;
  }
  std::vector<std::string> Words() const;
  const std::set<std::string>& inventory() const { return inventory_; }
  const std::set<std::string>& vowels() const { return vowels_; }
  void SetVowels(std::set<std::string> vowels) { vowels_ = std::move(vowels); }
  std::size_t NumPronunciations() const;

  // Throws FormatError naming the offending word if an invariant is broken.
  void Validate() const;

  bool operator==(const Lexicon& other) const = default;

 private:
  std::map<std::string, std::vector<Pronunciation>> prons_;
  std::set<std::string> inventory_;
  std::set<std::string> vowels_;
};

// CMU format: "WORD[(n)] PH1 PH2 ...", ";;;" comments. Vowels are the
// phones that carry a stress digit in the raw file.
Lexicon ParseLexicon(const std::string& text, const LexiconOptions& options = {},
                     const std::string& source = "<string>");
Lexicon LoadLexicon(const std::string& path, const LexiconOptions& options = {});

// Same format sorted by word, with a ";;; vowels:" line so that reloading
// the stripped form recovers the vowel set.
std::string SerializeLexicon(const Lexicon& lexicon);
void SaveLexicon(const std::string& path, const Lexicon& lexicon);

struct PhoneMapping {
  std::vector<Pronunciation> phones;  // one entry per in-vocabulary word
  std::vector<std::string> oov;       // in transcript order

  bool complete() const { return oov.empty(); }
};

// Uses each word's first pronunciation.
PhoneMapping TranscriptToPhones(const Lexicon& lexicon,
                                const std::vector<std::string>& words);

// Phone loop for the unknown word: phones drawn from their unigram frequency
// in the lexicon, with a geometric length model:
//   P(p1..pn) = prod p(pi) * c^(n-1) * (1 - c)
struct UnkModel {
  std::vector<std::string> phones;
  std::vector<double> probs;
  double continuation = 0.5;

  double LogProb(const Pronunciation& pron) const;
  double PhoneLogProb(const std::string& phone) const;
};

UnkModel MakeUnkModel(const Lexicon& lexicon, double continuation = 0.5);

// Adds one variant per word, built from the first pronunciation that has a
// vowel, with every vowel repeated `repeat` times.
Lexicon ExtendVowels(const Lexicon& lexicon, int repeat = 2);

// AM output inventory: SIL first, then the lexicon inventory sorted.
class PhoneTable {
 public:
  PhoneTable() = default;
  explicit PhoneTable(const Lexicon& lexicon);
  explicit PhoneTable(std::vector<std::string> symbols);

  int size() const { return static_cast<int>(symbols_.size()); }
  int Id(const std::string& phone) const;  // throws VocabularyError
  const std::string& Symbol(int id) const { return symbols_.at(id); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  int silence() const { return 0; }

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, int> ids_;
};

}  // namespace altk::lexicon
