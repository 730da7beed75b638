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

#include "altk/lexicon/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "altk/util/error.hpp"

namespace altk::lexicon {
namespace {

const std::set<std::string> kCmuVowels = {"AA", "AE", "AH", "AO", "AW",
                                          "AY", "EH", "ER", "EY", "IH",
                                          "IY", "OW", "OY", "UH", "UW"};

std::string Upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

bool ValidPhoneToken(const std::string& p) {
  if (p.empty()) return false;
  return std::all_of(p.begin(), p.end(), [](unsigned char c) {
    return std::isupper(c) || std::isdigit(c) || c == '_';
  });
}

// Splits "WORD(2)" into "WORD".
std::string BaseWord(const std::string& token) {
  if (token.size() > 3 && token.back() == ')') {
    const auto open = token.rfind('(');
    if (open != std::string::npos && open > 0 && open + 2 < token.size() &&
        std::all_of(token.begin() + open + 1, token.end() - 1,
                    [](unsigned char c) { return std::isdigit(c); }))
      return token.substr(0, open);
  }
  return token;
}

}  // namespace

void Lexicon::Add(const std::string& word, const Pronunciation& pron) {
  if (word.empty()) throw std::invalid_argument("lexicon: empty word");
  if (pron.empty()) throw std::invalid_argument("lexicon: empty pronunciation for " + word);
  auto& list = prons_[word];
  if (std::find(list.begin(), list.end(), pron) == list.end()) list.push_back(pron);
  inventory_.insert(pron.begin(), pron.end());
}

const std::vector<Pronunciation>& Lexicon::Pronunciations(
    const std::string& word) const {
  auto it = prons_.find(word);
  if (it == prons_.end()) throw VocabularyError("lexicon: no word " + word);
  return it->second;
}

std::vector<std::string> Lexicon::Words() const {
  std::vector<std::string> out;
  for (const auto& [w, p] : prons_) out.push_back(w);
  return out;
}

std::size_t Lexicon::NumPronunciations() const {
  std::size_t n = 0;
  for (const auto& [w, p] : prons_) n += p.size();
  return n;
}

void Lexicon::Validate() const {
  for (const auto& [word, list] : prons_) {
    if (word != Upper(word)) throw FormatError("lexicon: word not uppercase: " + word);
    if (list.empty()) throw FormatError("lexicon: no pronunciation for " + word);
    for (const auto& pron : list) {
      if (pron.empty()) throw FormatError("lexicon: empty pronunciation for " + word);
      for (const auto& p : pron)
        if (!inventory_.count(p))
          throw FormatError("lexicon: phone " + p + " of " + word +
                            " not in inventory");
    }
  }
}

Lexicon ParseLexicon(const std::string& text, const LexiconOptions& options,
                     const std::string& source) {
  struct Line {
    int number;
    std::string word;
    Pronunciation raw;
  };
  std::vector<Line> lines;
  std::set<std::string> declared_vowels;
  bool have_declared_vowels = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(";;;", 0) == 0) {
      std::istringstream cs(line.substr(3));
      std::string tag, v;
      if (cs >> tag && tag == "vowels:") {
        have_declared_vowels = true;
        while (cs >> v) declared_vowels.insert(v);
      }
      continue;
    }
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    Line l{lineno, Upper(BaseWord(head)), {}};
    std::string ph;
    while (ls >> ph) l.raw.push_back(ph);
    if (l.raw.empty())
      throw FormatError(source + ":" + std::to_string(lineno) +
                        ": word '" + head + "' has no phones");
    lines.push_back(std::move(l));
  }

  // First pass: token syntax and vowel discovery.
  std::set<std::string> vowels = declared_vowels;
  bool saw_stress = false;
  for (const auto& l : lines)
    for (const auto& p : l.raw) {
      if (!ValidPhoneToken(p))
        throw FormatError(source + ":" + std::to_string(l.number) +
                          ": malformed phone '" + p + "'");
      if (std::isdigit(static_cast<unsigned char>(p.back()))) {
        saw_stress = true;
        vowels.insert(p.substr(0, p.size() - 1));
      }
    }
  if (!saw_stress && !have_declared_vowels) vowels = kCmuVowels;

  Lexicon lex;
  for (const auto& l : lines) {
    Pronunciation pron;
    for (auto p : l.raw) {
      if (options.strip_stress)
        while (!p.empty() && std::isdigit(static_cast<unsigned char>(p.back()))) p.pop_back();
      if (options.inventory && !options.inventory->count(p))
        throw FormatError(source + ":" + std::to_string(l.number) + ": phone '" +
                          p + "' not in inventory");
      pron.push_back(p);
    }
    lex.Add(l.word, pron);
  }
  // Restrict to vowels actually present (in whichever form was kept).
  std::set<std::string> present;
  for (const auto& p : lex.inventory()) {
    std::string base = p;
    while (!base.empty() && std::isdigit(static_cast<unsigned char>(base.back()))) base.pop_back();
    if (vowels.count(base)) present.insert(options.strip_stress ? base : p);
  }
  lex.SetVowels(present);
  lex.Validate();
  return lex;
}

Lexicon LoadLexicon(const std::string& path, const LexiconOptions& options) {
  std::ifstream in(path);
  if (!in) throw FormatError("lexicon: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseLexicon(ss.str(), options, path);
}

std::string SerializeLexicon(const Lexicon& lexicon) {
  std::ostringstream os;
  os << ";;; vowels:";
  for (const auto& v : lexicon.vowels()) os << ' ' << v;
  os << '\n';
  for (const auto& [word, list] : lexicon.entries())
    for (std::size_t k = 0; k < list.size(); ++k) {
      os << word;
      if (k > 0) os << '(' << k + 1 << ')';
      for (const auto& p : list[k]) os << ' ' << p;
      os << '\n';
    }
  return os.str();
}

void SaveLexicon(const std::string& path, const Lexicon& lexicon) {
  std::ofstream out(path);
  if (!out) throw Error("lexicon: cannot write " + path);
  out << SerializeLexicon(lexicon);
}

PhoneMapping TranscriptToPhones(const Lexicon& lexicon,
                                const std::vector<std::string>& words) {
  PhoneMapping m;
  for (const auto& w : words) {
    if (lexicon.Contains(w)) m.phones.push_back(lexicon.Pronunciations(w).front());
    else m.oov.push_back(w);
  }
  return m;
}

double UnkModel::PhoneLogProb(const std::string& phone) const {
  auto it = std::find(phones.begin(), phones.end(), phone);
  if (it == phones.end()) return -INFINITY;
  return std::log(probs[it - phones.begin()]);
}

double UnkModel::LogProb(const Pronunciation& pron) const {
  if (pron.empty()) return -INFINITY;
  double lp = (pron.size() - 1) * std::log(continuation) + std::log1p(-continuation);
  for (const auto& p : pron) lp += PhoneLogProb(p);
  return lp;
}

UnkModel MakeUnkModel(const Lexicon& lexicon, double continuation) {
  if (lexicon.inventory().empty())
    throw std::invalid_argument("unk model: empty phone inventory");
  if (!(continuation > 0 && continuation < 1))
    throw std::invalid_argument("unk model: continuation must be in (0, 1)");
  std::map<std::string, double> counts;
  for (const auto& p : lexicon.inventory()) counts[p] = 0;
  double total = 0;
  for (const auto& [w, list] : lexicon.entries())
    for (const auto& pron : list)
      for (const auto& p : pron) counts[p] += 1, total += 1;
  UnkModel m;
  m.continuation = continuation;
  for (const auto& [p, c] : counts) {
    m.phones.push_back(p);
    m.probs.push_back(c / total);
  }
  return m;
}

Lexicon ExtendVowels(const Lexicon& lexicon, int repeat) {
  if (repeat < 2) throw std::invalid_argument("extend_vowels: repeat must be >= 2");
  Lexicon out = lexicon;
  for (const auto& [word, list] : lexicon.entries()) {
    for (const auto& pron : list) {
      Pronunciation ext;
      bool has_vowel = false;
      for (const auto& p : pron) {
        const bool vowel = lexicon.vowels().count(p) > 0;
        has_vowel |= vowel;
        for (int k = 0; k < (vowel ? repeat : 1); ++k) ext.push_back(p);
      }
      if (has_vowel) {
        out.Add(word, ext);
        break;
      }
    }
  }
  return out;
}

PhoneTable::PhoneTable(const Lexicon& lexicon) {
  std::vector<std::string> symbols = {kSilencePhone};
  for (const auto& p : lexicon.inventory())
    if (p != kSilencePhone) symbols.push_back(p);
  *this = PhoneTable(std::move(symbols));
}

PhoneTable::PhoneTable(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty() || symbols_[0] != kSilencePhone)
    throw std::invalid_argument("phone table must start with SIL");
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (!ids_.emplace(symbols_[i], static_cast<int>(i)).second)
      throw std::invalid_argument("phone table: duplicate " + symbols_[i]);
}

int PhoneTable::Id(const std::string& phone) const {
  auto it = ids_.find(phone);
  if (it == ids_.end()) throw VocabularyError("unknown phone " + phone);
  return it->second;
}

}  // namespace altk::lexicon
