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

#include "altk/scoring/wer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "altk/util/error.hpp"

namespace altk::scoring {
namespace {

bool IsWordChar(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::string NormalizeToken(const std::string& tok) {
  if (tok.size() > 2 && tok.front() == '<' && tok.back() == '>') {
    std::string out = tok;
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
  }
  std::string out;
  for (std::size_t i = 0; i < tok.size(); ++i) {
    const auto c = static_cast<unsigned char>(tok[i]);
    if (IsWordChar(c)) {
      out.push_back(static_cast<char>(std::toupper(c)));
    } else if (c == '\'' && !out.empty() && i + 1 < tok.size() &&
               IsWordChar(static_cast<unsigned char>(tok[i + 1]))) {
      out.push_back('\'');
    }
  }
  return out;
}

double Percent(int errors, int n) { return n == 0 ? 0.0 : 100.0 * errors / n; }

}  // namespace

Words NormalizeText(const std::string& text) {
  Words out;
  std::istringstream ss(text);
  std::string tok;
  while (ss >> tok) {
    // Punctuation such as "rise.--and" separates words.
    std::string piece;
    auto flush = [&] {
      auto w = NormalizeToken(piece);
      if (!w.empty()) out.push_back(std::move(w));
      piece.clear();
    };
    for (std::size_t i = 0; i < tok.size(); ++i) {
      const auto c = static_cast<unsigned char>(tok[i]);
      const bool keep = IsWordChar(c) || c == '\'' || c == '<' || c == '>';
      if (keep) piece.push_back(tok[i]);
      else flush();
    }
    flush();
  }
  return out;
}

UtteranceScore Align(const Words& ref, const Words& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<int> cost((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> int& { return cost[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      at(i, j) = std::min({at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1),
                           at(i - 1, j) + 1, at(i, j - 1) + 1});

  UtteranceScore s;
  s.ref_words = static_cast<int>(n);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        at(i, j) == at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      const bool match = ref[i - 1] == hyp[j - 1];
      s.alignment.push_back({match ? EditOp::kMatch : EditOp::kSubstitution,
                             ref[i - 1], hyp[j - 1]});
      if (!match) ++s.substitutions;
      --i, --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      s.alignment.push_back({EditOp::kDeletion, ref[i - 1], ""});
      ++s.deletions;
      --i;
    } else {
      s.alignment.push_back({EditOp::kInsertion, "", hyp[j - 1]});
      ++s.insertions;
      --j;
    }
  }
  std::reverse(s.alignment.begin(), s.alignment.end());
  return s;
}

WerReport Wer(const Words& reference, const Words& hypothesis) {
  if (reference.empty())
    throw std::invalid_argument("wer: empty reference (WER undefined)");
  WerReport r;
  auto u = Align(reference, hypothesis);
  r.substitutions = u.substitutions;
  r.deletions = u.deletions;
  r.insertions = u.insertions;
  r.ref_words = u.ref_words;
  r.wer = Percent(r.errors(), r.ref_words);
  r.utterances.push_back(std::move(u));
  return r;
}

WerReport ScoreDataset(
    const std::vector<std::pair<std::string, std::string>>& references,
    const std::map<std::string, std::string>& hypotheses) {
  WerReport r;
  std::set<std::string> seen;
  for (const auto& [utt, text] : references) {
    if (!seen.insert(utt).second)
      throw FormatError("score: duplicate utterance id '" + utt + "'");
    auto it = hypotheses.find(utt);
    const bool missing = it == hypotheses.end();
    if (missing) r.warnings.push_back("missing hypothesis for " + utt);
    auto u = Align(NormalizeText(text),
                   missing ? Words{} : NormalizeText(it->second));
    u.utterance_id = utt;
    u.missing_hypothesis = missing;
    r.substitutions += u.substitutions;
    r.deletions += u.deletions;
    r.insertions += u.insertions;
    r.ref_words += u.ref_words;
    r.utterances.push_back(std::move(u));
  }
  for (const auto& [utt, text] : hypotheses)
    if (!seen.count(utt)) r.warnings.push_back("hypothesis for unknown utterance " + utt);
  if (r.ref_words == 0)
    throw std::invalid_argument("score: references contain no words");
  r.wer = Percent(r.errors(), r.ref_words);
  return r;
}

std::string WerReport::Summary() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << "%WER " << wer << " [ "
     << errors() << " / " << ref_words << ", " << insertions << " ins, "
     << deletions << " del, " << substitutions << " sub ] over "
     << utterances.size() << " utterances\n";
  for (const auto& w : warnings) os << "WARNING: " << w << '\n';
  return os.str();
}

std::string WerReport::Csv() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4)
     << "utt_id,ref_words,substitutions,deletions,insertions,wer\n";
  for (const auto& u : utterances)
    os << u.utterance_id << ',' << u.ref_words << ',' << u.substitutions << ','
       << u.deletions << ',' << u.insertions << ','
       << Percent(u.errors(), u.ref_words) << '\n';
  os << "TOTAL," << ref_words << ',' << substitutions << ',' << deletions << ','
     << insertions << ',' << wer << '\n';
  return os.str();
}

std::map<std::string, std::string> ReadHypotheses(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open hypothesis file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    std::string utt = line.substr(0, tab);
    std::string text = tab == std::string::npos ? "" : line.substr(tab + 1);
    if (!out.emplace(utt, text).second)
      throw FormatError(path + ":" + std::to_string(lineno) +
                        ": duplicate utterance id '" + utt + "'");
  }
  return out;
}

void WriteHypotheses(const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& hyps) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (const auto& [utt, text] : hyps) out << utt << '\t' << text << '\n';
}

}  // namespace altk::scoring
