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

#include "altk/lm/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "altk/scoring/wer.hpp"
#include "altk/util/error.hpp"

namespace altk::lm {
namespace {

constexpr double kLn10 = 2.302585092994045684;
constexpr double kArpaFloor = -99.0;  // log10 stand-in for log(0)

NGramKey MakeKey(std::span<const WordId> words) {
  NGramKey k;
  k.fill(-1);
  std::copy(words.begin(), words.end(), k.begin());
  return k;
}

std::span<const WordId> KeySpan(const NGramKey& k, int len) {
  return {k.data(), static_cast<std::size_t>(len)};
}

double ToLog10(double ln) { return std::isinf(ln) ? kArpaFloor : ln / kLn10; }
double FromLog10(double l10) { return l10 <= kArpaFloor ? -INFINITY : l10 * kLn10; }

}  // namespace

std::size_t TextCorpus::NumWords() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

TextCorpus CorpusFromLines(const std::vector<std::string>& lines) {
  TextCorpus c;
  for (const auto& line : lines) {
    auto words = scoring::NormalizeText(line);
    if (!words.empty()) c.sentences.push_back(std::move(words));
  }
  return c;
}

TextCorpus ReadCorpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("corpus: cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return CorpusFromLines(lines);
}

void NGramModel::IndexVocab() {
  ids_.clear();
  for (std::size_t i = 0; i < vocab_.size(); ++i)
    if (!ids_.emplace(vocab_[i], static_cast<WordId>(i)).second)
      throw FormatError("lm: duplicate vocabulary word " + vocab_[i]);
  bos_ = Find(kBos);
  eos_ = Find(kEos);
  unk_ = Find(lexicon::kUnkWord);
  if (bos_ < 0 || eos_ < 0) throw FormatError("lm: vocabulary lacks <s> or </s>");
}

WordId NGramModel::Find(const std::string& word) const {
  auto it = ids_.find(word);
  return it == ids_.end() ? -1 : it->second;
}

WordId NGramModel::IdOrUnk(const std::string& word) const {
  const WordId id = Find(word);
  if (id >= 0) return id;
  if (unk_ >= 0) return unk_;
  throw VocabularyError("lm: out-of-vocabulary word '" + word + "' and no <unk>");
}

std::vector<WordId> NGramModel::PredictableWords() const {
  std::vector<WordId> out;
  for (WordId w = 0; w < static_cast<WordId>(vocab_.size()); ++w)
    if (w != bos_) out.push_back(w);
  return out;
}

const NGramModel::Entry* NGramModel::Lookup(std::span<const WordId> ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order_) return nullptr;
  const auto& table = tables_[ngram.size() - 1];
  auto it = table.find(MakeKey(ngram));
  return it == table.end() ? nullptr : &it->second;
}

double NGramModel::Score(std::span<const WordId> history, WordId word) const {
  if (word < 0 || word >= static_cast<WordId>(vocab_.size()))
    throw VocabularyError("lm: word id out of range");
  int k = std::min<int>(static_cast<int>(history.size()), order_ - 1);
  WordId buf[kMaxOrder];
  double acc = 0.0;
  for (; k >= 0; --k) {
    std::copy(history.end() - k, history.end(), buf);
    buf[k] = word;
    if (const Entry* e = Lookup({buf, static_cast<std::size_t>(k + 1)}))
      return acc + e->logp;
    if (k > 0)
      if (const Entry* h = Lookup({buf, static_cast<std::size_t>(k)})) acc += h->backoff;
  }
  return -INFINITY;  // only reachable for ids without a unigram entry
}

double NGramModel::Score(const std::vector<std::string>& history,
                         const std::string& word) const {
  std::vector<WordId> h;
  for (const auto& w : history) h.push_back(w == kBos ? bos_ : IdOrUnk(w));
  return Score(h, word == kEos ? eos_ : IdOrUnk(word));
}

double NGramModel::SentenceLogProb(const Sentence& words) const {
  std::vector<WordId> ids = {bos_};
  for (const auto& w : words) ids.push_back(IdOrUnk(w));
  ids.push_back(eos_);
  double total = 0;
  for (std::size_t i = 1; i < ids.size(); ++i)
    total += Score(std::span<const WordId>(ids.data(), i), ids[i]);
  return total;
}

void NGramModel::RecomputeBackoffs() {
  for (int k = 1; k < order_; ++k) {
    // Per history: (sum of explicit P, sum of lower-order P for those words).
    std::unordered_map<NGramKey, std::pair<double, double>, KeyHash> sums;
    for (const auto& [key, e] : tables_[k]) {
      auto& s = sums[MakeKey(KeySpan(key, k))];
      s.first += std::exp(e.logp);
      s.second += std::exp(Score(KeySpan(key, k).subspan(1), key[k]));
    }
    for (auto& [key, e] : tables_[k - 1]) {
      auto it = sums.find(key);
      if (it == sums.end()) {
        e.backoff = 0.0;
        continue;
      }
      const double num = 1.0 - it->second.first;
      const double den = 1.0 - it->second.second;
      if (den <= 1e-12) e.backoff = 0.0;  // every word seen; nothing backs off
      else if (num <= 1e-12) e.backoff = -INFINITY;
      else e.backoff = std::log(num / den);
    }
  }
}

NGramModel TrainNGram(const TextCorpus& corpus, const NGramOptions& options,
                      const std::vector<std::string>& extra_vocab) {
  const int n = options.order;
  if (n < 1 || n > NGramModel::kMaxOrder)
    throw std::invalid_argument("ngram: order must be in 1..4");
  if (corpus.sentences.empty()) throw std::invalid_argument("ngram: empty corpus");
  const bool kn = options.smoothing == Smoothing::kKneserNey;
  const double d = options.discount;
  if (kn && !(d > 0 && d < 1)) throw std::invalid_argument("ngram: discount must be in (0,1)");

  NGramModel m;
  m.order_ = n;
  std::set<std::string> words;
  for (const auto& s : corpus.sentences) {
    if (s.empty()) throw std::invalid_argument("ngram: empty sentence in corpus");
    words.insert(s.begin(), s.end());
  }
  for (const auto& w : extra_vocab) words.insert(w);
  words.erase(kBos);
  words.erase(kEos);
  m.vocab_ = {kBos, kEos};
  m.vocab_.insert(m.vocab_.end(), words.begin(), words.end());
  m.IndexVocab();

  // raw[k-1]: counts of k-grams ending at every predicted position.
  std::vector<std::unordered_map<NGramKey, double, KeyHash>> raw(n);
  std::vector<WordId> ids;
  for (const auto& s : corpus.sentences) {
    ids.assign(1, m.bos_);
    for (const auto& w : s) ids.push_back(m.Find(w));
    ids.push_back(m.eos_);
    for (std::size_t i = 1; i < ids.size(); ++i)
      for (int k = 1; k <= n && static_cast<int>(i) + 1 >= k; ++k)
        raw[k - 1][MakeKey(std::span<const WordId>(ids).subspan(i + 1 - k, k))] += 1;
  }

  // Lower orders use continuation counts except for n-grams opened by <s>,
  // which cannot be extended to the left.
  std::vector<std::unordered_map<NGramKey, double, KeyHash>> counts(n);
  counts[n - 1] = raw[n - 1];
  for (int k = n - 1; k >= 1; --k) {
    auto& c = counts[k - 1];
    if (!kn) {
      c = raw[k - 1];
      continue;
    }
    for (const auto& [key, v] : raw[k - 1])
      if (key[0] == m.bos_) c[key] = v;
    for (const auto& [key, v] : raw[k]) {
      NGramKey suffix = MakeKey(KeySpan(key, k + 1).subspan(1));
      if (suffix[0] != m.bos_) c[suffix] += 1;
    }
  }

  const auto predictable = m.PredictableWords();
  m.tables_.assign(n, {});
  for (int k = 1; k <= n; ++k) {
    // History totals and distinct continuation counts.
    std::unordered_map<NGramKey, std::pair<double, double>, KeyHash> hist;
    for (const auto& [key, v] : counts[k - 1]) {
      auto& h = hist[MakeKey(KeySpan(key, k - 1))];
      h.first += v;
      h.second += 1;
    }
    auto& table = m.MutableTable(k);
    for (const auto& [key, v] : counts[k - 1]) {
      const auto& [total, distinct] = hist.at(MakeKey(KeySpan(key, k - 1)));
      double p;
      if (!kn) {
        p = v / total;
      } else {
        const double gamma = d * distinct / total;
        const double lower =
            k == 1 ? 1.0 / predictable.size()
                   : std::exp(m.Score(KeySpan(key, k).subspan(1, k - 2), key[k - 1]));
        p = (v - d) / total + gamma * lower;
      }
      table[key].logp = std::log(p);
    }
    if (k == 1) {
      const auto& [total, distinct] = hist.begin()->second;
      for (WordId w : predictable) {
        NGramKey key = MakeKey(std::span<const WordId>(&w, 1));
        if (!table.count(key))
          table[key].logp = kn ? std::log(d * distinct / total / predictable.size())
                               : -INFINITY;
      }
      table[MakeKey(std::span<const WordId>(&m.bos_, 1))].logp = -INFINITY;
    }
    // Lower orders are complete before the next order interpolates with
    // them, but their backoffs are only needed by Score on unseen events.
    m.RecomputeBackoffs();
  }
  return m;
}

double Perplexity(const NGramModel& model, const TextCorpus& corpus) {
  double total = 0;
  std::size_t tokens = 0;
  for (const auto& s : corpus.sentences) {
    total += model.SentenceLogProb(s);
    tokens += s.size() + 1;
  }
  if (tokens == 0) throw std::invalid_argument("perplexity: empty corpus");
  return std::exp(-total / tokens);
}

NGramModel AttachUnk(const NGramModel& model) {
  if (model.has_unk()) throw VocabularyError("attach_unk: model already has <unk>");
  NGramModel m = model;
  double mass = 1.0;
  for (const auto& [key, e] : m.tables_[0])
    if (std::isfinite(e.logp)) mass = std::min(mass, std::exp(e.logp));
  // Every explicit probability gives up the same fraction, so each history
  // reserves at least `mass` for words reached through backoff.
  const double scale = std::log1p(-mass);
  for (auto& table : m.tables_)
    for (auto& [key, e] : table) e.logp += scale;
  m.vocab_.push_back(lexicon::kUnkWord);
  m.IndexVocab();
  m.tables_[0][MakeKey(std::span<const WordId>(&m.unk_, 1))].logp = std::log(mass);
  m.RecomputeBackoffs();
  return m;
}

std::string ArpaString(const NGramModel& model) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "\\data\\\n";
  for (int k = 1; k <= model.order(); ++k)
    os << "ngram " << k << "=" << model.NumEntries(k) << '\n';
  for (int k = 1; k <= model.order(); ++k) {
    os << "\n\\" << k << "-grams:\n";
    std::vector<std::pair<NGramKey, NGramModel::Entry>> rows(model.Table(k).begin(),
                                                             model.Table(k).end());
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [key, e] : rows) {
      os << ToLog10(e.logp);
      for (int i = 0; i < k; ++i) os << ' ' << model.vocab()[key[i]];
      if (k < model.order()) os << ' ' << ToLog10(e.backoff);
      os << '\n';
    }
  }
  os << "\n\\end\\\n";
  return os.str();
}

void WriteArpa(const NGramModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("arpa: cannot write " + path);
  out << ArpaString(model);
}

NGramModel ParseArpa(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw FormatError(source + ":" + std::to_string(lineno) + ": " + msg);
  };
  std::vector<std::size_t> declared;
  std::vector<std::vector<std::pair<std::vector<std::string>, NGramModel::Entry>>> rows;
  int section = -1;  // 0 = \data\, k = k-grams
  bool ended = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == "\\data\\") {
      section = 0;
      continue;
    }
    if (line == "\\end\\") {
      ended = true;
      break;
    }
    if (line.front() == '\\') {
      int k = 0;
      if (std::sscanf(line.c_str(), "\\%d-grams:", &k) != 1 || k < 1 ||
          k > static_cast<int>(declared.size()))
        fail("unexpected section header '" + line + "'");
      section = k;
      continue;
    }
    if (section == 0) {
      int k = 0;
      unsigned long count = 0;
      if (std::sscanf(line.c_str(), "ngram %d=%lu", &k, &count) != 2 ||
          k != static_cast<int>(declared.size()) + 1)
        fail("bad ngram count line");
      declared.push_back(count);
      rows.emplace_back();
      continue;
    }
    if (section < 1) fail("content outside a section");
    std::istringstream ls(line);
    double lp;
    if (!(ls >> lp)) fail("expected log probability");
    std::vector<std::string> words(section);
    for (auto& w : words)
      if (!(ls >> w)) fail("too few words");
    NGramModel::Entry e;
    e.logp = FromLog10(lp);
    double bo;
    if (ls >> bo) {
      if (section == static_cast<int>(declared.size())) fail("backoff on highest order");
      e.backoff = FromLog10(bo);
    }
    rows[section - 1].emplace_back(std::move(words), e);
  }
  if (!ended) fail("missing \\end\\");
  if (declared.empty() || declared.size() > NGramModel::kMaxOrder)
    throw FormatError(source + ": unsupported order");
  for (std::size_t k = 0; k < declared.size(); ++k)
    if (rows[k].size() != declared[k])
      throw FormatError(source + ": " + std::to_string(k + 1) + "-gram count mismatch");

  NGramModel m;
  m.order_ = static_cast<int>(declared.size());
  for (const auto& [w, e] : rows[0]) m.vocab_.push_back(w[0]);
  m.IndexVocab();
  m.tables_.assign(m.order_, {});
  for (int k = 1; k <= m.order_; ++k)
    for (const auto& [words, e] : rows[k - 1]) {
      std::vector<WordId> ids;
      for (const auto& w : words) {
        const WordId id = m.Find(w);
        if (id < 0) throw FormatError(source + ": word '" + w + "' missing from unigrams");
        ids.push_back(id);
      }
      m.tables_[k - 1][MakeKey(ids)] = e;
    }
  return m;
}

NGramModel ReadArpa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("arpa: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseArpa(ss.str(), path);
}

}  // namespace altk::lm
