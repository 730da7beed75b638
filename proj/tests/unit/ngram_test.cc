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

#include <cmath>
#include <filesystem>
#include <random>

#include "altk/lm/ngram.hpp"
#include "altk/util/error.hpp"
#include "doctest.h"

using namespace altk::lm;

namespace {

const std::string kFixture = ALTK_TEST_DATA "/lyrics_fixture.txt";

// Draws a history of up to `max_len` words; half of them start with <s>.
std::vector<WordId> RandomHistory(const NGramModel& m, std::mt19937& rng, int max_len) {
  const auto words = m.PredictableWords();
  std::vector<WordId> h;
  const int len = static_cast<int>(rng() % (max_len + 1));
  if (len > 0 && rng() % 2) h.push_back(m.bos());
  while (static_cast<int>(h.size()) < len) {
    WordId w = words[rng() % words.size()];
    if (w != m.eos()) h.push_back(w);
  }
  return h;
}

double TotalMass(const NGramModel& m, const std::vector<WordId>& h) {
  double total = 0;
  for (WordId w : m.PredictableWords()) total += std::exp(m.Score(h, w));
  return total;
}

}  // namespace

TEST_CASE("ml counts on the three-sentence corpus") {
  auto corpus = CorpusFromLines({"A B", "A B", "A C"});
  NGramOptions ml{2, Smoothing::kMaximumLikelihood, 0.75};
  auto m = TrainNGram(corpus, ml);
  CHECK(std::exp(m.Score({"A"}, "B")) == doctest::Approx(2.0 / 3));
  CHECK(std::exp(m.Score({"A"}, "C")) == doctest::Approx(1.0 / 3));
  CHECK(std::isinf(m.Score({"A"}, "A")));
}

TEST_CASE("kneser-ney hand values on the three-sentence corpus") {
  // Unigram continuation counts: A 1, B 1, C 1, </s> 2 (total 5, 4 types),
  // gamma = 0.75 * 4 / 5 = 0.6, uniform share 0.6 / 4 = 0.15:
  //   P(A) = P(B) = P(C) = 0.25/5 + 0.15 = 0.2, P(</s>) = 1.25/5 + 0.15 = 0.4.
  // History A: counts B 2, C 1, gamma = 0.75 * 2 / 3 = 0.5:
  //   P(B|A) = 1.25/3 + 0.1, P(C|A) = 0.25/3 + 0.1,
  //   beta(A) = (1 - 0.7) / (1 - 0.4) = 0.5.
  auto m = TrainNGram(CorpusFromLines({"A B", "A B", "A C"}), {2});
  CHECK(std::exp(m.Score({}, "A")) == doctest::Approx(0.2));
  CHECK(std::exp(m.Score({}, "</s>")) == doctest::Approx(0.4));
  CHECK(std::exp(m.Score({"A"}, "B")) == doctest::Approx(1.25 / 3 + 0.1));
  CHECK(std::exp(m.Score({"A"}, "C")) == doctest::Approx(0.25 / 3 + 0.1));
  CHECK(std::exp(m.Score({"A"}, "</s>")) == doctest::Approx(0.5 * 0.4));
  CHECK(std::exp(m.Score({"A"}, "A")) == doctest::Approx(0.5 * 0.2));
  CHECK(std::exp(m.Lookup(std::vector<WordId>{m.Find("A")})->backoff) ==
        doctest::Approx(0.5));
  // Truncation: only the last word matters for a bigram model.
  CHECK(m.Score({"C", "B", "A"}, "B") == m.Score({"A"}, "B"));
  CHECK_THROWS_AS(m.Score({"A"}, "ZEBRA"), altk::VocabularyError);
}

TEST_CASE("unigram on a single-word corpus") {
  // Counts A 1, </s> 1; gamma = 0.75 * 2 / 2, so each gets 0.25/2 + 0.75/2.
  auto m = TrainNGram(CorpusFromLines({"A"}), {1});
  CHECK(std::exp(m.Score({}, "A")) == doctest::Approx(0.5));
  CHECK(std::exp(m.Score({}, "</s>")) == doctest::Approx(0.5));
  CHECK(TotalMass(m, {}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalization for every order, after unk and after arpa") {
  auto corpus = ReadCorpus(kFixture);
  std::mt19937 rng(5);
  for (int n = 1; n <= 4; ++n) {
    auto m = TrainNGram(corpus, {n});
    auto u = AttachUnk(m);
    auto a = ParseArpa(ArpaString(u));
    for (int i = 0; i < 100; ++i) {
      auto h = RandomHistory(m, rng, 3);
      REQUIRE(std::abs(TotalMass(m, h) - 1.0) < 1e-6);
      REQUIRE(std::abs(TotalMass(u, h) - 1.0) < 1e-6);
      REQUIRE(std::abs(TotalMass(a, h) - 1.0) < 1e-6);
      REQUIRE(u.Score(h, u.unk()) > -INFINITY);
    }
    // Histories drawn from the data, which exercise stored entries.
    for (const auto& s : corpus.sentences) {
      std::vector<WordId> h = {m.bos()};
      for (const auto& w : s) {
        h.push_back(m.Find(w));
        REQUIRE(std::abs(TotalMass(m, h) - 1.0) < 1e-6);
        REQUIRE(std::abs(TotalMass(u, h) - 1.0) < 1e-6);
      }
    }
    for (const auto& [key, e] : m.Table(n)) CHECK(e.logp <= 0.0);
  }
}

TEST_CASE("attach_unk preconditions") {
  auto m = TrainNGram(ReadCorpus(kFixture), {3});
  auto u = AttachUnk(m);
  CHECK(u.has_unk());
  CHECK(u.IdOrUnk("ZEBRA") == u.unk());
  CHECK_THROWS_AS(AttachUnk(u), altk::VocabularyError);
  CHECK_THROWS_AS(m.IdOrUnk("ZEBRA"), altk::VocabularyError);
}

TEST_CASE("backoff consistency for unseen words") {
  auto m = TrainNGram(ReadCorpus(kFixture), {3});
  std::mt19937 rng(9);
  int checked = 0;
  for (const auto& [key, e] : m.Table(2)) {
    std::vector<WordId> h = {key[0], key[1]};
    for (WordId w : m.PredictableWords()) {
      std::vector<WordId> g = {key[0], key[1], w};
      if (m.Lookup(g)) continue;
      CHECK(m.Score(h, w) == doctest::Approx(e.backoff + m.Score(std::vector<WordId>{key[1]}, w)));
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("arpa round trip preserves scores") {
  auto corpus = ReadCorpus(kFixture);
  for (auto smoothing : {Smoothing::kKneserNey, Smoothing::kMaximumLikelihood}) {
    auto m = TrainNGram(corpus, {4, smoothing, 0.75});
    auto path = std::filesystem::temp_directory_path() / "altk_test.arpa";
    WriteArpa(m, path.string());
    auto r = ReadArpa(path.string());
    CHECK(r.vocab() == m.vocab());
    std::mt19937 rng(2);
    for (int i = 0; i < 200; ++i) {
      auto h = RandomHistory(m, rng, 3);
      for (WordId w : m.PredictableWords()) {
        const double a = m.Score(h, w), b = r.Score(h, w);
        if (std::isinf(a)) REQUIRE(std::isinf(b));
        else REQUIRE(std::abs(a - b) < 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(ParseArpa("\\data\\\nngram 1=2\n\n\\1-grams:\n-1 </s>\n\\end\\\n"),
                  altk::FormatError);
}

TEST_CASE("perplexity") {
  auto corpus = ReadCorpus(kFixture);
  // A unigram ML model over words seen exactly once each is uniform.
  auto uniform = TrainNGram(CorpusFromLines({"a b c d e f g"}),
                            {1, Smoothing::kMaximumLikelihood, 0.75});
  CHECK(Perplexity(uniform, CorpusFromLines({"a c e", "g b"})) == doctest::Approx(8.0));

  auto kn3 = TrainNGram(corpus, {3});
  auto flat = TrainNGram(corpus, {1, Smoothing::kMaximumLikelihood, 0.75});
  std::size_t v = kn3.PredictableWords().size();
  CHECK(Perplexity(kn3, corpus) < static_cast<double>(v));
  CHECK(Perplexity(kn3, corpus) < Perplexity(flat, corpus));

  auto ml3 = TrainNGram(corpus, {3, Smoothing::kMaximumLikelihood, 0.75});
  auto ml4 = TrainNGram(corpus, {4, Smoothing::kMaximumLikelihood, 0.75});
  CHECK(Perplexity(ml4, corpus) <= Perplexity(ml3, corpus));

  CHECK_THROWS_AS(Perplexity(kn3, CorpusFromLines({"zebra crossing"})),
                  altk::VocabularyError);
  CHECK(std::isfinite(Perplexity(AttachUnk(kn3), CorpusFromLines({"zebra crossing"}))));
}

TEST_CASE("ml: adding a sentence never lowers its probability") {
  auto corpus = ReadCorpus(kFixture);
  std::mt19937 rng(4);
  for (int n = 1; n <= 4; ++n)
    for (int trial = 0; trial < 10; ++trial) {
      const auto& s = corpus.sentences[rng() % corpus.sentences.size()];
      NGramOptions ml{n, Smoothing::kMaximumLikelihood, 0.75};
      const double before = TrainNGram(corpus, ml).SentenceLogProb(s);
      auto more = corpus;
      more.sentences.push_back(s);
      CHECK(TrainNGram(more, ml).SentenceLogProb(s) >= before - 1e-12);
    }
}

TEST_CASE("training preconditions") {
  CHECK_THROWS_AS(TrainNGram(TextCorpus{}, {3}), std::invalid_argument);
  CHECK_THROWS_AS(TrainNGram(CorpusFromLines({"a"}), {5}), std::invalid_argument);
  CHECK_THROWS_AS(TrainNGram(CorpusFromLines({"a"}), {0}), std::invalid_argument);
}
