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
#include <functional>
#include <random>
#include <sstream>

#include "altk/decoder/decoder.hpp"
#include "altk/decoder/rescore.hpp"
#include "altk/util/error.hpp"
#include "decoder_oracle.hpp"
#include "doctest.h"

using namespace altk;
using namespace altk::decoder;

namespace {

using namespace altk::testing;

void RequireSameScores(const SequenceScores& a, const SequenceScores& b, double tol = 1e-9) {
  REQUIRE(a.size() == b.size());
  for (const auto& [seq, s] : a) {
    auto it = b.find(seq);
    REQUIRE(it != b.end());
    REQUIRE(std::abs(it->second - s) < tol);
  }
}

// Each path of the input lattice, rescored from scratch.
SequenceScores RnnlmOracle(const Lattice& lat, const lm::RecurrentLM& rnn, double w) {
  SequenceScores best;
  std::vector<const LatticeArc*> path;
  std::function<void(int)> dfs = [&](int v) {
    if (auto f = lat.finals.find(v); f != lat.finals.end()) {
      auto state = rnn.InitialState();
      double score = 0;
      std::vector<std::string> words;
      for (const auto* a : path) {
        double lm = a->lm;
        if (!a->is_epsilon()) {
          auto step = rnn.Step(state, rnn.IdOrUnk(a->word));
          lm = (1 - w) * a->lm + w * step.logp;
          state = step.next;
          words.push_back(a->word);
        }
        score += lat.acoustic_scale * a->am + lm +
                 (a->is_epsilon() ? 0.0 : lat.word_insertion_penalty);
      }
      score += (1 - w) * f->second + w * rnn.LogDistribution(state)[rnn.eos()];
      auto [it, inserted] = best.emplace(words, score);
      if (!inserted) it->second = std::max(it->second, score);
    }
    for (const auto& a : lat.arcs)
      if (a.from == v) {
        path.push_back(&a);
        dfs(a.to);
        path.pop_back();
      }
  };
  dfs(lat.start);
  return best;
}

Lattice Chain(const std::vector<std::string>& words) {
  Lattice lat;
  lat.start = lat.AddNode(0);
  int prev = lat.start;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const int next = lat.AddNode(static_cast<int>(i + 1) * 10);
    lat.arcs.push_back({prev, next, words[i], -1.5 * (i + 1), -0.25});
    prev = next;
  }
  lat.finals[prev] = -0.5;
  return lat;
}

}  // namespace

TEST_CASE("graph: prefix sharing, vocabulary checks, unk loop") {
  auto lex = lexicon::ParseLexicon("AB A B\nAC A C\n");
  auto lm = lm::TrainNGram(lm::CorpusFromLines({"AB AC", "AC"}), {2});
  auto g = BuildGraph(lex, lm);
  CHECK(g.RootChildren().size() == 1);
  CHECK(g.num_tree_states() == 3);
  const auto& a = g.Tree(g.RootChildren()[0]);
  CHECK(a.children.size() == 2);
  CHECK(a.words.empty());
  for (int c : a.children) CHECK(g.Tree(c).words.size() == 1);
  CHECK_FALSE(g.has_unk());

  auto bigger = lm::TrainNGram(lm::CorpusFromLines({"AB AC AD"}), {2});
  CHECK_THROWS_AS(BuildGraph(lex, bigger), VocabularyError);
  CHECK_THROWS_AS(BuildGraph(lex, lm, {true, 0.5}), VocabularyError);
  auto with_unk = lm::AttachUnk(lm);
  auto gu = BuildGraph(lex, with_unk, {true, 0.5});
  CHECK(gu.has_unk());
  CHECK(gu.num_unk_states() == 3);
  CHECK_THROWS_AS(BuildGraph(lexicon::Lexicon{}, lm), std::invalid_argument);
}

TEST_CASE("decode: two frames, one word") {
  auto lex = lexicon::ParseLexicon("X A\n");
  auto lm = lm::TrainNGram(lm::CorpusFromLines({"X"}), {2});
  auto g = BuildGraph(lex, lm);
  // Columns: SIL, A.
  ScoreMatrix am{2, 2, {std::log(0.1f), std::log(0.9f), std::log(0.6f), std::log(0.4f)}};
  DecodeParams p = Exhaustive();
  auto r = Decode(am, g, p);
  // Candidates: X over both frames, X then SIL, SIL then X, silence only.
  const double lm_x = lm.Score({"<s>"}, "X") + lm.Score({"<s>", "X"}, "</s>");
  const double lm_sil = lm.Score({"<s>"}, "</s>");
  auto at = [&](std::size_t t, std::size_t k) { return static_cast<double>(am.at(t, k)); };
  const double cands[] = {at(0, 1) + at(1, 1) + lm_x, at(0, 1) + at(1, 0) + lm_x,
                          at(0, 0) + at(1, 1) + lm_x, at(0, 0) + at(1, 0) + lm_sil};
  const double best = *std::max_element(std::begin(cands), std::end(cands));
  CHECK(r.hypothesis.score == doctest::Approx(best).epsilon(1e-12));
  CHECK(r.hypothesis.words == std::vector<std::string>{"X"});
  CHECK(r.hypothesis.timing.at(0).end_frame == 2);
  CHECK_FALSE(r.hypothesis.partial);

  ScoreMatrix wrong{2, 3, std::vector<float>(6, -1.0f)};
  CHECK_THROWS_AS(Decode(wrong, g, p), VocabularyError);
  DecodeParams bad;
  bad.lattice_beam = 20;
  CHECK_THROWS_AS(Decode(am, g, bad), std::invalid_argument);
}

TEST_CASE("decode: exhaustive search equivalence on random toys") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const bool with_unk = trial % 3 == 2;
    Toy toy = RandomToy(rng, with_unk);
    GraphOptions go;
    go.use_unk = with_unk;
    auto g = BuildGraph(toy.lex, toy.lm, go);
    const std::size_t T = 1 + rng() % 4;
    auto am = RandomLogPosteriors(T, g.phones().size(), rng);
    DecodeParams p = Exhaustive();
    p.acoustic_scale = std::uniform_real_distribution<double>(0.3, 1.5)(rng);
    p.word_insertion_penalty = std::uniform_real_distribution<double>(-1, 1)(rng);
    auto r = Decode(am, g, p);

    lexicon::UnkModel unk = lexicon::MakeUnkModel(toy.lex, 0.5);
    Oracle oracle{am, toy.lex, g.phones(), toy.lm, p, with_unk ? &unk : nullptr, {}};
    oracle.Run();
    const auto lattice_seqs = EnumerateSequences(r.lattice);
    RequireSameScores(oracle.best, lattice_seqs);
    double best = -kInf;
    std::vector<std::string> best_words;
    for (const auto& [seq, s] : oracle.best)
      if (s > best) best = s, best_words = seq;
    REQUIRE(r.hypothesis.score == doctest::Approx(best).epsilon(1e-12));
    REQUIRE(r.hypothesis.words == best_words);
    const auto bp = BestPath(r.lattice);
    REQUIRE(bp.words == r.hypothesis.words);
    REQUIRE(bp.score == r.hypothesis.score);
    REQUIRE(ComputeLatticeStats(r.lattice).num_word_sequences == oracle.best.size());

    // Rescoring with the decoding LM changes nothing.
    auto same = RescoreNgram(r.lattice, toy.lm);
    RequireSameScores(lattice_seqs, EnumerateSequences(same));
    REQUIRE(BestPath(same).words == r.hypothesis.words);

    // Monotone pruning.
    std::size_t prev = lattice_seqs.size();
    for (double beam : {8.0, 4.0, 2.0, 1.0, 0.5}) {
      auto pruned = PruneLattice(r.lattice, beam);
      ValidateLattice(pruned);
      auto seqs = EnumerateSequences(pruned);
      REQUIRE(seqs.size() <= prev);
      for (const auto& [seq, s] : seqs) REQUIRE(lattice_seqs.count(seq));
      REQUIRE(seqs.count(r.hypothesis.words));
      prev = seqs.size();
    }
  }
}

TEST_CASE("decode: single frame with a tiny beam still yields a word") {
  auto lex = lexicon::ParseLexicon("X A\nY B\n");
  auto lm = lm::TrainNGram(lm::CorpusFromLines({"X", "Y"}), {2});
  auto g = BuildGraph(lex, lm);
  std::mt19937 rng(3);
  auto am = RandomLogPosteriors(1, g.phones().size(), rng);
  am.data[0] = -20.0f;  // silence is implausible
  DecodeParams p;
  p.beam = 1e-3;
  p.lattice_beam = 1e-3;
  p.max_active_tokens = 1;
  auto r = Decode(am, g, p);
  CHECK(r.hypothesis.words.size() == 1);
  CHECK(r.max_tokens == 1);
}

TEST_CASE("decode: partial output when no word can finish") {
  auto lex = lexicon::ParseLexicon("LONG A B C\n");
  auto lm = lm::TrainNGram(lm::CorpusFromLines({"LONG"}), {2});
  auto g = BuildGraph(lex, lm);
  std::mt19937 rng(5);
  auto am = RandomLogPosteriors(2, g.phones().size(), rng);
  for (std::size_t t = 0; t < 2; ++t) am.data[t * am.num_phones] = -50.0f;
  // The only complete path is silence, far outside the default beam.
  auto r = Decode(am, g, DecodeParams{});
  CHECK(r.hypothesis.partial);
  CHECK(r.hypothesis.words.empty());
  ValidateLattice(r.lattice);
  auto wide = Decode(am, g, Exhaustive());
  CHECK_FALSE(wide.hypothesis.partial);
  CHECK(wide.hypothesis.words.empty());
}

TEST_CASE("lattice: best path, stats, dot and text round trip") {
  auto single = Chain({"AS", "THE", "SUN"});
  ValidateLattice(single);
  auto h = BestPath(single);
  CHECK(h.words == std::vector<std::string>{"AS", "THE", "SUN"});
  CHECK(h.score == doctest::Approx(-1.5 - 3.0 - 4.5 - 0.75 - 0.5));
  auto st = ComputeLatticeStats(single);
  CHECK(st.num_nodes == 4);
  CHECK(st.num_arcs == 3);
  CHECK(st.num_word_sequences == 1);

  // Diamond: two alternatives between the same nodes.
  Lattice diamond;
  diamond.start = diamond.AddNode(0);
  const int mid1 = diamond.AddNode(3), mid2 = diamond.AddNode(3), end = diamond.AddNode(6);
  diamond.arcs = {{0, mid1, "SUN", -2, -1}, {0, mid2, "SON", -1, -1},
                  {mid1, end, "RISE", -1, -1}, {mid2, end, "RISE", -1, -1}};
  diamond.finals[end] = 0;
  CHECK(BestPath(diamond).words == std::vector<std::string>{"SON", "RISE"});
  CHECK(ComputeLatticeStats(diamond).num_word_sequences == 2);
  // Equal scores: lexicographically smaller sequence wins.
  diamond.arcs[0].am = -1;
  CHECK(BestPath(diamond).words == std::vector<std::string>{"SON", "RISE"});

  Lattice lone;
  lone.start = lone.AddNode(0);
  lone.finals[0] = 0;
  const auto empty_dot = LatticeToDot(lone);
  CHECK(empty_dot.find("->") == std::string::npos);
  CHECK(empty_dot.find("n0 [") != std::string::npos);
  const auto dot = LatticeToDot(Chain({"SUN"}));
  CHECK(std::count(dot.begin(), dot.end(), '>') == 1);
  CHECK(dot.find("SUN/-1.500:-0.250") != std::string::npos);
  CHECK(LatticeToDot(diamond) == LatticeToDot(diamond));

  std::stringstream ss;
  WriteLattice(ss, diamond);
  auto back = ReadLattice(ss);
  CHECK(back.arcs.size() == diamond.arcs.size());
  for (std::size_t i = 0; i < back.arcs.size(); ++i) {
    CHECK(back.arcs[i].am == diamond.arcs[i].am);
    CHECK(back.arcs[i].word == diamond.arcs[i].word);
  }
  CHECK(back.finals == diamond.finals);

  Lattice cyclic = diamond;
  cyclic.arcs.push_back({end, 0, "BACK", 0, 0});
  CHECK_THROWS_AS(ValidateLattice(cyclic), std::logic_error);
  Lattice dangling = diamond;
  dangling.AddNode(9);
  CHECK_THROWS_AS(ValidateLattice(dangling), std::logic_error);
  CHECK_THROWS_AS(BestPath(Lattice{}), std::invalid_argument);
}

TEST_CASE("rescore_ngram: hand-computed four-gram scores") {
  // ML 4-gram on {A B C, A B D}: P(A|<s>) = P(B|<s> A) = 1,
  // P(C|<s> A B) = 1/2, P(</s>|A B C) = 1.
  auto lm4 = lm::TrainNGram(lm::CorpusFromLines({"A B C", "A B D"}),
                            {4, lm::Smoothing::kMaximumLikelihood, 0.75});
  auto lat = Chain({"A", "B", "C"});
  auto r = RescoreNgram(lat, lm4);
  REQUIRE(r.arcs.size() == 3);
  CHECK(r.arcs[0].lm == doctest::Approx(0.0));
  CHECK(r.arcs[1].lm == doctest::Approx(0.0));
  CHECK(r.arcs[2].lm == doctest::Approx(std::log(0.5)));
  CHECK(r.finals.begin()->second == doctest::Approx(0.0));
  for (std::size_t i = 0; i < 3; ++i) CHECK(r.arcs[i].am == lat.arcs[i].am);

  auto lm2 = lm::TrainNGram(lm::CorpusFromLines({"A B C"}), {2});
  CHECK_THROWS_AS(RescoreNgram(Chain({"A", "Q"}), lm2), VocabularyError);
}

TEST_CASE("rescore_ngram: higher order on decoded lattices") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    Toy toy = RandomToy(rng, false);
    auto g = BuildGraph(toy.lex, toy.lm);
    auto am = RandomLogPosteriors(2 + rng() % 3, g.phones().size(), rng);
    auto r = Decode(am, g, Exhaustive());
    std::vector<std::string> lines = {"WA WB WC", "WC WB", "WA WA WB WC"};
    auto lm4 = lm::TrainNGram(lm::CorpusFromLines(lines), {4}, {"WA", "WB", "WC"});
    auto re = RescoreNgram(r.lattice, lm4);
    const auto before = EnumerateSequences(r.lattice), after = EnumerateSequences(re);
    REQUIRE(before.size() == after.size());
    for (const auto& [seq, s] : before) REQUIRE(after.count(seq));
    // Best path score equals acoustic part plus the 4-gram sentence score.
    const auto best = BestPath(re);
    double am_part = 0;
    std::vector<std::string> words;
    int v = re.start;
    // Walk the returned path using its timing.
    for (const auto& t : best.timing) {
      for (const auto& a : re.arcs)
        if (a.from == v && a.word == t.word && re.node_frames[a.to] == t.end_frame) {
          const double lm_expected = lm4.Score([&] {
            std::vector<std::string> h = {"<s>"};
            h.insert(h.end(), words.begin(), words.end());
            return h;
          }(), a.word);
          if (a.lm == lm_expected) {
            am_part += re.acoustic_scale * a.am + re.word_insertion_penalty;
            v = a.to;
            words.push_back(a.word);
            break;
          }
        }
    }
    if (best.words.empty()) continue;  // silence-only paths carry an epsilon arc
    REQUIRE(words == best.words);
    REQUIRE(best.score == doctest::Approx(am_part + lm4.SentenceLogProb(best.words)).epsilon(1e-12));
  }
}

TEST_CASE("rescore_rnnlm: identity, two-path choice, exact on short paths") {
  auto corpus = lm::CorpusFromLines({"WA WB", "WB WC WA", "WC", "WA WA WC"});
  lm::RnnlmConfig cfg;
  cfg.dim = 6;
  cfg.epochs = 3;
  auto rnn = lm::TrainRnnlm(corpus, corpus, cfg).model;

  std::mt19937 rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    Toy toy = RandomToy(rng, false);
    auto g = BuildGraph(toy.lex, toy.lm);
    auto am = RandomLogPosteriors(1 + rng() % 3, g.phones().size(), rng);
    auto lat = Decode(am, g, Exhaustive()).lattice;
    const auto orig = EnumerateSequences(lat);

    RnnlmRescoreOptions zero{0.0, kInf, 3};
    RequireSameScores(orig, EnumerateSequences(RescoreRnnlm(lat, rnn, zero)));

    for (double w : {0.5, 1.0}) {
      RnnlmRescoreOptions opts{w, kInf, 3};
      RequireSameScores(RnnlmOracle(lat, rnn, w), EnumerateSequences(RescoreRnnlm(lat, rnn, opts)));
    }
  }

  // Two competing single-word paths.
  Lattice two;
  two.start = two.AddNode(0);
  const int e1 = two.AddNode(5), e2 = two.AddNode(5);
  two.arcs = {{0, e1, "WA", -2.0, -0.1}, {0, e2, "WC", -2.3, -5.0}};
  two.finals = {{e1, 0.0}, {e2, 0.0}};
  auto rescored = RescoreRnnlm(two, rnn, {1.0, kInf, 3});
  auto total = [&](const std::string& w, double am) {
    return am + rnn.SentenceLogProb({w});
  };
  const std::string expected = total("WA", -2.0) >= total("WC", -2.3) ? "WA" : "WC";
  CHECK(BestPath(rescored).words == std::vector<std::string>{expected});
  CHECK_THROWS_AS(RescoreRnnlm(two, rnn, {1.5, 8.0, 3}), std::invalid_argument);
}

TEST_CASE("lattice archive round trip") {
  auto path = std::filesystem::temp_directory_path() / "altk_lattices.txt";
  WriteLatticeArchive(path.string(), {{"u1", Chain({"A"})}, {"u2", Chain({"B", "C"})}});
  auto back = ReadLatticeArchive(path.string());
  REQUIRE(back.size() == 2);
  CHECK(back[1].first == "u2");
  CHECK(BestPath(back[1].second).words == std::vector<std::string>{"B", "C"});
}
