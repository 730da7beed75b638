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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "altk/features/wav.hpp"
#include "altk/synth/synth.hpp"
#include "altk/util/error.hpp"
#include "doctest.h"

using namespace altk;
using namespace altk::synth;
namespace fs = std::filesystem;

namespace {

SynthSpec Small() {
  SynthSpec s;
  s.train_utterances = 12;
  s.dev_utterances = 4;
  s.test_utterances = 20;
  s.test_oov_rate = 0.3;
  s.lm_sentences = 50;
  s.seed = 17;
  return s;
}

template <typename T>
std::vector<T> Collapse(const std::vector<T>& v) {
  std::vector<T> out;
  for (const auto& x : v)
    if (out.empty() || out.back() != x) out.push_back(x);
  return out;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("inventory: phones, vocabulary and grammar") {
  const auto spec = Small();
  const auto inv = MakeInventory(spec);
  CHECK(inv.phones.size() == spec.num_phones);
  CHECK(inv.lexicon.Words().size() == spec.num_words);
  CHECK(inv.oov.size() == spec.num_oov_words);
  std::set<std::string> used;
  for (const auto& [w, prons] : inv.lexicon.entries())
    for (const auto& p : prons) {
      CHECK(p.size() >= spec.min_word_phones);
      CHECK(p.size() <= spec.max_word_phones);
      used.insert(p.begin(), p.end());
    }
  CHECK(used == std::set<std::string>(inv.phones.begin(), inv.phones.end()));
  for (const auto& [w, p] : inv.oov) CHECK_FALSE(inv.lexicon.Contains(w));
  for (const auto& [w, succ] : inv.successors) {
    double total = 0;
    for (const auto& [next, prob] : succ) total += prob;
    CHECK(total == doctest::Approx(1.0));
  }
  CheckInventory(inv);

  auto broken = inv;
  broken.oov.begin()->second = {"NOT_A_PHONE"};
  CHECK_THROWS_AS(CheckInventory(broken), VocabularyError);

  auto bad = spec;
  bad.num_phones = 0;
  CHECK_THROWS_AS(bad.Validate(), std::invalid_argument);
  bad = spec;
  bad.min_phone_frames = 30;
  CHECK_THROWS_AS(bad.Validate(), std::invalid_argument);
}

TEST_CASE("generated utterances: alignment, phones and splits") {
  const auto spec = Small();
  const auto data = Generate(spec);
  REQUIRE(data.splits.size() == 3);
  CHECK(data.splits.at("train").size() == spec.train_utterances);
  CHECK(data.splits.at("dev").size() == spec.dev_utterances);
  CHECK(data.splits.at("test").size() == spec.test_utterances);
  CHECK(data.lm_corpus.size() == spec.lm_sentences);

  std::set<std::string> ids;
  std::size_t oov_words = 0;
  for (const auto& [split, utts] : data.splits)
    for (const auto& u : utts) {
      CHECK(ids.insert(u.id).second);
      CHECK(u.id.rfind(split + "_", 0) == 0);
      CHECK(u.words.size() >= spec.min_words_per_utterance);
      CHECK(u.words.size() <= spec.max_words_per_utterance);
      const auto m = features::MelSpectrogram(u.audio, spec.features);
      REQUIRE(m.frames == u.labels.size());
      CHECK(u.audio.samples.size() == SamplesForFrames(m.frames, spec.features, spec.sample_rate));
      for (float s : u.audio.samples) REQUIRE(std::abs(s) <= 1.0f);

      // Labels collapse to the pronunciation sequence of the words.
      std::vector<std::string> expected;
      for (const auto& w : u.words) {
        const bool oov = !data.inventory.lexicon.Contains(w);
        if (oov) {
          CHECK(split == "test");
          ++oov_words;
        }
        const auto& pron =
            oov ? data.inventory.oov.at(w) : data.inventory.lexicon.Pronunciations(w).front();
        expected.insert(expected.end(), pron.begin(), pron.end());
      }
      std::vector<std::string> got;
      for (auto l : u.labels)
        if (l != data.phone_table.silence()) got.push_back(data.phone_table.Symbol(l));
      CHECK(Collapse(got) == Collapse(expected));
      CHECK(u.labels.front() == data.phone_table.silence());
      CHECK(u.labels.back() == data.phone_table.silence());
    }
  CHECK(oov_words > 0);

  // In-vocabulary transcripts map fully through the lexicon.
  for (const auto& u : data.splits.at("train"))
    CHECK(lexicon::TranscriptToPhones(data.inventory.lexicon, u.words).complete());
  // LM text never contains OOV words.
  for (const auto& line : data.lm_corpus)
    for (const auto& [w, p] : data.inventory.oov) CHECK(line.find(w) == std::string::npos);
}

TEST_CASE("dataset writing is deterministic and readable") {
  const auto spec = Small();
  const auto root = fs::temp_directory_path() / "altk_synth_test";
  fs::remove_all(root);
  const auto files_a = WriteDataset(Generate(spec), (root / "a").string());
  const auto files_b = WriteDataset(Generate(spec), (root / "b").string());
  REQUIRE(files_a == files_b);
  for (const auto& f : files_a) CHECK(Slurp(root / "a" / f) == Slurp(root / "b" / f));

  const auto manifest = features::ReadManifest((root / "a" / "test" / "manifest.tsv").string());
  CHECK(manifest.size() == spec.test_utterances);
  for (const auto& e : manifest) {
    const auto wav = features::LoadWav((root / "a" / e.wav_path).string());
    CHECK(wav.sample_rate == spec.sample_rate);
    CHECK(e.utterance_id.find(e.speaker_id) != std::string::npos);
  }
  const auto lex = lexicon::LoadLexicon((root / "a" / "lexicon.txt").string());
  CHECK(lex.Words().size() == spec.num_words);

  auto other = spec;
  other.seed = 18;
  const auto files_c = WriteDataset(Generate(other), (root / "c").string());
  CHECK(Slurp(root / "a" / "lm_corpus.txt") != Slurp(root / "c" / "lm_corpus.txt"));
  fs::remove_all(root);
}

TEST_CASE("label stretching under speed perturbation") {
  const features::FeatureConfig cfg;
  std::vector<std::int32_t> labels;
  for (int p = 0; p < 6; ++p) labels.insert(labels.end(), 10 + p, p);
  CHECK(StretchLabels(labels, 1.0, labels.size(), cfg, 16000) == labels);
  for (double f : {0.9, 1.1}) {
    features::AudioSignal sig;
    sig.sample_rate = 16000;
    sig.samples.assign(SamplesForFrames(labels.size(), cfg, 16000), 0.1f);
    const auto fast = features::SpeedPerturb(sig, f);
    const auto m = features::MelSpectrogram(fast, cfg);
    const auto s = StretchLabels(labels, f, m.frames, cfg, 16000);
    REQUIRE(s.size() == m.frames);
    CHECK(Collapse(s) == Collapse(labels));
    // Segment lengths scale by roughly 1/f.
    std::size_t first = std::count(s.begin(), s.end(), 0);
    CHECK(std::abs(static_cast<double>(first) - 10.0 / f) <= 1.5);
  }
}
