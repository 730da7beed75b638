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

#include "altk/synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "altk/util/error.hpp"
#include "altk/util/seed.hpp"

namespace altk::synth {
namespace fs = std::filesystem;
namespace {

// Vowels and consonants interleaved so any prefix has both.
const std::vector<std::string> kPhonePool = {
    "AA", "B",  "EH", "D", "IY", "K", "OW", "M", "UW", "N",  "AY", "S",  "AE", "T", "ER",
    "L",  "AO", "R",  "IH", "Z", "AH", "F", "EY", "G", "OY", "P",  "UH", "V",  "AW", "W"};

const std::vector<std::string> kWordPool = {"LOVE", "NIGHT", "HEART", "BABY", "DANCE",
                                            "SUN",  "RISE",  "FIRE",  "SOUL", "DREAM",
                                            "SHINE", "HOME", "GOLD",  "WILD", "TRUE",
                                            "STAR", "BLUE",  "SONG",  "TIME", "RAIN"};
const std::vector<std::string> kOovPool = {"SKY", "OCEAN", "THUNDER", "EMBER", "WHISPER", "ECHO"};

std::string Indexed(const std::string& base, std::size_t i) {
  std::string s = base;
  do {
    s.push_back(static_cast<char>('A' + i % 26));
    i /= 26;
  } while (i > 0);
  return s;
}

std::string WordName(std::size_t i) {
  return i < kWordPool.size() ? kWordPool[i] : Indexed("WORD", i - kWordPool.size());
}
std::string OovName(std::size_t i) {
  return i < kOovPool.size() ? kOovPool[i] : Indexed("OOV", i - kOovPool.size());
}

std::size_t Uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}
double UniformReal(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double MelOf(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }
double HzOf(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

// Two-tone signature of phone index i out of n: one low and one high
// component, each on its own mel-spaced grid.
std::pair<double, double> Signature(std::size_t i, std::size_t n, int sample_rate) {
  const double top = std::min(7200.0, 0.45 * sample_rate);
  auto grid = [&](double lo, double hi, std::size_t k) {
    const double a = MelOf(lo), b = MelOf(hi);
    return HzOf(a + (b - a) * (static_cast<double>(k) + 0.5) / static_cast<double>(n));
  };
  const std::size_t j = (i * 5 + 2) % n;  // scramble the high grid
  return {grid(250.0, 0.45 * top, i), grid(0.5 * top, top, j)};
}

struct Speaker {
  double gain;
  double tilt;
};

}  // namespace

void SynthSpec::Validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("SynthSpec: " + m); };
  if (num_phones < 2 || num_phones > kPhonePool.size())
    fail("num_phones must be in [2, " + std::to_string(kPhonePool.size()) + "]");
  if (num_words == 0) fail("num_words must be positive");
  if (min_word_phones == 0 || min_word_phones > max_word_phones)
    fail("bad word length range");
  if (num_words * max_word_phones < num_phones)
    fail("vocabulary too small to use every phone");
  if (min_phone_frames == 0 || min_phone_frames > max_phone_frames) fail("bad phone duration range");
  if (min_words_per_utterance == 0 || min_words_per_utterance > max_words_per_utterance)
    fail("bad utterance length range");
  if (num_speakers == 0) fail("num_speakers must be positive");
  if (train_utterances == 0 || test_utterances == 0) fail("train and test splits must be non-empty");
  if (!(test_oov_rate >= 0 && test_oov_rate <= 1)) fail("test_oov_rate must be in [0, 1]");
  if (test_oov_rate > 0 && num_oov_words == 0) fail("test_oov_rate needs num_oov_words > 0");
  if (sample_rate < 8000) fail("sample_rate must be at least 8000");
  features.Validate();
}

Inventory MakeInventory(const SynthSpec& spec) {
  spec.Validate();
  std::mt19937_64 rng(SubSeed(spec.seed, "synth/inventory"));
  Inventory inv;
  inv.phones.assign(kPhonePool.begin(), kPhonePool.begin() + spec.num_phones);

  // Every phone must occur in the in-vocabulary lexicon so the AM output
  // inventory matches the decoding graph; deal them out first.
  std::vector<std::string> deck = inv.phones;
  std::shuffle(deck.begin(), deck.end(), rng);
  std::set<lexicon::Pronunciation> used;
  std::vector<lexicon::Pronunciation> prons;
  for (std::size_t w = 0; w < spec.num_words; ++w) {
    for (int attempt = 0;; ++attempt) {
      lexicon::Pronunciation p;
      const std::size_t len = Uniform(rng, spec.min_word_phones, spec.max_word_phones);
      while (p.size() < len) {
        if (!deck.empty()) {
          p.push_back(deck.back());
          deck.pop_back();
        } else {
          p.push_back(inv.phones[Uniform(rng, 0, inv.phones.size() - 1)]);
        }
      }
      if (used.insert(p).second || attempt > 100) {
        prons.push_back(p);
        break;
      }
    }
  }
  // Leftover phones (tiny vocabularies) are appended to the last words.
  for (std::size_t i = 0; !deck.empty(); ++i) {
    prons[prons.size() - 1 - i % prons.size()].push_back(deck.back());
    deck.pop_back();
  }
  for (std::size_t w = 0; w < spec.num_words; ++w) inv.lexicon.Add(WordName(w), prons[w]);
  std::set<std::string> vowels;
  for (const auto& p : inv.phones)
    if (std::string("AEIOU").find(p[0]) != std::string::npos) vowels.insert(p);
  inv.lexicon.SetVowels(vowels);

  for (std::size_t o = 0; o < spec.num_oov_words; ++o) {
    lexicon::Pronunciation p;
    const std::size_t len = Uniform(rng, spec.min_word_phones, spec.max_word_phones);
    while (p.size() < len) p.push_back(inv.phones[Uniform(rng, 0, inv.phones.size() - 1)]);
    inv.oov[OovName(o)] = p;
  }

  // Sparse sentence grammar: each word prefers up to three successors.
  const auto words = inv.lexicon.Words();
  for (const auto& w : words) {
    std::vector<std::string> next = words;
    std::shuffle(next.begin(), next.end(), rng);
    next.resize(std::min<std::size_t>(3, next.size()));
    std::sort(next.begin(), next.end());
    std::vector<std::pair<std::string, double>> probs;
    double total = 0;
    for (const auto& n : next) {
      const double p = UniformReal(rng, 0.2, 1.0);
      probs.emplace_back(n, p);
      total += p;
    }
    for (auto& [n, p] : probs) p /= total;
    inv.successors[w] = probs;
  }
  return inv;
}

void CheckInventory(const Inventory& inv) {
  const std::set<std::string> phones(inv.phones.begin(), inv.phones.end());
  auto check = [&](const std::string& word, const lexicon::Pronunciation& p) {
    for (const auto& ph : p)
      if (!phones.count(ph))
        throw VocabularyError("word " + word + " uses phone " + ph + " outside the inventory");
  };
  for (const auto& [w, prons] : inv.lexicon.entries())
    for (const auto& p : prons) check(w, p);
  for (const auto& [w, p] : inv.oov) check(w, p);
}

std::size_t SamplesForFrames(std::size_t frames, const features::FeatureConfig& config,
                             int sample_rate) {
  if (frames == 0) return 0;
  return (frames - 1) * config.HopSamples(sample_rate) + config.FrameSamples(sample_rate);
}

std::vector<std::int32_t> StretchLabels(const std::vector<std::int32_t>& labels, double factor,
                                        std::size_t new_frames,
                                        const features::FeatureConfig& config, int sample_rate) {
  if (labels.empty()) throw std::invalid_argument("StretchLabels: empty label sequence");
  if (!(factor > 0)) throw std::invalid_argument("StretchLabels: factor must be positive");
  const double hop = static_cast<double>(config.HopSamples(sample_rate));
  const double half = 0.5 * static_cast<double>(config.FrameSamples(sample_rate));
  std::vector<std::int32_t> out(new_frames);
  for (std::size_t t = 0; t < new_frames; ++t) {
    const double centre = (static_cast<double>(t) * hop + half) * factor;
    const double src = std::round((centre - half) / hop);
    const auto idx = static_cast<std::size_t>(
        std::clamp(src, 0.0, static_cast<double>(labels.size() - 1)));
    out[t] = labels[idx];
  }
  return out;
}

namespace {

std::vector<std::string> SampleSentence(const Inventory& inv, std::size_t len,
                                        std::mt19937_64& rng) {
  const auto words = inv.lexicon.Words();
  std::vector<std::string> out = {words[Uniform(rng, 0, words.size() - 1)]};
  while (out.size() < len) {
    const auto& next = inv.successors.at(out.back());
    double r = UniformReal(rng, 0.0, 1.0);
    std::string pick = next.back().first;
    for (const auto& [w, p] : next) {
      if (r < p) {
        pick = w;
        break;
      }
      r -= p;
    }
    out.push_back(pick);
  }
  return out;
}

SynthUtterance Synthesize(const SynthSpec& spec, const Inventory& inv,
                          const lexicon::PhoneTable& table, const std::vector<Speaker>& speakers,
                          const std::string& split, std::size_t index) {
  SynthUtterance u;
  const std::size_t spk = index % speakers.size();
  std::ostringstream id, sid;
  sid << "spk" << std::setw(2) << std::setfill('0') << spk;
  id << split << '_' << sid.str() << '_' << std::setw(4) << std::setfill('0') << index;
  u.id = id.str();
  u.speaker = sid.str();
  std::mt19937_64 rng(SubSeed(spec.seed, "synth/utt/" + u.id));

  const std::size_t len = Uniform(rng, spec.min_words_per_utterance, spec.max_words_per_utterance);
  u.words = SampleSentence(inv, len, rng);
  if (split == "test" && !inv.oov.empty())
    for (auto& w : u.words)
      if (UniformReal(rng, 0.0, 1.0) < spec.test_oov_rate) {
        auto it = inv.oov.begin();
        std::advance(it, Uniform(rng, 0, inv.oov.size() - 1));
        w = it->first;
      }

  // Frame-level phone sequence with silences.
  std::vector<std::int32_t>& labels = u.labels;
  auto append = [&](int phone, std::size_t frames) { labels.insert(labels.end(), frames, phone); };
  append(table.silence(), Uniform(rng, 4, 12));
  for (std::size_t i = 0; i < u.words.size(); ++i) {
    const auto& w = u.words[i];
    const auto& pron = inv.oov.count(w) ? inv.oov.at(w) : inv.lexicon.Pronunciations(w).front();
    for (const auto& ph : pron)
      append(table.Id(ph), Uniform(rng, spec.min_phone_frames, spec.max_phone_frames));
    if (i + 1 < u.words.size() && UniformReal(rng, 0.0, 1.0) < 0.25)
      append(table.silence(), Uniform(rng, 3, 8));
  }
  append(table.silence(), Uniform(rng, 4, 12));

  // Audio: frame t owns the hop centred on its analysis window.
  const int sr = spec.sample_rate;
  const std::size_t hop = spec.features.HopSamples(sr);
  const std::size_t frame = spec.features.FrameSamples(sr);
  const std::size_t total = SamplesForFrames(labels.size(), spec.features, sr);
  const std::size_t offset = (frame - hop) / 2;
  u.audio.sample_rate = sr;
  u.audio.speaker_id = u.speaker;
  u.audio.utterance_id = u.id;
  u.audio.samples.assign(total, 0.0f);
  std::normal_distribution<double> noise(0.0, 0.003);
  const Speaker& voice = speakers[spk];
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t t = 0; t < labels.size();) {
    std::size_t t_end = t;
    while (t_end < labels.size() && labels[t_end] == labels[t]) ++t_end;
    const std::size_t s0 = t == 0 ? 0 : t * hop + offset;
    const std::size_t s1 = t_end == labels.size() ? total : t_end * hop + offset;
    const int phone = labels[t];
    if (phone != table.silence()) {
      const auto [f1, f2] = Signature(static_cast<std::size_t>(phone - 1),
                                      static_cast<std::size_t>(table.size() - 1), sr);
      const double amp = voice.gain * UniformReal(rng, 0.7, 1.3);
      const double a1 = amp * 0.3 * std::pow(f1 / 1000.0, voice.tilt);
      const double a2 = amp * 0.15 * std::pow(f2 / 1000.0, voice.tilt);
      const double ph1 = UniformReal(rng, 0.0, two_pi), ph2 = UniformReal(rng, 0.0, two_pi);
      for (std::size_t s = s0; s < s1; ++s) {
        const double time = static_cast<double>(s - s0) / sr;
        u.audio.samples[s] = static_cast<float>(a1 * std::sin(two_pi * f1 * time + ph1) +
                                                a2 * std::sin(two_pi * f2 * time + ph2));
      }
    }
    t = t_end;
  }
  for (auto& s : u.audio.samples)
    s = std::clamp(static_cast<float>(s + noise(rng)), -1.0f, 1.0f);
  return u;
}

}  // namespace

SynthDataset Generate(const SynthSpec& spec) {
  SynthDataset data;
  data.inventory = MakeInventory(spec);
  CheckInventory(data.inventory);
  data.phone_table = lexicon::PhoneTable(data.inventory.lexicon);

  std::mt19937_64 rng(SubSeed(spec.seed, "synth/speakers"));
  std::vector<Speaker> speakers(spec.num_speakers);
  for (auto& s : speakers) {
    s.gain = UniformReal(rng, 0.5, 1.0);
    s.tilt = UniformReal(rng, -0.5, 0.5);
  }
  const std::vector<std::pair<std::string, std::size_t>> splits = {
      {"train", spec.train_utterances}, {"dev", spec.dev_utterances}, {"test", spec.test_utterances}};
  for (const auto& [name, count] : splits)
    for (std::size_t i = 0; i < count; ++i)
      data.splits[name].push_back(
          Synthesize(spec, data.inventory, data.phone_table, speakers, name, i));

  std::mt19937_64 lm_rng(SubSeed(spec.seed, "synth/lm"));
  for (std::size_t i = 0; i < spec.lm_sentences; ++i) {
    const auto words = SampleSentence(
        data.inventory,
        Uniform(lm_rng, spec.min_words_per_utterance, spec.max_words_per_utterance + 2), lm_rng);
    std::string line;
    for (const auto& w : words) line += (line.empty() ? "" : " ") + w;
    data.lm_corpus.push_back(line);
  }
  return data;
}

std::vector<std::string> WriteDataset(const SynthDataset& data, const std::string& dir) {
  std::vector<std::string> written;
  fs::create_directories(fs::path(dir) / "wav");
  for (const auto& [split, utts] : data.splits) {
    fs::create_directories(fs::path(dir) / split);
    std::vector<features::ManifestEntry> manifest;
    std::map<std::string, std::vector<std::int32_t>> labels;
    for (const auto& u : utts) {
      const std::string rel = "wav/" + u.id + ".wav";
      features::WriteWav((fs::path(dir) / rel).string(), u.audio);
      written.push_back(rel);
      std::string text;
      for (const auto& w : u.words) text += (text.empty() ? "" : " ") + w;
      manifest.push_back({u.id, rel, u.speaker, text});
      labels[u.id] = u.labels;
    }
    features::WriteManifest((fs::path(dir) / split / "manifest.tsv").string(), manifest);
    written.push_back(split + "/manifest.tsv");
    std::ofstream out(fs::path(dir) / split / "labels.txt");
    for (const auto& [utt, seq] : labels) {
      out << utt;
      for (auto l : seq) out << ' ' << l;
      out << '\n';
    }
    written.push_back(split + "/labels.txt");
  }
  lexicon::SaveLexicon((fs::path(dir) / "lexicon.txt").string(), data.inventory.lexicon);
  written.push_back("lexicon.txt");
  {
    std::ofstream out(fs::path(dir) / "phones.txt");
    for (int i = 0; i < data.phone_table.size(); ++i) out << data.phone_table.Symbol(i) << ' ' << i << '\n';
    written.push_back("phones.txt");
  }
  {
    std::ofstream out(fs::path(dir) / "lm_corpus.txt");
    for (const auto& line : data.lm_corpus) out << line << '\n';
    written.push_back("lm_corpus.txt");
  }
  return written;
}

}  // namespace altk::synth
