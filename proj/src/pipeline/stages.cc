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

#include "altk/pipeline/stages.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include "altk/am/train.hpp"
#include "altk/analysis/attention.hpp"
#include "altk/decoder/graph.hpp"
#include "altk/features/archive.hpp"
#include "altk/lm/ngram.hpp"
#include "altk/scoring/wer.hpp"
#include "altk/util/error.hpp"
#include "altk/util/seed.hpp"

namespace altk::pipeline {
namespace fs = std::filesystem;
namespace {

const std::vector<std::string> kSplits = {"train", "dev", "test"};
const std::vector<std::string> kEvalSplits = {"dev", "test"};

void Emit(const Log& log, const std::string& msg) {
  if (log) log(msg);
}

fs::path Root(const RunConfig& c) { return fs::path(c.output_dir); }

void Require(const fs::path& p) {
  if (!fs::exists(p)) throw Error("missing input " + p.string() + " (run the earlier stage first)");
}

// Writes through `<path>.tmp` and renames, so a rerun never leaves a
// half-written output behind.
void Atomically(const fs::path& path, const std::function<void(const std::string&)>& write) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  write(tmp.string());
  fs::rename(tmp, path);
}

void WriteText(const fs::path& path, const std::string& text) {
  Atomically(path, [&](const std::string& tmp) {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(tmp + ": cannot write");
    out << text;
  });
}

class Outputs {
 public:
  Outputs(const RunConfig& c, std::string stage) : root_(Root(c)), stage_(std::move(stage)) {}
  fs::path Add(const fs::path& rel) {
    files_.push_back(rel.generic_string());
    return root_ / rel;
  }
  std::vector<std::string> Finish() {
    std::ostringstream os;
    for (const auto& f : files_) os << f << '\n';
    WriteText(root_ / "manifests" / (stage_ + ".txt"), os.str());
    return files_;
  }

 private:
  fs::path root_;
  std::string stage_;
  std::vector<std::string> files_;
};

std::string SpeedPrefix(double f) {
  std::ostringstream os;
  os << "sp" << f << "-";
  return os.str();
}

lexicon::PhoneTable ReadPhones(const fs::path& path) {
  Require(path);
  std::ifstream in(path);
  std::vector<std::string> symbols;
  std::string sym;
  int id = 0;
  while (in >> sym >> id) {
    if (id != static_cast<int>(symbols.size())) throw FormatError(path.string() + ": ids must be 0..K-1");
    symbols.push_back(sym);
  }
  return lexicon::PhoneTable(symbols);
}

struct SplitFeatures {
  std::vector<features::FeatureMatrix> feats;
  am::LabelMap labels;
  std::map<std::string, am::SpeakerEmbedding> embeddings;

  std::vector<am::Utterance> Utterances(bool with_labels) const {
    std::vector<am::Utterance> out;
    for (const auto& f : feats)
      out.push_back({&f, with_labels ? &labels.at(f.utterance_id) : nullptr,
                     &embeddings.at(f.speaker_id)});
    return out;
  }
};

SplitFeatures LoadSplit(const RunConfig& c, const std::string& split, bool labels) {
  const fs::path dir = Root(c) / "features";
  Require(dir / (split + ".ark"));
  Require(dir / (split + "_embeddings.txt"));
  SplitFeatures s;
  s.feats = features::ReadArchive((dir / (split + ".ark")).string());
  s.embeddings = am::ReadEmbeddings((dir / (split + "_embeddings.txt")).string());
  if (labels) {
    Require(dir / (split + "_labels.txt"));
    s.labels = am::ReadLabels((dir / (split + "_labels.txt")).string());
  }
  return s;
}

// Per-frame log-posteriors for every utterance, in parallel on model copies.
std::vector<decoder::ScoreMatrix> Posteriors(const am::AcousticModel& model,
                                             const std::vector<am::Utterance>& utts) {
  std::vector<decoder::ScoreMatrix> out(utts.size());
  const int n = static_cast<int>(utts.size());
#pragma omp parallel
  {
    am::AcousticModel local = model;
#pragma omp for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
      const auto& u = utts[static_cast<std::size_t>(i)];
      const auto lp = am::ForwardPosteriors(local, *u.features, *u.embedding);
      auto& s = out[static_cast<std::size_t>(i)];
      s.frames = lp.dim(0);
      s.num_phones = lp.dim(1);
      s.data = lp.vec();
    }
  }
  return out;
}

std::string ArpaName(int order, bool unk) {
  return std::to_string(order) + "g" + (unk ? "_unk" : "") + ".arpa";
}

std::string Key(int order, bool unk) { return std::to_string(order) + "G" + (unk ? "_unk" : ""); }

void WriteHyps(const fs::path& path, const std::vector<std::string>& ids,
               const std::vector<decoder::Hypothesis>& hyps) {
  std::vector<std::pair<std::string, std::string>> rows;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::string text;
    for (const auto& w : hyps[i].words) text += (text.empty() ? "" : " ") + w;
    rows.push_back({ids[i], text});
  }
  Atomically(path, [&](const std::string& tmp) { scoring::WriteHypotheses(tmp, rows); });
}

void WriteLats(const fs::path& path,
               const std::vector<std::pair<std::string, decoder::Lattice>>& lats) {
  Atomically(path, [&](const std::string& tmp) { decoder::WriteLatticeArchive(tmp, lats); });
}

decoder::Hypothesis Best(const decoder::Lattice& lat) {
  try {
    return decoder::BestPath(lat);
  } catch (const std::invalid_argument&) {
    return {};  // no complete path: empty hypothesis
  }
}

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string Fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

std::vector<std::string> LmKeys(const RunConfig& c) {
  std::vector<std::string> keys;
  for (int order : {c.lm.first_pass_order, c.lm.rescore_order}) {
    if (!keys.empty() && order == c.lm.first_pass_order) break;
    keys.push_back(Key(order, false));
    if (c.lm.unk) keys.push_back(Key(order, true));
  }
  return keys;
}

std::vector<std::string> RunSynth(const RunConfig& c, const Log& log) {
  Outputs out(c, "synth");
  auto spec = c.synth;
  spec.seed = SubSeed(c.seed, "synth");
  const auto data = synth::Generate(spec);
  const fs::path dir = Root(c) / "data";
  const fs::path tmp = Root(c) / "data.tmp";
  fs::remove_all(tmp);
  const auto files = synth::WriteDataset(data, tmp.string());
  fs::remove_all(dir);
  fs::rename(tmp, dir);
  for (const auto& f : files) out.Add(fs::path("data") / f);
  Emit(log, "synth: " + std::to_string(files.size()) + " files");
  return out.Finish();
}

std::vector<std::string> RunFeatures(const RunConfig& c, const Log& log) {
  Outputs out(c, "features");
  const fs::path data = Root(c) / "data";
  const auto& fc = c.synth.features;
  for (const auto& split : kSplits) {
    Require(data / split / "manifest.tsv");
    Require(data / split / "labels.txt");
    const auto manifest = features::ReadManifest((data / split / "manifest.tsv").string());
    const auto labels = am::ReadLabels((data / split / "labels.txt").string());
    const std::vector<double> factors =
        split == "train" ? c.speed_factors : std::vector<double>{1.0};

    struct Job {
      std::size_t entry;
      double factor;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < manifest.size(); ++i)
      for (double f : factors) jobs.push_back({i, f});
    std::vector<features::FeatureMatrix> raw(jobs.size());
    std::vector<std::vector<std::int32_t>> lab(jobs.size());
    std::vector<std::string> errors(jobs.size());
    const int n = static_cast<int>(jobs.size());
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < n; ++j) {
      const auto& job = jobs[static_cast<std::size_t>(j)];
      const auto& e = manifest[job.entry];
      try {
        auto audio = features::LoadWav((data / e.wav_path).string());
        const std::string id = job.factor == 1.0 ? e.utterance_id
                                                 : SpeedPrefix(job.factor) + e.utterance_id;
        if (job.factor != 1.0) audio = features::SpeedPerturb(audio, job.factor);
        audio.utterance_id = id;
        auto m = features::MelSpectrogram(audio, fc);
        m.utterance_id = id;
        m.speaker_id = e.speaker_id;
        const auto& ref = labels.at(e.utterance_id);
        if (job.factor == 1.0) {
          if (ref.size() != m.frames)
            throw Error(e.utterance_id + ": " + std::to_string(ref.size()) + " labels for " +
                        std::to_string(m.frames) + " frames");
          lab[j] = ref;
        } else {
          lab[j] = synth::StretchLabels(ref, job.factor, m.frames, fc, audio.sample_rate);
        }
        raw[j] = std::move(m);
      } catch (const std::exception& ex) {
        errors[j] = ex.what();
      }
    }
    for (const auto& err : errors)
      if (!err.empty()) throw Error("features (" + split + "): " + err);

    // Speaker embeddings come from the raw features; CMVN would erase the
    // statistics they summarize.
    std::map<std::string, std::vector<const features::FeatureMatrix*>> by_speaker;
    for (const auto& m : raw) by_speaker[m.speaker_id].push_back(&m);
    std::map<std::string, am::SpeakerEmbedding> emb;
    for (const auto& [spk, list] : by_speaker) emb[spk] = am::ComputeSpeakerEmbedding(list);
    const auto stats = features::AccumulateSpeakerStats(raw);

    const fs::path ark = out.Add(fs::path("features") / (split + ".ark"));
    const fs::path idx = out.Add(fs::path("features") / (split + ".idx"));
    fs::create_directories(ark.parent_path());
    {
      features::ArchiveWriter writer(ark.string() + ".tmp", idx.string() + ".tmp");
      for (const auto& m : raw) writer.Write(features::ApplyCmvn(m, stats.at(m.speaker_id)));
      writer.Close();
    }
    fs::rename(ark.string() + ".tmp", ark);
    fs::rename(idx.string() + ".tmp", idx);
    am::LabelMap label_map;
    for (std::size_t j = 0; j < raw.size(); ++j) label_map[raw[j].utterance_id] = lab[j];
    Atomically(out.Add(fs::path("features") / (split + "_labels.txt")),
               [&](const std::string& tmp) { am::WriteLabels(tmp, label_map); });
    Atomically(out.Add(fs::path("features") / (split + "_embeddings.txt")),
               [&](const std::string& tmp) { am::WriteEmbeddings(tmp, emb); });
    Emit(log, "features: " + split + " " + std::to_string(raw.size()) + " utterances");
  }
  return out.Finish();
}

std::vector<std::string> RunTrainAm(const RunConfig& c, const Log& log) {
  Outputs out(c, "train-am");
  const auto phones = ReadPhones(Root(c) / "data" / "phones.txt");
  const auto train = LoadSplit(c, "train", true);
  const auto dev = LoadSplit(c, "dev", true);
  for (const auto& name : c.models) {
    const auto t0 = std::chrono::steady_clock::now();
    am::AcousticModel model(c.ModelFor(name, static_cast<std::size_t>(phones.size())));
    model.Init(SubSeed(c.seed, "am-init"));
    auto tc = c.train;
    tc.seed = SubSeed(c.seed, "am-train");
    Emit(log, "train-am: " + name + " with " + std::to_string(model.NumParameters()) +
                  " parameters");
    auto result = am::Train(model, train.Utterances(true), dev.Utterances(true), tc,
                            [&](const am::LossPoint& p) {
                              if (!std::isnan(p.valid_loss))
                                Emit(log, "  iter " + std::to_string(p.iteration) + " train " +
                                              Fixed(p.train_loss, 4) + " valid " +
                                              Fixed(p.valid_loss, 4));
                            });
    const fs::path dir = fs::path("am") / name;
    const fs::path mdl = out.Add(dir / "final.mdl");
    fs::create_directories(mdl.parent_path());
    result.model.Save(mdl.string());  // the checkpoint writer renames atomically
    Atomically(out.Add(dir / "loss.csv"),
               [&](const std::string& tmp) { am::WriteLossCsv(tmp, result.curve); });
    Emit(log, "train-am: " + name + " done in " + Fixed(Seconds(t0), 1) + " s, dev loss " +
                  Fixed(am::EvaluateLoss(result.model, dev.Utterances(true)), 4));
  }
  return out.Finish();
}

std::vector<std::string> RunTrainLm(const RunConfig& c, const Log& log) {
  Outputs out(c, "train-lm");
  const fs::path data = Root(c) / "data";
  Require(data / "lm_corpus.txt");
  Require(data / "lexicon.txt");
  Require(data / "dev" / "manifest.tsv");
  const auto corpus = lm::ReadCorpus((data / "lm_corpus.txt").string());
  const auto lex = lexicon::LoadLexicon((data / "lexicon.txt").string());
  for (int order : {c.lm.first_pass_order, c.lm.rescore_order}) {
    lm::NGramOptions opts;
    opts.order = order;
    const auto model = lm::TrainNGram(corpus, opts, lex.Words());
    Atomically(out.Add(fs::path("lm") / ArpaName(order, false)),
               [&](const std::string& tmp) { lm::WriteArpa(model, tmp); });
    if (c.lm.unk)
      Atomically(out.Add(fs::path("lm") / ArpaName(order, true)),
                 [&](const std::string& tmp) { lm::WriteArpa(lm::AttachUnk(model), tmp); });
    Emit(log, "train-lm: " + std::to_string(order) + "-gram perplexity " +
                  Fixed(lm::Perplexity(model, corpus), 3));
    if (order == c.lm.rescore_order) break;
  }
  if (c.lm.rnnlm) {
    std::vector<std::string> dev_lines;
    for (const auto& e : features::ReadManifest((data / "dev" / "manifest.tsv").string()))
      dev_lines.push_back(e.transcript);
    auto rc = c.lm.rnnlm_config;
    rc.seed = SubSeed(c.seed, "rnnlm");
    const auto result = lm::TrainRnnlm(corpus, lm::CorpusFromLines(dev_lines), rc);
    Atomically(out.Add(fs::path("lm") / "rnnlm.json"),
               [&](const std::string& tmp) { result.model.Save(tmp); });
    Emit(log, "train-lm: rnnlm held-out perplexity " +
                  Fixed(result.heldout_perplexity.empty() ? 0.0
                                                          : *std::min_element(
                                                                result.heldout_perplexity.begin(),
                                                                result.heldout_perplexity.end()),
                        3));
  }
  return out.Finish();
}

std::vector<std::string> RunDecode(const RunConfig& c, const Log& log) {
  Outputs out(c, "decode");
  const fs::path data = Root(c) / "data";
  Require(data / "lexicon.txt");
  const auto phones = ReadPhones(data / "phones.txt");
  const auto lex = lexicon::LoadLexicon((data / "lexicon.txt").string());
  std::vector<std::pair<std::string, lm::NGramModel>> lms;
  for (bool unk : {false, true}) {
    if (unk && !c.lm.unk) continue;
    const fs::path p = Root(c) / "lm" / ArpaName(c.lm.first_pass_order, unk);
    Require(p);
    lms.emplace_back(Key(c.lm.first_pass_order, unk), lm::ReadArpa(p.string()));
  }
  for (const auto& name : c.models) {
    const fs::path mdl = Root(c) / "am" / name / "final.mdl";
    Require(mdl);
    const auto model = am::AcousticModel::Load(mdl.string());
    for (const auto& split : kEvalSplits) {
      const auto feats = LoadSplit(c, split, false);
      const auto utts = feats.Utterances(false);
      const auto t0 = std::chrono::steady_clock::now();
      const auto scores = Posteriors(model, utts);
      for (const auto& [key, lm_model] : lms) {
        decoder::GraphOptions go;
        go.use_unk = key.find("_unk") != std::string::npos;
        go.unk_continuation = c.lm.unk_continuation;
        const auto graph = decoder::BuildGraph(lex, lm_model, go);
        if (graph.phones().symbols() != phones.symbols())
          throw Error("decode: lexicon phone table differs from data/phones.txt");
        std::vector<decoder::DecodeResult> results(utts.size());
        const int n = static_cast<int>(utts.size());
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i)
          results[i] = decoder::Decode(scores[i], graph, c.decode);
        std::vector<std::pair<std::string, decoder::Lattice>> lats;
        std::vector<std::string> ids;
        std::vector<decoder::Hypothesis> hyps;
        std::size_t partial = 0;
        for (std::size_t i = 0; i < utts.size(); ++i) {
          ids.push_back(utts[i].features->utterance_id);
          lats.emplace_back(ids.back(), std::move(results[i].lattice));
          hyps.push_back(results[i].hypothesis);
          partial += hyps.back().partial;
        }
        const fs::path dir = fs::path("decode") / name / split;
        WriteLats(out.Add(dir / (key + ".lats")), lats);
        WriteHyps(out.Add(dir / (key + "_none.hyp")), ids, hyps);
        Emit(log, "decode: " + name + " " + split + " " + key + " (" +
                      std::to_string(partial) + " partial)");
      }
      Emit(log, "decode: " + name + " " + split + " took " + Fixed(Seconds(t0), 1) + " s");
    }
  }
  return out.Finish();
}

std::vector<std::string> RunRescore(const RunConfig& c, const Log& log) {
  Outputs out(c, "rescore");
  std::map<bool, lm::NGramModel> high;
  for (bool unk : {false, true}) {
    if (unk && !c.lm.unk) continue;
    const fs::path p = Root(c) / "lm" / ArpaName(c.lm.rescore_order, unk);
    Require(p);
    high.emplace(unk, lm::ReadArpa(p.string()));
  }
  std::optional<lm::RecurrentLM> rnn;
  if (c.lm.rnnlm) {
    const fs::path p = Root(c) / "lm" / "rnnlm.json";
    Require(p);
    rnn = lm::RecurrentLM::Load(p.string());
  }
  const bool expand = c.lm.rescore_order != c.lm.first_pass_order;
  for (const auto& name : c.models)
    for (const auto& split : kEvalSplits) {
      const fs::path dir = fs::path("decode") / name / split;
      for (bool unk : {false, true}) {
        if (unk && !c.lm.unk) continue;
        const fs::path first = Root(c) / dir / (Key(c.lm.first_pass_order, unk) + ".lats");
        Require(first);
        const auto lats = decoder::ReadLatticeArchive(first.string());
        std::vector<std::pair<std::string, std::vector<std::pair<std::string, decoder::Lattice>>>>
            sets = {{Key(c.lm.first_pass_order, unk), lats}};
        if (expand) {
          std::vector<std::pair<std::string, decoder::Lattice>> rescored(lats.size());
          const int n = static_cast<int>(lats.size());
#pragma omp parallel for schedule(dynamic)
          for (int i = 0; i < n; ++i)
            rescored[i] = {lats[i].first, decoder::RescoreNgram(lats[i].second, high.at(unk))};
          const std::string key = Key(c.lm.rescore_order, unk);
          WriteLats(out.Add(dir / (key + ".lats")), rescored);
          std::vector<std::string> ids;
          std::vector<decoder::Hypothesis> hyps;
          for (const auto& [id, lat] : rescored) ids.push_back(id), hyps.push_back(Best(lat));
          WriteHyps(out.Add(dir / (key + "_none.hyp")), ids, hyps);
          sets.emplace_back(key, std::move(rescored));
        }
        if (!rnn) continue;
        for (const auto& [key, set] : sets) {
          std::vector<decoder::Hypothesis> hyps(set.size());
          const int n = static_cast<int>(set.size());
#pragma omp parallel for schedule(dynamic)
          for (int i = 0; i < n; ++i)
            hyps[i] = Best(decoder::RescoreRnnlm(set[i].second, *rnn, c.lm.rnnlm_rescore));
          std::vector<std::string> ids;
          for (const auto& p : set) ids.push_back(p.first);
          WriteHyps(out.Add(dir / (key + "_rnnlm.hyp")), ids, hyps);
        }
      }
      Emit(log, "rescore: " + name + " " + split);
    }
  return out.Finish();
}

std::vector<std::string> RunScore(const RunConfig& c, const Log& log) {
  Outputs out(c, "score");
  const fs::path data = Root(c) / "data";
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> refs;
  for (const auto& split : kEvalSplits) {
    Require(data / split / "manifest.tsv");
    for (const auto& e : features::ReadManifest((data / split / "manifest.tsv").string()))
      refs[split].push_back({e.utterance_id, e.transcript});
  }
  std::vector<std::string> rescores = {"none"};
  if (c.lm.rnnlm) rescores.push_back("rnnlm");
  for (const auto& name : c.models) {
    std::ostringstream csv;
    csv << "lm,rescore,dev_wer,test_wer\n";
    for (const auto& key : LmKeys(c))
      for (const auto& r : rescores) {
        csv << key << ',' << r;
        for (const auto& split : kEvalSplits) {
          const fs::path hyp = Root(c) / "decode" / name / split / (key + "_" + r + ".hyp");
          Require(hyp);
          const auto report = scoring::ScoreDataset(refs[split], scoring::ReadHypotheses(hyp.string()));
          csv << ',' << Fixed(report.wer, 2);
          WriteText(out.Add(fs::path("decode") / name / split / (key + "_" + r + ".wer.csv")),
                    report.Csv());
        }
        csv << '\n';
      }
    WriteText(out.Add(fs::path("decode") / name / "results.csv"), csv.str());
    if (name == c.models.front()) WriteText(out.Add("results.csv"), csv.str());
    Emit(log, "score: " + name + "\n" + csv.str());
  }
  return out.Finish();
}

std::vector<std::string> RunAnalyzeAttention(const RunConfig& c, const Log& log) {
  Outputs out(c, "analyze-attention");
  std::optional<SplitFeatures> test;
  for (const auto& name : c.models) {
    const fs::path mdl = Root(c) / "am" / name / "final.mdl";
    Require(mdl);
    const auto model = am::AcousticModel::Load(mdl.string());
    if (!model.config().attention) continue;
    if (!test) test = LoadSplit(c, "test", false);
    const auto profile = analysis::ExtractProfile(model, test->Utterances(false), name, "test");
    const auto sorted = analysis::SortHeads(profile);
    const auto summary = analysis::Summarize(sorted);
    const auto metrics = analysis::ComputeMetrics(profile);
    const fs::path dir = fs::path("analysis") / name;
    WriteText(out.Add(dir / "attention.csv"), analysis::ProfileToCsv(profile));
    WriteText(out.Add(dir / "attention_sorted.csv"), analysis::ProfileToCsv(sorted));
    WriteText(out.Add(dir / "attention.svg"), analysis::ProfileToSvg(sorted));
    std::ostringstream os;
    os << "frames " << profile.frames << "\nmedian_of_head_average " << summary.median
       << "\nleft_slope " << metrics.left_slope << "\nright_slope " << metrics.right_slope
       << "\nhead argmax_offset entropy\n";
    std::size_t at_centre = 0;
    for (std::size_t h = 0; h < profile.num_heads(); ++h) {
      const long offset = static_cast<long>(metrics.argmax[h]) - static_cast<long>(profile.left);
      at_centre += offset == 0;
      os << h << ' ' << offset << ' ' << metrics.entropy[h] << '\n';
    }
    os << "heads_peaking_at_centre " << at_centre << " of " << profile.num_heads() << '\n';
    WriteText(out.Add(dir / "attention_metrics.txt"), os.str());
    Emit(log, "analyze-attention: " + name + ", " + std::to_string(at_centre) + " of " +
                  std::to_string(profile.num_heads()) + " heads peak at offset 0");
  }
  return out.Finish();
}

std::vector<std::string> RunParamsReport(const RunConfig& c, const Log& log) {
  Outputs out(c, "params-report");
  const fs::path phones_path = Root(c) / "data" / "phones.txt";
  const std::size_t k = fs::exists(phones_path)
                            ? static_cast<std::size_t>(ReadPhones(phones_path).size())
                            : c.synth.num_phones + 1;
  std::vector<std::pair<std::string, am::ModelConfig>> models;
  for (bool desk : {true, false}) {
    const std::string scale = desk ? "desk" : "paper";
    const auto base = desk ? am::ModelConfig::Desk(k) : am::ModelConfig::Paper(k);
    models.emplace_back(scale + "_CTDNN", base);
    for (std::size_t h : {1, 15, 30, 60}) {
      auto m = base;
      m.attention = desk ? am::DeskAttention() : nn::AttentionContext{};
      m.attention->num_heads = h;
      models.emplace_back(scale + "_CTDNN_SA_H" + std::to_string(h), m);
    }
  }
  const auto rows = analysis::ParamReport(models);
  WriteText(out.Add(fs::path("analysis") / "params.csv"), analysis::ParamReportToCsv(rows));
  Emit(log, "params-report:\n" + analysis::ParamReportToCsv(rows));
  return out.Finish();
}

std::vector<std::string> RunAll(const RunConfig& c, const Log& log) {
  using Stage = std::vector<std::string> (*)(const RunConfig&, const Log&);
  const std::vector<std::pair<std::string, Stage>> stages = {
      {"synth", RunSynth},       {"features", RunFeatures},
      {"train-am", RunTrainAm},  {"train-lm", RunTrainLm},
      {"decode", RunDecode},     {"rescore", RunRescore},
      {"score", RunScore},       {"analyze-attention", RunAnalyzeAttention},
      {"params-report", RunParamsReport}};
  std::vector<std::string> all;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& [name, stage] : stages) {
    const auto ts = std::chrono::steady_clock::now();
    auto files = stage(c, log);
    all.insert(all.end(), files.begin(), files.end());
    Emit(log, "stage " + name + " finished in " + Fixed(Seconds(ts), 1) + " s");
  }
  Emit(log, "run-all finished in " + Fixed(Seconds(t0), 1) + " s");
  return all;
}

}  // namespace altk::pipeline
