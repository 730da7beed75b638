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

#include "altk/lm/rnnlm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "altk/util/error.hpp"
#include "json.hpp"

namespace altk::lm {
namespace {

void LogSoftmaxInPlace(std::vector<double>& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0;
  for (double x : v) sum += std::exp(x - mx);
  const double lse = mx + std::log(sum);
  for (double& x : v) x -= lse;
}

}  // namespace

void RecurrentLM::Params::Resize(std::size_t vocab, std::size_t dim) {
  embed.assign(vocab * dim, 0.0);
  w_in.assign(dim * dim, 0.0);
  w_rec.assign(dim * dim, 0.0);
  bias.assign(dim, 0.0);
  out_bias.assign(vocab, 0.0);
}

void RecurrentLM::Params::Zero() {
  for (auto* t : Tensors()) std::fill(t->begin(), t->end(), 0.0);
}

std::vector<std::vector<double>*> RecurrentLM::Params::Tensors() {
  return {&embed, &w_in, &w_rec, &bias, &out_bias};
}

RecurrentLM::RecurrentLM(const std::vector<std::string>& words, int dim,
                         std::uint64_t seed)
    : dim_(dim) {
  if (dim <= 0) throw std::invalid_argument("rnnlm: dim must be positive");
  std::set<std::string> sorted(words.begin(), words.end());
  sorted.erase(kEos);
  sorted.erase(kBos);
  sorted.erase(lexicon::kUnkWord);
  vocab_ = {kEos, lexicon::kUnkWord};
  vocab_.insert(vocab_.end(), sorted.begin(), sorted.end());
  IndexVocab();
  params_.Resize(vocab_.size(), dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> emb(0.0, 0.1);
  for (double& v : params_.embed) v = emb(rng);
  const double bound = std::sqrt(3.0 / dim);
  std::uniform_real_distribution<double> u(-bound, bound);
  for (double& v : params_.w_in) v = u(rng);
  for (double& v : params_.w_rec) v = 0.5 * u(rng);
}

void RecurrentLM::IndexVocab() {
  ids_.clear();
  for (std::size_t i = 0; i < vocab_.size(); ++i) ids_[vocab_[i]] = static_cast<WordId>(i);
}

WordId RecurrentLM::IdOrUnk(const std::string& word) const {
  auto it = ids_.find(word);
  return it == ids_.end() ? unk() : it->second;
}

std::vector<double> RecurrentLM::LogDistribution(const State& h) const {
  const std::size_t v = vocab_.size(), d = dim_;
  std::vector<double> logits(params_.out_bias);
  for (std::size_t w = 0; w < v; ++w) {
    const double* e = params_.embed.data() + w * d;
    double acc = 0;
    for (std::size_t j = 0; j < d; ++j) acc += h[j] * e[j];
    logits[w] += acc;
  }
  LogSoftmaxInPlace(logits);
  return logits;
}

RecurrentLM::StepResult RecurrentLM::Step(const State& h, WordId word) const {
  if (word < 0 || word >= static_cast<WordId>(vocab_.size()))
    throw VocabularyError("rnnlm: word id out of range");
  StepResult r;
  r.logp = LogDistribution(h)[word];
  const std::size_t d = dim_;
  r.next.assign(params_.bias.begin(), params_.bias.end());
  const double* e = params_.embed.data() + word * d;
  for (std::size_t i = 0; i < d; ++i) {
    const double* wi = params_.w_in.data() + i * d;
    const double* wr = params_.w_rec.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) r.next[j] += e[i] * wi[j] + h[i] * wr[j];
  }
  for (double& x : r.next) x = std::tanh(x);
  return r;
}

double RecurrentLM::SentenceLogProb(const Sentence& words) const {
  State h = InitialState();
  double total = 0;
  for (const auto& w : words) {
    auto r = Step(h, IdOrUnk(w));
    total += r.logp;
    h = std::move(r.next);
  }
  return total + LogDistribution(h)[eos()];
}

double RecurrentLM::LossAndGradient(const std::vector<WordId>& ids, int bptt,
                                    Params* grad) const {
  const std::size_t d = dim_, v = vocab_.size();
  std::vector<WordId> targets = ids;
  targets.push_back(eos());
  const std::size_t steps = targets.size();
  std::vector<State> h(steps, InitialState());
  std::vector<std::vector<double>> logp(steps);
  double loss = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    logp[t] = LogDistribution(h[t]);
    loss -= logp[t][targets[t]];
    if (t + 1 < steps) h[t + 1] = Step(h[t], targets[t]).next;
  }

  std::vector<double> dh(d, 0.0), dprev(d), da(d);
  for (std::size_t t = steps; t-- > 0;) {
    // Output layer at step t.
    for (std::size_t w = 0; w < v; ++w) {
      const double g = std::exp(logp[t][w]) - (static_cast<WordId>(w) == targets[t] ? 1.0 : 0.0);
      grad->out_bias[w] += g;
      double* ge = grad->embed.data() + w * d;
      const double* e = params_.embed.data() + w * d;
      for (std::size_t j = 0; j < d; ++j) {
        ge[j] += g * h[t][j];
        dh[j] += g * e[j];
      }
    }
    if (t == 0) break;
    // h[t] = tanh(E[x] Wx + h[t-1] Wh + b) with x = targets[t-1].
    for (std::size_t j = 0; j < d; ++j) da[j] = dh[j] * (1.0 - h[t][j] * h[t][j]);
    const WordId x = targets[t - 1];
    const double* e = params_.embed.data() + x * d;
    double* ge = grad->embed.data() + x * d;
    std::fill(dprev.begin(), dprev.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      const double* wi = params_.w_in.data() + i * d;
      const double* wr = params_.w_rec.data() + i * d;
      double* gwi = grad->w_in.data() + i * d;
      double* gwr = grad->w_rec.data() + i * d;
      double acc_e = 0, acc_h = 0;
      for (std::size_t j = 0; j < d; ++j) {
        gwi[j] += e[i] * da[j];
        gwr[j] += h[t - 1][i] * da[j];
        acc_e += wi[j] * da[j];
        acc_h += wr[j] * da[j];
      }
      ge[i] += acc_e;
      dprev[i] = acc_h;
    }
    for (std::size_t j = 0; j < d; ++j) grad->bias[j] += da[j];
    // Truncate the recurrent gradient every `bptt` steps.
    const bool cut = bptt > 0 && (t - 1) % static_cast<std::size_t>(bptt) == 0 && t - 1 > 0;
    for (std::size_t j = 0; j < d; ++j) dh[j] = cut ? 0.0 : dprev[j];
  }
  return loss;
}

double Perplexity(const RecurrentLM& model, const TextCorpus& corpus) {
  double total = 0;
  std::size_t tokens = 0;
  for (const auto& s : corpus.sentences) {
    total += model.SentenceLogProb(s);
    tokens += s.size() + 1;
  }
  if (tokens == 0) throw std::invalid_argument("perplexity: empty corpus");
  return std::exp(-total / tokens);
}

RnnlmTrainResult TrainRnnlm(const TextCorpus& train, const TextCorpus& heldout,
                            const RnnlmConfig& config) {
  if (train.sentences.empty()) throw std::invalid_argument("rnnlm: empty corpus");
  std::vector<std::string> words;
  for (const auto& s : train.sentences) words.insert(words.end(), s.begin(), s.end());
  RnnlmTrainResult result{RecurrentLM(words, config.dim, config.seed), {}, {}};
  RecurrentLM model = result.model;

  std::vector<std::vector<WordId>> data;
  for (const auto& s : train.sentences) {
    std::vector<WordId> ids;
    for (const auto& w : s) ids.push_back(model.IdOrUnk(w));
    data.push_back(std::move(ids));
  }

  RecurrentLM::Params grad, m1, m2;
  for (auto* p : {&grad, &m1, &m2}) p->Resize(model.vocab_size(), model.dim());
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::mt19937_64 rng(config.seed ^ 0x5eed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  double best = INFINITY;
  long step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss = 0;
    std::size_t tokens = 0;
    for (std::size_t idx : order) {
      grad.Zero();
      loss += model.LossAndGradient(data[idx], config.bptt, &grad);
      tokens += data[idx].size() + 1;
      double norm2 = 0;
      for (auto* g : grad.Tensors())
        for (double x : *g) norm2 += x * x;
      const double scale =
          config.clip > 0 && norm2 > config.clip * config.clip ? config.clip / std::sqrt(norm2) : 1.0;
      ++step;
      const double c1 = 1 - std::pow(beta1, step), c2 = 1 - std::pow(beta2, step);
      auto params = model.params().Tensors();
      auto grads = grad.Tensors(), first = m1.Tensors(), second = m2.Tensors();
      for (std::size_t k = 0; k < params.size(); ++k)
        for (std::size_t i = 0; i < params[k]->size(); ++i) {
          const double g = (*grads[k])[i] * scale;
          double& a = (*first[k])[i];
          double& b = (*second[k])[i];
          a = beta1 * a + (1 - beta1) * g;
          b = beta2 * b + (1 - beta2) * g * g;
          (*params[k])[i] -= config.learning_rate * (a / c1) / (std::sqrt(b / c2) + eps);
        }
    }
    result.train_perplexity.push_back(std::exp(loss / tokens));
    const double ppl = heldout.sentences.empty() ? result.train_perplexity.back()
                                                 : Perplexity(model, heldout);
    result.heldout_perplexity.push_back(ppl);
    if (ppl < best) {
      best = ppl;
      result.model = model;
    }
  }
  return result;
}

void RecurrentLM::Save(const std::string& path) const {
  nlohmann::json j;
  j["format"] = "altk-rnnlm-1";
  j["dim"] = dim_;
  j["vocab"] = vocab_;
  j["embed"] = params_.embed;
  j["w_in"] = params_.w_in;
  j["w_rec"] = params_.w_rec;
  j["bias"] = params_.bias;
  j["out_bias"] = params_.out_bias;
  std::ofstream out(path);
  if (!out) throw Error("rnnlm: cannot write " + path);
  out << j.dump();
}

RecurrentLM RecurrentLM::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("rnnlm: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("format") != "altk-rnnlm-1") throw FormatError("rnnlm: unknown format in " + path);
    RecurrentLM m;
    m.dim_ = j.at("dim").get<int>();
    m.vocab_ = j.at("vocab").get<std::vector<std::string>>();
    m.IndexVocab();
    m.params_.embed = j.at("embed").get<std::vector<double>>();
    m.params_.w_in = j.at("w_in").get<std::vector<double>>();
    m.params_.w_rec = j.at("w_rec").get<std::vector<double>>();
    m.params_.bias = j.at("bias").get<std::vector<double>>();
    m.params_.out_bias = j.at("out_bias").get<std::vector<double>>();
    const std::size_t v = m.vocab_.size(), d = m.dim_;
    if (m.vocab_.size() < 2 || m.vocab_[0] != kEos || m.vocab_[1] != lexicon::kUnkWord ||
        m.params_.embed.size() != v * d || m.params_.w_in.size() != d * d ||
        m.params_.w_rec.size() != d * d || m.params_.bias.size() != d ||
        m.params_.out_bias.size() != v)
      throw FormatError("rnnlm: inconsistent shapes in " + path);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("rnnlm: malformed " + path + ": " + e.what());
  }
}

}  // namespace altk::lm
