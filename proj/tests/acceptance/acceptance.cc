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

// Acceptance suite: one PASS/FAIL line per criterion. The end-to-end
// criteria run the full pipeline twice, which takes several minutes.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "altk/am/train.hpp"
#include "altk/analysis/attention.hpp"
#include "altk/decoder/decoder.hpp"
#include "altk/decoder/rescore.hpp"
#include "altk/nn/gradient_check.hpp"
#include "altk/nn/loss.hpp"
#include "altk/nn/semi_orthogonal.hpp"
#include "altk/pipeline/stages.hpp"
#include "altk/scoring/wer.hpp"
#include "decoder_oracle.hpp"

using namespace altk;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string Sci(double v) {
  std::ostringstream os;
  os << std::setprecision(2) << std::scientific << v;
  return os.str();
}

std::string Fix(double v, int d = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(d) << v;
  return os.str();
}

int failures = 0;

void Report(int id, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << id << ". " << name << ": " << detail
            << std::endl;
}

// Runs a criterion, turning an exception into a FAIL line.
void Criterion(int id, const std::string& name,
               const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [pass, detail] = body();
    Report(id, name, pass, detail);
  } catch (const std::exception& e) {
    Report(id, name, false, std::string("exception: ") + e.what());
  }
}

nn::Tensor<double> Random(nn::Shape shape, std::mt19937_64& rng, double scale = 1.0) {
  nn::Tensor<double> t(std::move(shape));
  std::normal_distribution<double> d(0.0, scale);
  for (auto& v : t.vec()) v = d(rng);
  return t;
}

template <typename L>
void RandomParams(L& layer, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 0.5);
  for (auto* p : layer.Params())
    for (auto& v : p->value.vec()) v = d(rng);
}

// ---------------------------------------------------------------------------

std::pair<bool, std::string> GradientSuite() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double layer_worst = 0;
  std::string layer_where;
  auto note = [&](const nn::GradCheckResult& r, const std::string& layer) {
    if (r.max_rel_error > layer_worst) layer_worst = r.max_rel_error, layer_where = layer;
  };
  {
    nn::AffineLayer<double> l(6, 5);
    RandomParams(l, rng);
    note(nn::CheckLayerGradients(l, Random({4, 6}, rng), nn::Mode::kTrain), "affine");
  }
  {
    nn::Conv2dLayer<double> conv(6, 2, 3);
    RandomParams(conv, rng);
    const auto x = Random({2, 5, 6, 2}, rng);
    note(nn::CheckLayerGradients(conv, x, nn::Mode::kTrain), "conv2d");
    nn::MaxPoolFreqLayer<double> pool;
    note(nn::CheckLayerGradients(pool, conv.Forward(x, nn::Mode::kTrain), nn::Mode::kTrain),
         "maxpool");
  }
  {
    nn::TdnnfLayer<double> l(8, 4, 8, {-1, 0, 1});
    RandomParams(l, rng);
    nn::Tensor<double> x;
    do {
      x = Random({2, 6, 8}, rng);
      l.Forward(x, nn::Mode::kTrain);
    } while (l.relu().min_abs_input() < 1e-3);
    note(nn::CheckLayerGradients(l, x, nn::Mode::kTrain), "tdnnf");
  }
  {
    nn::BatchNormLayer<double> l(8);
    const auto x = Random({2, 12, 8}, rng, 2.0);
    note(nn::CheckLayerGradients(l, x, nn::Mode::kTrain), "batchnorm(train)");
    note(nn::CheckLayerGradients(l, x, nn::Mode::kInference), "batchnorm(inference)");
  }
  {
    nn::AttentionLayer<double> l(6, 5, nn::AttentionContext{2, 1, 2, 4, 3});
    RandomParams(l, rng);
    note(nn::CheckLayerGradients(l, Random({2, 7, 6}, rng), nn::Mode::kTrain), "attention");
  }
  {
    auto logits = Random({6, 4}, rng);
    std::vector<std::int32_t> targets = {0, 3, 1, 2, 2, -1};
    const auto r = nn::LogSoftmaxXent<double>(logits, targets);
    note(nn::CheckGradient([&] { return nn::LogSoftmaxXent<double>(logits, targets).loss; },
                           logits.span(), r.grad.span(), "logits"),
         "log-softmax-xent");
  }

  // Full desk-scale CTDNN_SA. A coordinate whose perturbation crosses a ReLU
  // or max-pool kink is detected by disagreeing step sizes and resampled.
  auto cfg = am::ModelConfig::Desk(13);
  cfg.attention = am::DeskAttention();
  am::AcousticModel f32(cfg);
  f32.Init(5);
  auto net = f32.Cast<double>();
  const auto x = Random({2, 9, 80}, rng);
  std::vector<std::int32_t> targets(18);
  for (auto& t : targets) t = static_cast<std::int32_t>(rng() % 13);
  auto loss = [&] {
    return nn::LogSoftmaxXent<double>(net.Forward(x, nn::Mode::kTrain), targets).loss;
  };
  net.ZeroGrad();
  net.Backward(nn::LogSoftmaxXent<double>(net.Forward(x, nn::Mode::kTrain), targets).grad);
  auto central = [&](double& v, double h) {
    const double saved = v;
    v = saved + h;
    const double up = loss();
    v = saved - h;
    const double down = loss();
    v = saved;
    return (up - down) / (2 * h);
  };
  double model_worst = 0;
  std::size_t checked = 0, skipped = 0;
  for (auto* p : net.Params()) {
    auto& value = p->value.vec();
    const std::vector<double> analytic = p->grad.vec();
    std::size_t done = 0;
    for (int attempt = 0; attempt < 12 && done < 3; ++attempt) {
      const std::size_t c = rng() % value.size();
      const double n1 = central(value[c], 1e-6), n2 = central(value[c], 2e-6);
      if (nn::RelativeError(n1, n2, 1e-5) > 1e-4) {
        ++skipped;
        continue;
      }
      model_worst = std::max(model_worst, nn::RelativeError(analytic[c], n1, 1e-5));
      ++done;
    }
    checked += done;
  }
  const double secs = Since(t0);
  const bool pass = layer_worst < 1e-4 && model_worst < 1e-3 && secs < 60 && skipped * 4 < checked;
  return {pass, "layers max rel err " + Sci(layer_worst) + " (" + layer_where +
                    ", < 1e-4); full CTDNN_SA " + Sci(model_worst) + " over " +
                    std::to_string(checked) + " coords, " + std::to_string(skipped) +
                    " kink-crossing coords resampled (< 1e-3); " + Fix(secs, 1) + " s (< 60 s)"};
}

std::pair<bool, std::string> AttentionInvariants() {
  std::mt19937_64 rng(202);
  double worst_sum = 0, worst_uniform = 0;
  bool masked_zero = true;
  for (int trial = 0; trial < 1000; ++trial) {
    nn::AttentionContext ctx{rng() % 5, rng() % 5, 1 + rng() % 3, 1 + rng() % 4, 1 + rng() % 3};
    if (ctx.left + ctx.right == 0) ctx.right = 1;  // a window of one is rejected
    const std::size_t d = 1 + rng() % 5, T = 1 + rng() % 10, B = 1 + rng() % 2;
    const auto x = Random({B, T, d}, rng, 2.0);
    const auto wq = Random({d, ctx.num_heads * ctx.key_dim}, rng);
    const auto wk = Random({d, ctx.num_heads * ctx.key_dim}, rng);
    const auto wv = Random({d, ctx.num_heads * ctx.value_dim}, rng);
    const nn::Tensor<double> zero({d, ctx.num_heads * ctx.key_dim});
    const auto [y, w] = nn::TimeRestrictedSelfAttention(x, wq, wk, wv, ctx);
    const auto [yz, wz] = nn::TimeRestrictedSelfAttention(x, zero, zero, wv, ctx);
    const std::size_t W = ctx.window();
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t h = 0; h < ctx.num_heads; ++h)
        for (std::size_t t = 0; t < T; ++t) {
          const std::size_t row = ((b * ctx.num_heads + h) * T + t) * W;
          double sum = 0;
          std::size_t in_range = 0;
          for (std::size_t k = 0; k < W; ++k) {
            const long src = static_cast<long>(t) + static_cast<long>(k) - static_cast<long>(ctx.left);
            const bool valid = src >= 0 && src < static_cast<long>(T);
            in_range += valid;
            sum += w[row + k];
            if (!valid && (w[row + k] != 0.0 || wz[row + k] != 0.0)) masked_zero = false;
          }
          worst_sum = std::max(worst_sum, std::abs(sum - 1));
          for (std::size_t k = 0; k < W; ++k) {
            const long src = static_cast<long>(t) + static_cast<long>(k) - static_cast<long>(ctx.left);
            if (src >= 0 && src < static_cast<long>(T))
              worst_uniform = std::max(worst_uniform, std::abs(wz[row + k] - 1.0 / in_range));
          }
        }
  }
  const bool pass = worst_sum <= 1e-6 && masked_zero && worst_uniform <= 1e-12;
  return {pass, "1000 inputs: max |row sum - 1| " + Sci(worst_sum) + " (<= 1e-6); masked weights " +
                    (masked_zero ? "all exactly 0" : "NOT all 0") +
                    "; zeroed q/k max deviation from uniform " + Sci(worst_uniform)};
}

std::pair<bool, std::string> SemiOrthogonality() {
  std::mt19937_64 rng(303);
  double worst = 0;
  std::ostringstream detail;
  for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{4, 12}, {16, 48}}) {
    double shape_worst = 0;
    for (int seed = 0; seed < 10; ++seed) {
      auto m = Random({rows, cols}, rng).vec();
      for (int it = 0; it < 20; ++it) nn::SemiOrthogonalStep<double>(m, rows, cols);
      shape_worst = std::max(shape_worst, nn::SemiOrthogonalDeviation<double>(m, rows, cols));
    }
    detail << rows << "x" << cols << " worst " << Sci(shape_worst) << "; ";
    worst = std::max(worst, shape_worst);
  }
  return {worst < 1e-3, detail.str() + "10 random starts each, 20 steps (< 1e-3)"};
}

std::pair<bool, std::string> ParameterAccounting() {
  std::vector<std::size_t> counts;
  bool match = true;
  std::ostringstream detail;
  auto base = am::ModelConfig::Paper(40);
  for (int h : {0, 1, 15, 30, 60}) {
    auto cfg = base;
    if (h > 0) {
      cfg.attention = nn::AttentionContext{};
      cfg.attention->num_heads = static_cast<std::size_t>(h);
    }
    const std::size_t runtime = am::AcousticModel(cfg).NumParameters();
    const std::size_t analytic = am::AnalyticParameterCount(cfg);
    match = match && runtime == analytic;
    counts.push_back(runtime);
    detail << (h == 0 ? "CTDNN" : "SA_H" + std::to_string(h)) << " " << runtime
           << (runtime == analytic ? "" : " (analytic " + std::to_string(analytic) + ")") << "; ";
  }
  bool monotone = true;
  for (std::size_t i = 1; i < counts.size(); ++i) monotone = monotone && counts[i] > counts[i - 1];
  return {match && monotone, detail.str() + (match ? "analytic == runtime" : "MISMATCH") +
                                 (monotone ? ", strictly increasing in H" : ", NOT monotone")};
}

std::pair<bool, std::string> LmOracle() {
  using lm::Smoothing;
  // Hand counts for "A B", "A B", "A C".
  const auto corpus = lm::CorpusFromLines({"A B", "A B", "A C"});
  struct Case {
    int order;
    std::vector<std::string> history;
    std::string word;
    double p;
  };
  const std::vector<Case> cases = {
      {1, {}, "A", 3.0 / 9},       {1, {}, "B", 2.0 / 9},      {1, {}, "C", 1.0 / 9},
      {1, {}, "</s>", 3.0 / 9},    {2, {"<s>"}, "A", 1.0},     {2, {"A"}, "B", 2.0 / 3},
      {2, {"A"}, "C", 1.0 / 3},    {2, {"B"}, "</s>", 1.0},    {2, {"C"}, "</s>", 1.0},
      {3, {"<s>", "A"}, "B", 2.0 / 3}, {3, {"A", "B"}, "</s>", 1.0}, {3, {"A"}, "C", 1.0 / 3}};
  double ml_err = 0;
  for (const auto& c : cases) {
    const auto m = lm::TrainNGram(corpus, {c.order, Smoothing::kMaximumLikelihood, 0.75});
    ml_err = std::max(ml_err, std::abs(std::exp(m.Score(c.history, c.word)) - c.p));
  }

  // Normalization and ARPA round trip on a KN model of the synthetic LM text.
  synth::SynthSpec spec;
  spec.lm_sentences = 500;
  const auto data = synth::Generate(spec);
  const auto text = lm::CorpusFromLines(data.lm_corpus);
  std::mt19937 rng(404);
  double norm_err = 0, arpa_err = 0;
  for (int order : {3, 4}) {
    const auto m = lm::AttachUnk(lm::TrainNGram(text, {order}));
    const auto back = lm::ParseArpa(lm::ArpaString(m));
    const auto words = m.PredictableWords();
    for (int i = 0; i < 100; ++i) {
      std::vector<lm::WordId> h;
      if (rng() % 2) h.push_back(m.bos());
      while (h.size() < static_cast<std::size_t>(order - 1) && rng() % 4) {
        const auto w = words[rng() % words.size()];
        if (w != m.eos()) h.push_back(w);
      }
      double total = 0;
      for (auto w : words) {
        total += std::exp(m.Score(h, w));
        arpa_err = std::max(arpa_err, std::abs(m.Score(h, w) - back.Score(h, w)));
      }
      norm_err = std::max(norm_err, std::abs(total - 1));
    }
  }
  const bool pass = ml_err <= 1e-15 && norm_err <= 1e-6 && arpa_err <= 1e-12;
  return {pass, "ML max |p - hand count| " + Sci(ml_err) + " over " + std::to_string(cases.size()) +
                    " events; KN 3/4-gram 100 histories each, max |sum - 1| " + Sci(norm_err) +
                    " (<= 1e-6); ARPA round trip max |dlogp| " + Sci(arpa_err) + " (<= 1e-12)"};
}

std::pair<bool, std::string> DecoderOracle() {
  std::mt19937 rng(505);
  int agree = 0, path_sets = 0, argmax = 0;
  const int n = 200;
  for (int trial = 0; trial < n; ++trial) {
    const bool with_unk = trial % 4 == 3;
    auto toy = testing::RandomToy(rng, with_unk);
    decoder::GraphOptions go;
    go.use_unk = with_unk;
    const auto graph = decoder::BuildGraph(toy.lex, toy.lm, go);
    const std::size_t T = 1 + rng() % 4;
    const auto am = testing::RandomLogPosteriors(T, graph.phones().size(), rng);
    auto params = testing::Exhaustive();
    params.acoustic_scale = std::uniform_real_distribution<double>(0.3, 1.5)(rng);
    const auto result = decoder::Decode(am, graph, params);
    const auto unk = lexicon::MakeUnkModel(toy.lex, 0.5);
    testing::Oracle oracle{am, toy.lex, graph.phones(), toy.lm, params, with_unk ? &unk : nullptr, {}};
    oracle.Run();

    double best = -decoder::kInf;
    std::vector<std::string> best_words;
    for (const auto& [seq, s] : oracle.best)
      if (s > best) best = s, best_words = seq;
    agree += result.hypothesis.words == best_words &&
             std::abs(result.hypothesis.score - best) <= 1e-9 * std::max(1.0, std::abs(best));

    const auto seqs = decoder::EnumerateSequences(result.lattice);
    bool same = seqs.size() == oracle.best.size();
    for (const auto& [seq, s] : oracle.best) {
      auto it = seqs.find(seq);
      same = same && it != seqs.end() && std::abs(it->second - s) <= 1e-9;
    }
    path_sets += same;
    argmax += decoder::BestPath(decoder::RescoreNgram(result.lattice, toy.lm)).words ==
              result.hypothesis.words;
  }
  const bool pass = agree == n && path_sets == n && argmax == n;
  return {pass, std::to_string(n) + " toys (T <= 4, 3 words, 4 phones incl. SIL, every 4th with unk): "
                    "best path " + std::to_string(agree) + "/" + std::to_string(n) +
                    ", path set and scores " + std::to_string(path_sets) + "/" + std::to_string(n) +
                    ", argmax unchanged by same-LM rescoring " + std::to_string(argmax) + "/" +
                    std::to_string(n)};
}

// Minimal alignment cost by enumerating alignment paths, with
// branch-and-bound on the remaining length difference.
struct AlignmentSearch {
  const scoring::Words& ref;
  const scoring::Words& hyp;
  int best;

  void Run(std::size_t i, std::size_t j, int cost) {
    const long rest = std::labs(static_cast<long>(ref.size() - i) - static_cast<long>(hyp.size() - j));
    if (cost + rest >= best) return;
    if (i == ref.size() && j == hyp.size()) {
      best = cost;
      return;
    }
    if (i < ref.size() && j < hyp.size()) Run(i + 1, j + 1, cost + (ref[i] != hyp[j]));
    if (i < ref.size()) Run(i + 1, j, cost + 1);
    if (j < hyp.size()) Run(i, j + 1, cost + 1);
  }
};

std::pair<bool, std::string> WerOracle() {
  std::vector<scoring::Words> seqs = {{}};
  for (std::size_t k = 0; k < seqs.size(); ++k) {
    if (seqs[k].size() == 6) continue;
    for (const char* w : {"A", "B", "C"}) {
      auto next = seqs[k];
      next.push_back(w);
      seqs.push_back(next);
    }
  }
  std::size_t pairs = 0, mismatches = 0;
  for (const auto& ref : seqs)
    for (const auto& hyp : seqs) {
      AlignmentSearch search{ref, hyp, static_cast<int>(ref.size() + hyp.size()) + 1};
      search.Run(0, 0, 0);
      mismatches += scoring::Align(ref, hyp).errors() != search.best;
      ++pairs;
    }
  const scoring::Words fig = {"AS", "THE", "SUN", "WILL", "RISE"};
  const double self = scoring::Wer(fig, fig).wer;
  const double one = scoring::Wer(fig, {"AS", "THE", "SON", "WILL", "RISE"}).wer;
  const bool pass = mismatches == 0 && self == 0.0 && std::abs(one - 20.0) < 1e-12;
  return {pass, std::to_string(pairs) + " pairs over a 3-word alphabet up to length 6, " +
                    std::to_string(mismatches) + " mismatches; \"AS THE SUN WILL RISE\" self " +
                    Fix(self, 1) + "%, one substitution " + Fix(one, 1) + "%"};
}

// ---------------------------------------------------------------------------
// End-to-end criteria share two run-all executions.

struct Results {
  std::map<std::string, std::pair<double, double>> rows;  // "lm,rescore" -> (dev, test)
  std::vector<std::string> order;
};

Results ReadResults(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  Results r;
  std::string line;
  std::getline(in, line);
  if (line != "lm,rescore,dev_wer,test_wer") throw Error("bad header in " + path.string());
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string lm_name, rescore, dev, test;
    std::getline(ss, lm_name, ',');
    std::getline(ss, rescore, ',');
    std::getline(ss, dev, ',');
    std::getline(ss, test, ',');
    r.order.push_back(lm_name + "," + rescore);
    r.rows[r.order.back()] = {std::stod(dev), std::stod(test)};
  }
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct EndToEnd {
  fs::path dir_a, dir_b;
  double seconds_a = 0, seconds_b = 0;
  std::string error;
};

EndToEnd RunEndToEnd(const fs::path& root) {
  EndToEnd e;
  e.dir_a = root / "run_a";
  e.dir_b = root / "run_b";
  try {
    for (auto* target : {&e.dir_a, &e.dir_b}) {
      pipeline::RunConfig config;  // default SynthSpec, desk dims, 8 epochs
      config.output_dir = target->string();
      fs::remove_all(*target);
      const auto t0 = Clock::now();
      pipeline::RunAll(config, [](const std::string& msg) { std::cerr << "  | " << msg << '\n'; });
      (target == &e.dir_a ? e.seconds_a : e.seconds_b) = Since(t0);
    }
  } catch (const std::exception& ex) {
    e.error = ex.what();
  }
  return e;
}

std::pair<bool, std::string> Benchmark(const EndToEnd& e) {
  if (!e.error.empty()) return {false, "run-all failed: " + e.error};
  const auto sa = ReadResults(e.dir_a / "decode" / "ctdnn_sa" / "results.csv");
  const auto base = ReadResults(e.dir_a / "decode" / "ctdnn" / "results.csv");
  const double sa_test = sa.rows.at("3G,none").second;
  const double base_test = base.rows.at("3G,none").second;
  const unsigned cores = std::thread::hardware_concurrency();
  const bool fast = e.seconds_a <= 600;
  const bool pass = sa_test <= 10.0 && sa_test <= base_test && fast;
  return {pass, "CTDNN_SA 3G test WER " + Fix(sa_test) + "% (<= 10%), CTDNN " + Fix(base_test) +
                    "% (SA <= baseline: " + (sa_test <= base_test ? "yes" : "no") +
                    "); run-all " + Fix(e.seconds_a / 60, 1) + " min for both models on " +
                    std::to_string(cores) + " core(s) (<= 10 min)"};
}

std::pair<bool, std::string> Ladder(const EndToEnd& e) {
  if (!e.error.empty()) return {false, "run-all failed: " + e.error};
  const auto r = ReadResults(e.dir_a / "results.csv");
  const std::vector<std::string> expected = {"3G,none",     "3G,rnnlm",     "3G_unk,none",
                                             "3G_unk,rnnlm", "4G,none",      "4G,rnnlm",
                                             "4G_unk,none", "4G_unk,rnnlm"};
  const bool shape = r.order == expected;
  const double g3 = r.rows.at("3G,none").second, g4 = r.rows.at("4G,none").second;
  std::ostringstream table;
  for (const auto& key : r.order)
    table << key << "=" << Fix(r.rows.at(key).second) << " ";
  return {shape && g4 <= g3, std::string("4 LMs x {none, rnnlm} rows ") +
                                 (shape ? "present" : "WRONG") + "; 4G test " + Fix(g4) +
                                 "% <= 3G test " + Fix(g3) + "%; test WERs: " + table.str()};
}

std::pair<bool, std::string> AttentionOutputs(const EndToEnd& e) {
  if (!e.error.empty()) return {false, "run-all failed: " + e.error};
  auto lines = [](const fs::path& p) {
    std::vector<std::string> out;
    std::istringstream in(Slurp(p));
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
  };
  const fs::path dir = e.dir_a / "analysis" / "ctdnn_sa";
  auto unsorted = lines(dir / "attention.csv");
  auto sorted = lines(dir / "attention_sorted.csv");
  // Compare the weight columns only; the head label column travels with its row.
  std::vector<std::string> a(unsorted.begin() + 1, unsorted.end()), b(sorted.begin() + 1, sorted.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const bool permutation = unsorted.size() == sorted.size() && a == b && unsorted[0] == sorted[0];

  // Head average within per-head min/max, recomputed from the trained model.
  const auto model = am::AcousticModel::Load((e.dir_a / "am" / "ctdnn_sa" / "final.mdl").string());
  const auto feats = features::ReadArchive((e.dir_a / "features" / "test.ark").string());
  const auto emb = am::ReadEmbeddings((e.dir_a / "features" / "test_embeddings.txt").string());
  std::vector<am::Utterance> utts;
  for (const auto& f : feats) utts.push_back({&f, nullptr, &emb.at(f.speaker_id)});
  const auto profile = analysis::SortHeads(analysis::ExtractProfile(model, utts));
  const auto summary = analysis::Summarize(profile);
  bool within = true;
  for (std::size_t k = 0; k < profile.num_bins(); ++k) {
    double lo = 1e9, hi = -1e9;
    for (const auto& row : profile.weights) lo = std::min(lo, row[k]), hi = std::max(hi, row[k]);
    within = within && summary.mean[k] >= lo - 1e-12 && summary.mean[k] <= hi + 1e-12;
  }
  const auto metrics = analysis::ComputeMetrics(profile);
  std::ostringstream argmax;
  for (std::size_t h = 0; h < profile.num_heads(); ++h)
    argmax << (h ? "," : "") << static_cast<long>(metrics.argmax[h]) - static_cast<long>(profile.left);
  return {permutation && within,
          std::string("sorted rows ") + (permutation ? "are" : "are NOT") +
              " a permutation; head average " + (within ? "within" : "OUTSIDE") +
              " per-head min/max; reported argmax offsets per head: " + argmax.str() +
              " (entropy " + Fix(metrics.entropy.front(), 3) + " nats for head 0, slopes L " +
              Sci(metrics.left_slope) + " R " + Sci(metrics.right_slope) + ")"};
}

std::pair<bool, std::string> Determinism(const EndToEnd& e) {
  if (!e.error.empty()) return {false, "run-all failed: " + e.error};
  const auto a = Slurp(e.dir_a / "results.csv"), b = Slurp(e.dir_b / "results.csv");
  const bool same = !a.empty() && a == b;
  return {same, std::string("results.csv of two seed-1 runs ") +
                    (same ? "byte-identical" : "DIFFER") + " (" + std::to_string(a.size()) +
                    " bytes; second run " + Fix(e.seconds_b / 60, 1) + " min)"};
}

}  // namespace

int main(int argc, char** argv) {
  bool skip_e2e = false;
  fs::path work = fs::temp_directory_path() / "altk_acceptance";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--skip-end-to-end") == 0) skip_e2e = true;
    else if (std::strcmp(argv[i], "--work-dir") == 0 && i + 1 < argc) work = argv[++i];
  }
  std::cout << "altk acceptance suite" << std::endl;
  Criterion(1, "gradient suite", GradientSuite);
  Criterion(2, "attention invariants", AttentionInvariants);
  Criterion(3, "semi-orthogonality", SemiOrthogonality);
  Criterion(4, "parameter accounting", ParameterAccounting);
  Criterion(5, "LM oracle", LmOracle);
  Criterion(6, "decoder oracle", DecoderOracle);
  Criterion(7, "WER oracle", WerOracle);
  if (skip_e2e) {
    std::cout << "[SKIP] 8-11: end-to-end criteria skipped on request" << std::endl;
  } else {
    const auto e2e = RunEndToEnd(work);
    Criterion(8, "end-to-end synthetic benchmark", [&] { return Benchmark(e2e); });
    Criterion(9, "rescoring ladder shape", [&] { return Ladder(e2e); });
    Criterion(10, "attention analysis outputs", [&] { return AttentionOutputs(e2e); });
    Criterion(11, "determinism", [&] { return Determinism(e2e); });
  }
  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : std::to_string(failures) + " CRITERIA FAILED")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
