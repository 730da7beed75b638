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

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "altk/analysis/attention.hpp"
#include "doctest.h"

using namespace altk;
using namespace altk::analysis;

namespace {

struct Data {
  std::vector<features::FeatureMatrix> feats;
  am::SpeakerEmbedding emb{"s", std::vector<float>(am::kEmbeddingDim, 0.5f)};
  std::vector<am::Utterance> utts;

  explicit Data(const std::vector<std::size_t>& lengths, std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> n;
    for (std::size_t len : lengths) {
      features::FeatureMatrix f;
      f.frames = len;
      f.dims = 40;
      f.speaker_id = "s";
      f.data.resize(len * 40);
      for (auto& v : f.data) v = n(rng);
      feats.push_back(std::move(f));
    }
    for (const auto& f : feats) utts.push_back({&f, nullptr, &emb});
  }
};

am::AcousticModel SaModel(std::uint64_t seed) {
  auto cfg = am::ModelConfig::Desk(13);
  cfg.attention = am::DeskAttention();
  am::AcousticModel m(cfg);
  m.Init(seed);
  return m;
}

AttentionProfile Hand(std::vector<std::vector<double>> rows, std::size_t left) {
  AttentionProfile p;
  p.left = left;
  p.right = rows.front().size() - 1 - left;
  p.weights = std::move(rows);
  for (std::size_t i = 0; i < p.weights.size(); ++i) p.head_ids.push_back(i);
  return p;
}

}  // namespace

TEST_CASE("extract_profile: zeroed query/key gives uniform rows") {
  auto m = SaModel(3);
  for (auto& v : m.attention()->w_query().value.vec()) v = 0;
  for (auto& v : m.attention()->w_key().value.vec()) v = 0;
  const auto ctx = *m.config().attention;
  Data d({40, 30, 23});
  const auto p = ExtractProfile(m, d.utts, "m", "d");
  REQUIRE(p.num_heads() == ctx.num_heads);
  CHECK(p.frames == (40 + 30 + 23) - 3 * (ctx.left + ctx.right));
  for (const auto& row : p.weights)
    for (double w : row) CHECK(w == doctest::Approx(1.0 / ctx.window()).epsilon(1e-6));
  const auto metrics = ComputeMetrics(p);
  for (double h : metrics.entropy) CHECK(h == doctest::Approx(std::log(ctx.window())));
  CHECK(std::abs(metrics.left_slope) < 1e-9);
  CHECK(std::abs(metrics.right_slope) < 1e-9);
}

TEST_CASE("extract_profile: proper distributions, determinism, errors") {
  auto m = SaModel(8);
  Data d({50, 25, 5, 33}, 4);
  const auto p = ExtractProfile(m, d.utts);
  for (const auto& row : p.weights) {
    double s = 0;
    for (double w : row) {
      CHECK(w >= 0);
      s += w;
    }
    CHECK(std::abs(s - 1) < 1e-3);
  }
  const auto again = ExtractProfile(m, d.utts);
  CHECK(again.weights == p.weights);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(3);
  const auto threaded = ExtractProfile(m, d.utts);
  omp_set_num_threads(saved);
  CHECK(threaded.weights == p.weights);

  // A one-utterance oracle: average the raw weights of the full-context frames.
  Data one({30}, 9);
  auto copy = m;
  copy.Forward(am::MakeInput<float>(one.feats[0], one.emb), nn::Mode::kInference);
  const auto& w = copy.attention()->last_weights();
  const auto ctx = *m.config().attention;
  const auto p1 = ExtractProfile(m, one.utts);
  for (std::size_t h = 0; h < ctx.num_heads; ++h)
    for (std::size_t b = 0; b < ctx.window(); ++b) {
      double s = 0;
      for (std::size_t t = ctx.left; t + ctx.right < 30; ++t) s += w[(h * 30 + t) * ctx.window() + b];
      CHECK(p1.weights[h][b] == doctest::Approx(s / (30 - ctx.left - ctx.right)).epsilon(1e-12));
    }

  am::AcousticModel plain(am::ModelConfig::Desk(13));
  plain.Init(1);
  CHECK_THROWS_AS(ExtractProfile(plain, d.utts), std::invalid_argument);
  Data shorts({5, 10});
  CHECK_THROWS_AS(ExtractProfile(m, shorts.utts), std::invalid_argument);
}

TEST_CASE("sort_heads: stable ascending by the leftmost bin") {
  const auto sorted = Hand({{0.1, 0.9}, {0.2, 0.8}, {0.3, 0.7}}, 1);
  CHECK(SortHeads(sorted).weights == sorted.weights);
  const auto reversed = Hand({{0.3, 0.7}, {0.2, 0.8}, {0.1, 0.9}}, 1);
  const auto out = SortHeads(reversed);
  CHECK(out.weights == sorted.weights);
  CHECK(out.head_ids == std::vector<std::size_t>{2, 1, 0});
  const auto ties = SortHeads(Hand({{0.5, 0.5}, {0.1, 0.9}, {0.5, 0.5}}, 0));
  CHECK(ties.head_ids == std::vector<std::size_t>{1, 0, 2});

  std::mt19937 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> rows(1 + rng() % 8, std::vector<double>(4));
    for (auto& r : rows)
      for (auto& v : r) v = (rng() % 5) / 4.0;
    const auto p = Hand(rows, 2);
    const auto s = SortHeads(p);
    auto a = p.weights, b = s.weights;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    REQUIRE(a == b);
    for (std::size_t i = 1; i < s.num_heads(); ++i) {
      REQUIRE(s.weights[i - 1][0] <= s.weights[i][0]);
      if (s.weights[i - 1][0] == s.weights[i][0]) REQUIRE(s.head_ids[i - 1] < s.head_ids[i]);
    }
    for (std::size_t i = 0; i < s.num_heads(); ++i) REQUIRE(s.weights[i] == p.weights[s.head_ids[i]]);
  }
}

TEST_CASE("summarize: mean over heads and median across bins") {
  const auto single = Hand({{0.2, 0.5, 0.3}}, 1);
  CHECK(Summarize(single).mean == single.weights[0]);
  const auto uniform = Hand({std::vector<double>(22, 1.0 / 22)}, 15);
  CHECK(Summarize(uniform).median == doctest::Approx(1.0 / 22));
  const auto two = Summarize(Hand({{0.2, 0.5, 0.3}, {0.4, 0.4, 0.2}}, 1));
  CHECK(two.mean[0] == doctest::Approx(0.3));
  CHECK(two.mean[1] == doctest::Approx(0.45));
  CHECK(two.mean[2] == doctest::Approx(0.25));
  CHECK(two.median == doctest::Approx(0.3));
  const auto even = Summarize(Hand({{0.1, 0.2, 0.3, 0.4}}, 1));
  CHECK(even.median == doctest::Approx(0.25));

  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> rows(1 + rng() % 6, std::vector<double>(7));
    for (auto& r : rows)
      for (auto& v : r) v = u(rng);
    const auto s = Summarize(Hand(rows, 3));
    for (std::size_t b = 0; b < 7; ++b) {
      double lo = 1e9, hi = -1e9;
      for (const auto& r : rows) lo = std::min(lo, r[b]), hi = std::max(hi, r[b]);
      REQUIRE(s.mean[b] >= lo - 1e-12);
      REQUIRE(s.mean[b] <= hi + 1e-12);
    }
  }
  CHECK_THROWS_AS(Summarize(AttentionProfile{}), std::invalid_argument);
}

TEST_CASE("metrics: sharper future side gives a steeper right slope") {
  // Past decays by 0.01 per frame, future by 0.05.
  std::vector<double> row = {0.1, 0.11, 0.12, 0.13, 0.14, 0.09, 0.04};
  const auto m = ComputeMetrics(Hand({row}, 4));
  CHECK(m.left_slope == doctest::Approx(-0.01));
  CHECK(m.right_slope == doctest::Approx(-0.05));
  CHECK(m.argmax[0] == 4);
}

TEST_CASE("csv and svg exports") {
  const auto p = SortHeads(Hand({{0.3, 0.5, 0.2}, {0.1, 0.6, 0.3}}, 1));
  CHECK(ProfileToCsv(p) == "head,-1,0,1\n1,0.1,0.6,0.3\n0,0.3,0.5,0.2\n");
  const auto svg = ProfileToSvg(p);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  std::size_t rects = 0;
  for (std::size_t pos = 0; (pos = svg.find("<rect", pos)) != std::string::npos; ++pos) ++rects;
  CHECK(rects == 6);
}

TEST_CASE("param_report: counts from shapes") {
  CHECK(ParamReport({}).empty());
  CHECK(ParamReportToCsv({}) == "model,parameters\n");

  auto base = am::ModelConfig::Paper(40);
  auto h1 = base, h15 = base, h30 = base;
  h1.attention = nn::AttentionContext{};
  h1.attention->num_heads = 1;
  h15.attention = nn::AttentionContext{};
  h30.attention = nn::AttentionContext{};
  h30.attention->num_heads = 30;
  const auto rows = ParamReport({{"CTDNN", base}, {"CTDNN_SA_H1", h1}, {"CTDNN_SA_H15", h15},
                                 {"CTDNN_SA_H30", h30}});
  REQUIRE(rows.size() == 4);
  CHECK(rows[1].parameters > rows[0].parameters);
  // Each extra head adds query, key and value projections of the 1024-dim
  // input (60 + 60 + 40 columns) and 40 rows of the output projection.
  const std::size_t d = 1024, dout = 1024;
  CHECK(rows[3].parameters - rows[2].parameters == 15 * (d * (2 * 60 + 40) + 40 * dout));
  for (const auto& r : rows) CHECK(r.parameters == am::AnalyticParameterCount(
                                       r.model == "CTDNN" ? base
                                       : r.model == "CTDNN_SA_H1" ? h1
                                       : r.model == "CTDNN_SA_H15" ? h15 : h30));
  CHECK(ParamReportToCsv(rows).find("CTDNN_SA_H30,") != std::string::npos);
}
