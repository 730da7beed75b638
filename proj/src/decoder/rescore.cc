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

#include "altk/decoder/rescore.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "altk/util/error.hpp"

namespace altk::decoder {
namespace {

using WordHistory = std::vector<lm::WordId>;

WordHistory Push(WordHistory h, lm::WordId w, std::size_t keep) {
  if (keep == 0) return {};
  h.push_back(w);
  if (h.size() > keep) h.erase(h.begin(), h.end() - keep);
  return h;
}

std::vector<std::vector<int>> OutArcs(const Lattice& lat) {
  std::vector<std::vector<int>> out(lat.num_nodes());
  for (std::size_t a = 0; a < lat.arcs.size(); ++a) out[lat.arcs[a].from].push_back(static_cast<int>(a));
  return out;
}

Lattice EmptyLike(const Lattice& lat) {
  Lattice out;
  out.acoustic_scale = lat.acoustic_scale;
  out.word_insertion_penalty = lat.word_insertion_penalty;
  return out;
}

}  // namespace

Lattice RescoreNgram(const Lattice& lat, const lm::NGramModel& lm) {
  ValidateLattice(lat, false);
  const std::size_t keep = static_cast<std::size_t>(lm.order() - 1);
  Lattice out = EmptyLike(lat);
  std::vector<std::map<WordHistory, int>> copies(lat.num_nodes());
  std::vector<WordHistory> history;
  auto copy_of = [&](int old, const WordHistory& h) {
    auto [it, inserted] = copies[old].try_emplace(h, 0);
    if (inserted) {
      it->second = out.AddNode(lat.node_frames[old]);
      history.push_back(h);
    }
    return it->second;
  };
  WordHistory start;
  if (keep > 0) start.push_back(lm.bos());
  out.start = copy_of(lat.start, start);
  const auto out_arcs = OutArcs(lat);
  for (int u : TopologicalOrder(lat)) {
    for (const auto& [h, e] : copies[u]) {
      if (auto f = lat.finals.find(u); f != lat.finals.end())
        out.finals[e] = lm.Score(h, lm.eos());
      for (int a : out_arcs[u]) {
        const auto& arc = lat.arcs[a];
        LatticeArc b = arc;
        b.from = e;
        if (arc.is_epsilon()) {
          b.to = copy_of(arc.to, h);
        } else {
          const lm::WordId w = lm.IdOrUnk(arc.word);
          b.lm = lm.Score(h, w);
          b.to = copy_of(arc.to, Push(h, w, keep));
        }
        out.arcs.push_back(std::move(b));
      }
    }
  }
  auto result = Connect(out);
  ValidateLattice(result, false);
  return result;
}

Lattice RescoreRnnlm(const Lattice& lat, const lm::RecurrentLM& rnnlm,
                     const RnnlmRescoreOptions& options) {
  if (!(options.weight >= 0 && options.weight <= 1))
    throw std::invalid_argument("rnnlm rescoring: weight must be in [0, 1]");
  if (!(options.pruning_beam > 0))
    throw std::invalid_argument("rnnlm rescoring: pruning_beam must be positive");
  if (options.history_words < 1)
    throw std::invalid_argument("rnnlm rescoring: history_words must be >= 1");
  ValidateLattice(lat, false);
  const double w = options.weight;
  const auto keep = static_cast<std::size_t>(options.history_words);

  struct Copy {
    int id;
    double alpha;
    lm::RecurrentLM::State state;
  };
  Lattice out = EmptyLike(lat);
  std::vector<std::map<WordHistory, Copy>> copies(lat.num_nodes());
  out.start = out.AddNode(lat.node_frames[lat.start]);
  copies[lat.start].emplace(WordHistory{}, Copy{out.start, 0.0, rnnlm.InitialState()});

  const auto out_arcs = OutArcs(lat);
  for (int u : TopologicalOrder(lat)) {
    auto& here = copies[u];
    if (here.empty()) continue;
    double best = -kInf;
    for (const auto& [h, c] : here) best = std::max(best, c.alpha);
    for (const auto& [h, c] : here) {
      if (c.alpha < best - options.pruning_beam) continue;
      if (auto f = lat.finals.find(u); f != lat.finals.end()) {
        const double r = rnnlm.LogDistribution(c.state)[rnnlm.eos()];
        out.finals[c.id] = (1 - w) * f->second + w * r;
      }
      std::vector<double> dist;  // computed lazily: epsilon-only nodes skip it
      for (int a : out_arcs[u]) {
        const auto& arc = lat.arcs[a];
        LatticeArc b = arc;
        b.from = c.id;
        WordHistory next_h = h;
        lm::RecurrentLM::State next_state;
        if (!arc.is_epsilon()) {
          if (dist.empty()) dist = rnnlm.LogDistribution(c.state);
          const lm::WordId id = rnnlm.IdOrUnk(arc.word);
          b.lm = (1 - w) * arc.lm + w * dist[id];
          next_h = Push(h, id, keep);
        }
        const double alpha = c.alpha + out.ArcScore(b);
        auto& dst = copies[arc.to];
        auto it = dst.find(next_h);
        if (it == dst.end()) {
          next_state = arc.is_epsilon() ? c.state : rnnlm.Step(c.state, rnnlm.IdOrUnk(arc.word)).next;
          it = dst.emplace(next_h, Copy{out.AddNode(lat.node_frames[arc.to]), alpha,
                                        std::move(next_state)}).first;
        } else if (alpha > it->second.alpha) {
          it->second.alpha = alpha;
          it->second.state = arc.is_epsilon() ? c.state
                                              : rnnlm.Step(c.state, rnnlm.IdOrUnk(arc.word)).next;
        }
        b.to = it->second.id;
        out.arcs.push_back(std::move(b));
      }
    }
  }
  auto result = Connect(out);
  ValidateLattice(result, false);
  return result;
}

}  // namespace altk::decoder
