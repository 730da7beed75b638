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

#include "altk/decoder/decoder.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <tuple>
#include <stdexcept>
#include <unordered_map>

#include "altk/util/error.hpp"

namespace altk::decoder {
namespace {

using History = std::array<lm::WordId, 3>;

struct Token {
  double score;  // alpha(src) + acoustic_scale * am + graph
  double am;
  double graph;
  int state;
  int src;
};

struct NodeInfo {
  History history;
  int history_len;
  double alpha;
};

class Search {
 public:
  Search(const ScoreMatrix& scores, const DecodeGraph& graph, const DecodeParams& params)
      : scores_(scores), graph_(graph), params_(params), lm_(graph.lm()) {}

  DecodeResult Run();

 private:
  void AddToken(int state, int src, double score, double am, double graph_cost) {
    const std::uint64_t key = (static_cast<std::uint64_t>(state) << 32) | static_cast<std::uint32_t>(src);
    auto [it, inserted] = index_.try_emplace(key, next_.size());
    if (inserted) {
      next_.push_back({score, am, graph_cost, state, src});
    } else if (score > next_[it->second].score) {
      next_[it->second] = {score, am, graph_cost, state, src};
    }
  }

  // Enter state `s` consuming frame t from a token-like predecessor.
  void Enter(int s, int src, double score, double am, double graph_cost, std::size_t t,
             double extra_graph) {
    const double a = scores_.at(t, graph_.PhoneOf(s));
    AddToken(s, src, score + params_.acoustic_scale * a + extra_graph, am + a,
             graph_cost + extra_graph);
  }

  void EnterWordStarts(int src, double score, double am, double graph_cost, std::size_t t) {
    for (int c : graph_.RootChildren()) Enter(c, src, score, am, graph_cost, t, 0.0);
    if (graph_.has_unk())
      for (int i = 0; i < graph_.num_unk_states(); ++i) {
        const int u = graph_.UnkState(i);
        Enter(u, src, score, am, graph_cost, t, graph_.UnkPhoneLogProb(u));
      }
  }

  void Expand(const Token& tok, std::size_t t);
  void Prune();
  void CloseArcs(int boundary);
  void CloseWord(const Token& tok, int word, double extra_graph, int boundary);
  int NodeFor(int frame, const History& h, int len);

  const ScoreMatrix& scores_;
  const DecodeGraph& graph_;
  const DecodeParams& params_;
  const lm::NGramModel& lm_;

  std::vector<Token> cur_, next_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  Lattice lat_;
  std::vector<NodeInfo> nodes_;
  std::map<std::pair<int, History>, int> node_index_;  // (frame, history)
  std::map<std::tuple<int, int, int>, std::size_t> arc_index_;  // (src, dst, word)
  std::vector<int> frontier_;
  std::size_t max_tokens_ = 0;
};

int Search::NodeFor(int frame, const History& h, int len) {
  auto [it, inserted] = node_index_.try_emplace({frame, h}, 0);
  if (inserted) {
    it->second = lat_.AddNode(frame);
    nodes_.push_back({h, len, -kInf});
    frontier_.push_back(it->second);
  }
  return it->second;
}

void Search::Expand(const Token& tok, std::size_t t) {
  const int s = tok.state;
  Enter(s, tok.src, tok.score, tok.am, tok.graph, t, 0.0);  // self-loop
  if (s == DecodeGraph::kLeadSilence) {
    EnterWordStarts(tok.src, tok.score, tok.am, tok.graph, t);
  } else if (graph_.IsTreeState(s)) {
    const auto& node = graph_.Tree(s);
    for (int c : node.children) Enter(c, tok.src, tok.score, tok.am, tok.graph, t, 0.0);
    for (int w : node.words)
      Enter(graph_.TrailingSilence(w), tok.src, tok.score, tok.am, tok.graph, t, 0.0);
  } else if (graph_.IsUnkState(s)) {
    for (int i = 0; i < graph_.num_unk_states(); ++i) {
      const int u = graph_.UnkState(i);
      Enter(u, tok.src, tok.score, tok.am, tok.graph, t,
            graph_.unk_log_continue() + graph_.UnkPhoneLogProb(u));
    }
    Enter(graph_.TrailingSilence(graph_.unk_word()), tok.src, tok.score, tok.am, tok.graph,
          t, graph_.unk_log_stop());
  }
}

void Search::Prune() {
  if (next_.empty()) return;
  double best = -kInf;
  for (const auto& tk : next_) best = std::max(best, tk.score);
  double threshold = best - params_.beam;
  if (next_.size() > static_cast<std::size_t>(params_.max_active_tokens)) {
    std::vector<double> s;
    s.reserve(next_.size());
    for (const auto& tk : next_) s.push_back(tk.score);
    auto kth = s.begin() + (params_.max_active_tokens - 1);
    std::nth_element(s.begin(), kth, s.end(), std::greater<double>());
    threshold = std::max(threshold, *kth);
  }
  std::erase_if(next_, [&](const Token& tk) { return tk.score < threshold; });
}

void Search::CloseWord(const Token& tok, int word, double extra_graph, int boundary) {
  const NodeInfo src = nodes_[tok.src];
  const auto& gw = graph_.words()[word];
  const double lm = lm_.Score(std::span<const lm::WordId>(src.history.data(), src.history_len),
                              gw.lm_id);
  if (lm == -kInf) return;
  History h = src.history;
  int len = src.history_len;
  const int keep = lm_.order() - 1;
  if (keep > 0) {
    if (len == keep) {
      std::rotate(h.begin(), h.begin() + 1, h.begin() + len);
      h[len - 1] = gw.lm_id;
    } else {
      h[len++] = gw.lm_id;
    }
  }
  const int dst = NodeFor(boundary, h, len);
  const double graph_cost = tok.graph + extra_graph;
  LatticeArc arc{tok.src, dst, gw.label, tok.am + graph_cost / params_.acoustic_scale, lm};
  const double alpha = tok.score + extra_graph + lm + params_.word_insertion_penalty;
  auto [it, inserted] = arc_index_.try_emplace({tok.src, dst, word}, lat_.arcs.size());
  if (inserted) {
    lat_.arcs.push_back(arc);
  } else if (lat_.ArcScore(arc) > lat_.ArcScore(lat_.arcs[it->second])) {
    lat_.arcs[it->second] = arc;
  }
  nodes_[dst].alpha = std::max(nodes_[dst].alpha, alpha);
}

void Search::CloseArcs(int boundary) {
  const bool last = boundary == static_cast<int>(scores_.frames);
  for (const auto& tok : cur_) {
    const int s = tok.state;
    if (graph_.IsTreeState(s)) {
      for (int w : graph_.Tree(s).words) CloseWord(tok, w, 0.0, boundary);
    } else if (graph_.IsUnkState(s)) {
      CloseWord(tok, graph_.unk_word(), graph_.unk_log_stop(), boundary);
    } else if (graph_.IsTrailingSilence(s)) {
      CloseWord(tok, graph_.WordOfTrailingSilence(s), 0.0, boundary);
    } else if (s == DecodeGraph::kLeadSilence && last) {
      // Silence-only utterance: an epsilon arc keeps the start history.
      const NodeInfo src = nodes_[tok.src];
      const int dst = NodeFor(boundary, src.history, src.history_len);
      lat_.arcs.push_back({tok.src, dst, kEpsilon, tok.am + tok.graph / params_.acoustic_scale, 0.0});
      nodes_[dst].alpha = std::max(nodes_[dst].alpha, tok.score);
    }
  }
}

DecodeResult Search::Run() {
  const std::size_t T = scores_.frames;
  lat_.acoustic_scale = params_.acoustic_scale;
  lat_.word_insertion_penalty = params_.word_insertion_penalty;
  History start{};
  start.fill(-1);
  int start_len = 0;
  if (lm_.order() > 1) start[start_len++] = lm_.bos();
  lat_.start = NodeFor(0, start, start_len);
  nodes_[lat_.start].alpha = 0.0;

  for (std::size_t t = 0; t < T; ++t) {
    next_.clear();
    index_.clear();
    for (const auto& tok : cur_) Expand(tok, t);
    // Nodes reached at this boundary start new word arcs.
    double best_node = -kInf;
    for (int v : frontier_) best_node = std::max(best_node, nodes_[v].alpha);
    for (int v : frontier_) {
      const double a = nodes_[v].alpha;
      if (a == -kInf || a < best_node - params_.beam) continue;
      EnterWordStarts(v, a, 0.0, 0.0, t);
      if (v == lat_.start) Enter(DecodeGraph::kLeadSilence, v, a, 0.0, 0.0, t, 0.0);
    }
    frontier_.clear();
    Prune();
    max_tokens_ = std::max(max_tokens_, next_.size());
    std::swap(cur_, next_);
    CloseArcs(static_cast<int>(t + 1));
  }

  bool partial = false;
  for (int v = 0; v < lat_.num_nodes(); ++v)
    if (lat_.node_frames[v] == static_cast<int>(T) && nodes_[v].alpha > -kInf) {
      const auto& n = nodes_[v];
      lat_.finals[v] = lm_.Score(std::span<const lm::WordId>(n.history.data(), n.history_len),
                                 lm_.eos());
    }
  if (lat_.finals.empty() || std::all_of(lat_.finals.begin(), lat_.finals.end(),
                                          [](const auto& f) { return f.second == -kInf; })) {
    // Fall back to the best node at the latest reachable frame.
    partial = true;
    lat_.finals.clear();
    int best = lat_.start;
    for (int v = 0; v < lat_.num_nodes(); ++v) {
      if (nodes_[v].alpha == -kInf) continue;
      if (std::make_pair(lat_.node_frames[v], nodes_[v].alpha) >
          std::make_pair(lat_.node_frames[best], nodes_[best].alpha))
        best = v;
    }
    const auto& n = nodes_[best];
    const double f = lm_.Score(std::span<const lm::WordId>(n.history.data(), n.history_len),
                               lm_.eos());
    lat_.finals[best] = f == -kInf ? 0.0 : f;
  }

  DecodeResult result;
  result.lattice = std::isinf(params_.lattice_beam) ? Connect(lat_)
                                                    : PruneLattice(lat_, params_.lattice_beam);
  ValidateLattice(result.lattice, true);
  result.hypothesis = BestPath(result.lattice);
  result.hypothesis.partial = partial;
  result.max_tokens = max_tokens_;
  return result;
}

}  // namespace

void DecodeParams::Validate() const {
  if (!(lattice_beam > 0) || !(beam >= lattice_beam))
    throw std::invalid_argument("decode: need beam >= lattice_beam > 0");
  if (max_active_tokens <= 0) throw std::invalid_argument("decode: max_active_tokens must be > 0");
  if (!(acoustic_scale > 0)) throw std::invalid_argument("decode: acoustic_scale must be > 0");
}

DecodeResult Decode(const ScoreMatrix& scores, const DecodeGraph& graph,
                    const DecodeParams& params) {
  params.Validate();
  if (scores.num_phones != static_cast<std::size_t>(graph.phones().size()))
    throw VocabularyError("decode: score matrix has " + std::to_string(scores.num_phones) +
                          " columns but the graph has " +
                          std::to_string(graph.phones().size()) + " phones");
  if (scores.frames == 0) throw std::invalid_argument("decode: no frames");
  if (scores.data.size() != scores.frames * scores.num_phones)
    throw std::invalid_argument("decode: score matrix size mismatch");
  return Search(scores, graph, params).Run();
}

}  // namespace altk::decoder
