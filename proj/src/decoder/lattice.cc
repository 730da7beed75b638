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

#include "altk/decoder/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "altk/util/error.hpp"

namespace altk::decoder {
namespace {

std::vector<std::vector<int>> OutArcs(const Lattice& lat) {
  std::vector<std::vector<int>> out(lat.num_nodes());
  for (std::size_t a = 0; a < lat.arcs.size(); ++a) out[lat.arcs[a].from].push_back(static_cast<int>(a));
  return out;
}

std::vector<std::string> WordsAlong(const Lattice& lat, const std::vector<int>& back,
                                    int node) {
  std::vector<std::string> words;
  while (node != lat.start && back[node] >= 0) {
    const auto& arc = lat.arcs[back[node]];
    if (!arc.is_epsilon()) words.push_back(arc.word);
    node = arc.from;
  }
  std::reverse(words.begin(), words.end());
  return words;
}

}  // namespace

std::vector<int> TopologicalOrder(const Lattice& lat) {
  const int n = lat.num_nodes();
  std::vector<int> indegree(n, 0);
  for (const auto& a : lat.arcs) ++indegree[a.to];
  auto later = [&](int x, int y) {
    return std::make_pair(lat.node_frames[x], x) > std::make_pair(lat.node_frames[y], y);
  };
  std::priority_queue<int, std::vector<int>, decltype(later)> ready(later);
  for (int v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push(v);
  const auto out = OutArcs(lat);
  std::vector<int> order;
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int a : out[v])
      if (--indegree[lat.arcs[a].to] == 0) ready.push(lat.arcs[a].to);
  }
  if (static_cast<int>(order.size()) != n) throw std::logic_error("lattice: cycle detected");
  return order;
}

void ValidateLattice(const Lattice& lat, bool require_connected) {
  const int n = lat.num_nodes();
  if (n == 0) throw std::logic_error("lattice: no nodes");
  if (lat.start < 0 || lat.start >= n) throw std::logic_error("lattice: bad start node");
  for (const auto& a : lat.arcs) {
    if (a.from < 0 || a.from >= n || a.to < 0 || a.to >= n)
      throw std::logic_error("lattice: arc references a missing node");
    const int df = lat.node_frames[a.to] - lat.node_frames[a.from];
    if (df < 0 || (df == 0 && !a.is_epsilon()))
      throw std::logic_error("lattice: arc " + std::to_string(a.from) + "->" +
                             std::to_string(a.to) + " does not advance in time");
    if (std::isnan(a.am) || std::isnan(a.lm)) throw std::logic_error("lattice: NaN score");
  }
  for (const auto& [f, s] : lat.finals)
    if (f < 0 || f >= n) throw std::logic_error("lattice: bad final node");
  TopologicalOrder(lat);
  if (!require_connected) return;
  if (lat.finals.empty()) throw std::logic_error("lattice: no final node");
  const auto alpha = ForwardScores(lat), beta = BackwardScores(lat);
  for (int v = 0; v < n; ++v)
    if (alpha[v] == -kInf || beta[v] == -kInf)
      throw std::logic_error("lattice: node " + std::to_string(v) +
                             " is not on a start-to-final path");
}

std::vector<double> ForwardScores(const Lattice& lat) {
  std::vector<double> alpha(lat.num_nodes(), -kInf);
  if (lat.empty()) return alpha;
  alpha[lat.start] = 0.0;
  const auto out = OutArcs(lat);
  for (int v : TopologicalOrder(lat)) {
    if (alpha[v] == -kInf) continue;
    for (int a : out[v]) {
      const auto& arc = lat.arcs[a];
      alpha[arc.to] = std::max(alpha[arc.to], alpha[v] + lat.ArcScore(arc));
    }
  }
  return alpha;
}

std::vector<double> BackwardScores(const Lattice& lat) {
  std::vector<double> beta(lat.num_nodes(), -kInf);
  for (const auto& [f, s] : lat.finals) beta[f] = s;
  const auto order = TopologicalOrder(lat);
  const auto out = OutArcs(lat);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    for (int a : out[*it]) {
      const auto& arc = lat.arcs[a];
      if (beta[arc.to] != -kInf)
        beta[*it] = std::max(beta[*it], lat.ArcScore(arc) + beta[arc.to]);
    }
  return beta;
}

Hypothesis BestPath(const Lattice& lat) {
  if (lat.empty()) throw std::invalid_argument("best_path: empty lattice");
  const int n = lat.num_nodes();
  std::vector<double> alpha(n, -kInf);
  std::vector<int> back(n, -1);
  alpha[lat.start] = 0.0;
  const auto out = OutArcs(lat);
  for (int v : TopologicalOrder(lat)) {
    if (alpha[v] == -kInf) continue;
    for (int a : out[v]) {
      const auto& arc = lat.arcs[a];
      const double s = alpha[v] + lat.ArcScore(arc);
      const int w = arc.to;
      bool take = s > alpha[w];
      if (!take && s == alpha[w] && back[w] >= 0) {
        auto mine = WordsAlong(lat, back, v);
        if (!arc.is_epsilon()) mine.push_back(arc.word);
        take = mine < WordsAlong(lat, back, w);
      }
      if (take) {
        alpha[w] = s;
        back[w] = a;
      }
    }
  }
  int best = -1;
  double best_score = -kInf;
  for (const auto& [f, fs] : lat.finals) {
    const double s = alpha[f] + fs;
    if (s == -kInf) continue;
    if (best < 0 || s > best_score ||
        (s == best_score && WordsAlong(lat, back, f) < WordsAlong(lat, back, best))) {
      best = f;
      best_score = s;
    }
  }
  if (best < 0) throw std::invalid_argument("best_path: no complete path");
  Hypothesis h;
  h.score = best_score;
  for (int v = best; v != lat.start && back[v] >= 0; v = lat.arcs[back[v]].from) {
    const auto& arc = lat.arcs[back[v]];
    if (!arc.is_epsilon())
      h.timing.push_back({arc.word, lat.node_frames[arc.from], lat.node_frames[arc.to]});
  }
  std::reverse(h.timing.begin(), h.timing.end());
  for (const auto& t : h.timing) h.words.push_back(t.word);
  return h;
}

Lattice Connect(const Lattice& lat) {
  const auto alpha = ForwardScores(lat), beta = BackwardScores(lat);
  std::vector<int> keep;
  for (int v : TopologicalOrder(lat))
    if (v == lat.start || (alpha[v] != -kInf && beta[v] != -kInf)) keep.push_back(v);
  std::vector<int> remap(lat.num_nodes(), -1);
  Lattice out;
  out.acoustic_scale = lat.acoustic_scale;
  out.word_insertion_penalty = lat.word_insertion_penalty;
  for (int v : keep) remap[v] = out.AddNode(lat.node_frames[v]);
  out.start = remap[lat.start];
  for (const auto& a : lat.arcs) {
    if (remap[a.from] < 0 || remap[a.to] < 0) continue;
    if (alpha[a.from] == -kInf || beta[a.to] == -kInf) continue;
    LatticeArc b = a;
    b.from = remap[a.from];
    b.to = remap[a.to];
    out.arcs.push_back(std::move(b));
  }
  for (const auto& [f, s] : lat.finals)
    if (remap[f] >= 0 && alpha[f] != -kInf && s != -kInf) out.finals[remap[f]] = s;
  std::sort(out.arcs.begin(), out.arcs.end(), [](const auto& x, const auto& y) {
    return std::tie(x.from, x.to, x.word) < std::tie(y.from, y.to, y.word);
  });
  return out;
}

Lattice PruneLattice(const Lattice& lat, double beam) {
  if (!(beam > 0)) throw std::invalid_argument("prune: beam must be positive");
  const auto alpha = ForwardScores(lat), beta = BackwardScores(lat);
  double best = -kInf;
  for (const auto& [f, s] : lat.finals) best = std::max(best, alpha[f] + s);
  if (best == -kInf) return Connect(lat);
  const double threshold = best - beam - 1e-9 * std::max(1.0, std::abs(best));
  Lattice pruned = lat;
  pruned.arcs.clear();
  for (const auto& a : lat.arcs)
    if (alpha[a.from] + lat.ArcScore(a) + beta[a.to] >= threshold) pruned.arcs.push_back(a);
  pruned.finals.clear();
  for (const auto& [f, s] : lat.finals)
    if (alpha[f] + s >= threshold) pruned.finals[f] = s;
  return Connect(pruned);
}

std::map<std::vector<std::string>, double> EnumerateSequences(const Lattice& lat,
                                                              std::size_t limit) {
  std::map<std::vector<std::string>, double> out;
  if (lat.empty()) return out;
  const auto out_arcs = OutArcs(lat);
  std::size_t paths = 0;
  std::vector<std::string> words;
  auto dfs = [&](auto&& self, int v, double score) -> void {
    if (auto it = lat.finals.find(v); it != lat.finals.end()) {
      if (++paths > limit) throw std::length_error("lattice: too many paths to enumerate");
      const double total = score + it->second;
      auto [pos, inserted] = out.emplace(words, total);
      if (!inserted) pos->second = std::max(pos->second, total);
    }
    for (int a : out_arcs[v]) {
      const auto& arc = lat.arcs[a];
      if (!arc.is_epsilon()) words.push_back(arc.word);
      self(self, arc.to, score + lat.ArcScore(arc));
      if (!arc.is_epsilon()) words.pop_back();
    }
  };
  dfs(dfs, lat.start, 0.0);
  return out;
}

LatticeStats ComputeLatticeStats(const Lattice& lat, std::size_t max_sequences) {
  LatticeStats st;
  st.num_nodes = lat.node_frames.size();
  st.num_arcs = lat.arcs.size();
  if (lat.empty()) return st;
  using Seqs = std::set<std::vector<std::string>>;
  std::vector<Seqs> at(lat.num_nodes());
  at[lat.start].insert(std::vector<std::string>{});
  const auto out = OutArcs(lat);
  Seqs finals;
  for (int v : TopologicalOrder(lat)) {
    if (lat.finals.count(v)) finals.insert(at[v].begin(), at[v].end());
    for (int a : out[v]) {
      const auto& arc = lat.arcs[a];
      auto& dst = at[arc.to];
      for (auto s : at[v]) {
        if (!arc.is_epsilon()) s.push_back(arc.word);
        dst.insert(std::move(s));
        if (dst.size() > max_sequences) {
          st.sequences_exact = false;
          st.num_word_sequences = std::max(finals.size(), max_sequences);
          return st;
        }
      }
    }
    Seqs().swap(at[v]);
    if (finals.size() > max_sequences) {
      st.sequences_exact = false;
      st.num_word_sequences = finals.size();
      return st;
    }
  }
  st.num_word_sequences = finals.size();
  return st;
}

std::string LatticeToDot(const Lattice& lat, const std::string& name) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "digraph " << name << " {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (int v = 0; v < lat.num_nodes(); ++v) {
    os << "  n" << v << " [label=\"t=" << lat.node_frames[v] << "\"";
    if (lat.finals.count(v)) os << ", shape=doublecircle";
    if (v == lat.start) os << ", style=bold";
    os << "];\n";
  }
  std::vector<LatticeArc> arcs = lat.arcs;
  std::stable_sort(arcs.begin(), arcs.end(), [](const auto& x, const auto& y) {
    return std::tie(x.from, x.to, x.word) < std::tie(y.from, y.to, y.word);
  });
  for (const auto& a : arcs)
    os << "  n" << a.from << " -> n" << a.to << " [label=\"" << a.word << "/"
       << a.am << ":" << a.lm << "\"];\n";
  os << "}\n";
  return os.str();
}

void WriteLattice(std::ostream& os, const Lattice& lat) {
  os << std::setprecision(17);
  os << "# acoustic_scale " << lat.acoustic_scale << '\n';
  os << "# word_insertion_penalty " << lat.word_insertion_penalty << '\n';
  os << "# start " << lat.start << '\n';
  for (int v = 0; v < lat.num_nodes(); ++v) os << "N " << v << ' ' << lat.node_frames[v] << '\n';
  for (const auto& [f, s] : lat.finals) os << "F " << f << ' ' << s << '\n';
  for (const auto& a : lat.arcs)
    os << a.from << ' ' << a.to << ' ' << a.word << ' ' << a.am << ' ' << a.lm << '\n';
}

Lattice ReadLattice(std::istream& is) {
  Lattice lat;
  std::string line;
  std::vector<std::pair<int, int>> nodes;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) break;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    auto fail = [&] { throw FormatError("lattice: malformed line '" + line + "'"); };
    if (tag == "#") {
      std::string key;
      double value;
      if (!(ls >> key >> value)) fail();
      if (key == "acoustic_scale") lat.acoustic_scale = value;
      else if (key == "word_insertion_penalty") lat.word_insertion_penalty = value;
      else if (key == "start") lat.start = static_cast<int>(value);
    } else if (tag == "N") {
      int id, frame;
      if (!(ls >> id >> frame)) fail();
      nodes.emplace_back(id, frame);
    } else if (tag == "F") {
      int id;
      std::string s;
      if (!(ls >> id >> s)) fail();
      lat.finals[id] = std::stod(s);
    } else {
      LatticeArc a;
      std::string am, lm;
      a.from = std::stoi(tag);
      if (!(ls >> a.to >> a.word >> am >> lm)) fail();
      a.am = std::stod(am);
      a.lm = std::stod(lm);
      lat.arcs.push_back(std::move(a));
    }
  }
  std::sort(nodes.begin(), nodes.end());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].first != static_cast<int>(i))
      throw FormatError("lattice: node ids must be 0..N-1");
    lat.node_frames.push_back(nodes[i].second);
  }
  try {
    ValidateLattice(lat, false);
  } catch (const std::logic_error& e) {
    throw FormatError(std::string("lattice: ") + e.what());
  }
  return lat;
}

void WriteLatticeArchive(const std::string& path,
                         const std::vector<std::pair<std::string, Lattice>>& lattices) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (const auto& [utt, lat] : lattices) {
    out << "utt " << utt << '\n';
    WriteLattice(out, lat);
    out << '\n';
  }
}

std::vector<std::pair<std::string, Lattice>> ReadLatticeArchive(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open lattice archive " + path);
  std::vector<std::pair<std::string, Lattice>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag, utt;
    if (!(ls >> tag >> utt) || tag != "utt")
      throw FormatError(path + ": expected 'utt <id>', got '" + line + "'");
    out.emplace_back(utt, ReadLattice(in));
  }
  return out;
}

}  // namespace altk::decoder
