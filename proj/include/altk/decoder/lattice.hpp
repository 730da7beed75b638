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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace altk::decoder {

inline constexpr const char* kEpsilon = "<eps>";
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LatticeArc {
  int from = 0;
  int to = 0;
  std::string word;  // kEpsilon for arcs that carry no word
  double am = 0.0;   // acoustic log-score (unscaled)
  double lm = 0.0;   // language-model log-score

  bool is_epsilon() const { return word == kEpsilon; }
};

// Acyclic word graph. Path score:
//   sum over arcs (acoustic_scale * am + lm + [word] * insertion_penalty)
//   + final score of the last node.
struct Lattice {
  std::vector<int> node_frames;
  std::vector<LatticeArc> arcs;
  int start = 0;
  std::map<int, double> finals;  // node -> final LM score (log P(</s> | h))
  double acoustic_scale = 1.0;
  double word_insertion_penalty = 0.0;

  int num_nodes() const { return static_cast<int>(node_frames.size()); }
  int AddNode(int frame) {
    node_frames.push_back(frame);
    return num_nodes() - 1;
  }
  double ArcScore(const LatticeArc& arc) const {
    return acoustic_scale * arc.am + arc.lm +
           (arc.is_epsilon() ? 0.0 : word_insertion_penalty);
  }
  bool empty() const { return node_frames.empty(); }
};

struct WordTiming {
  std::string word;
  int start_frame = 0;
  int end_frame = 0;  // exclusive
};

struct Hypothesis {
  std::vector<std::string> words;
  std::vector<WordTiming> timing;
  double score = -kInf;
  bool partial = false;  // no path reached the last frame
};

// Throws std::logic_error if the lattice has a cycle, an arc that goes back
// in time, a word arc that stays in place, dangling node ids, or (when
// `require_connected`) a node off every start-to-final path.
void ValidateLattice(const Lattice& lattice, bool require_connected = true);

// Node ids in topological order (Kahn; ties broken by frame then id).
std::vector<int> TopologicalOrder(const Lattice& lattice);

// Forward (from start) and backward (to any final, including the final
// score) Viterbi scores; -inf where unreachable.
std::vector<double> ForwardScores(const Lattice& lattice);
std::vector<double> BackwardScores(const Lattice& lattice);

// Best start-to-final path. Equal scores go to the lexicographically
// smaller word sequence. Throws std::invalid_argument on an empty lattice
// or one without a complete path.
Hypothesis BestPath(const Lattice& lattice);

// Drops arcs and finals whose best path through them scores below
// best - beam, then removes disconnected nodes and renumbers.
Lattice PruneLattice(const Lattice& lattice, double beam);

// Removes nodes that are not on any start-to-final path.
Lattice Connect(const Lattice& lattice);

struct LatticeStats {
  std::size_t num_nodes = 0;
  std::size_t num_arcs = 0;
  std::size_t num_word_sequences = 0;
  bool sequences_exact = true;  // false: num_word_sequences is a lower bound
};

LatticeStats ComputeLatticeStats(const Lattice& lattice,
                                 std::size_t max_sequences = 1000000);

// Every distinct word sequence with its best score (small lattices only).
std::map<std::vector<std::string>, double> EnumerateSequences(
    const Lattice& lattice, std::size_t limit = 100000);

std::string LatticeToDot(const Lattice& lattice, const std::string& name = "lattice");

// Text form:
//   # acoustic_scale <v>
//   # word_insertion_penalty <v>
//   # start <id>
//   N <id> <frame>
//   F <id> <final_lm>
//   <from> <to> <word> <am> <lm>
void WriteLattice(std::ostream& os, const Lattice& lattice);
Lattice ReadLattice(std::istream& is);

// Multi-utterance archive: each lattice is preceded by "utt <id>" and
// followed by a blank line.
void WriteLatticeArchive(const std::string& path,
                         const std::vector<std::pair<std::string, Lattice>>& lattices);
std::vector<std::pair<std::string, Lattice>> ReadLatticeArchive(const std::string& path);

}  // namespace altk::decoder
