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

#include "altk/pipeline/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "altk/util/error.hpp"

namespace altk::pipeline {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ToDouble(const std::string& v) {
  std::size_t used = 0;
  const double d = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument("not a number");
  return d;
}

long long ToInt(const std::string& v) {
  std::size_t used = 0;
  const long long i = std::stoll(v, &used);
  if (used != v.size()) throw std::invalid_argument("not an integer");
  return i;
}

std::size_t ToSize(const std::string& v) {
  const long long i = ToInt(v);
  if (i < 0) throw std::invalid_argument("must be non-negative");
  return static_cast<std::size_t>(i);
}

bool ToBool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("not a boolean");
}

std::vector<std::string> ToList(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

// Key table: "section.key" -> setter.
const std::map<std::string, Setter>& Keys() {
  static const std::map<std::string, Setter> keys = {
      {"run.output_dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
      {"run.seed", [](RunConfig& c, const std::string& v) { c.seed = ToSize(v); }},
      {"run.jobs", [](RunConfig& c, const std::string& v) { c.jobs = static_cast<int>(ToSize(v)); }},
      {"run.models", [](RunConfig& c, const std::string& v) { c.models = ToList(v); }},

      {"synth.num_phones", [](RunConfig& c, const std::string& v) { c.synth.num_phones = ToSize(v); }},
      {"synth.num_words", [](RunConfig& c, const std::string& v) { c.synth.num_words = ToSize(v); }},
      {"synth.num_speakers", [](RunConfig& c, const std::string& v) { c.synth.num_speakers = ToSize(v); }},
      {"synth.train_utterances", [](RunConfig& c, const std::string& v) { c.synth.train_utterances = ToSize(v); }},
      {"synth.dev_utterances", [](RunConfig& c, const std::string& v) { c.synth.dev_utterances = ToSize(v); }},
      {"synth.test_utterances", [](RunConfig& c, const std::string& v) { c.synth.test_utterances = ToSize(v); }},
      {"synth.num_oov_words", [](RunConfig& c, const std::string& v) { c.synth.num_oov_words = ToSize(v); }},
      {"synth.test_oov_rate", [](RunConfig& c, const std::string& v) { c.synth.test_oov_rate = ToDouble(v); }},
      {"synth.lm_sentences", [](RunConfig& c, const std::string& v) { c.synth.lm_sentences = ToSize(v); }},
      {"synth.min_words_per_utterance", [](RunConfig& c, const std::string& v) { c.synth.min_words_per_utterance = ToSize(v); }},
      {"synth.max_words_per_utterance", [](RunConfig& c, const std::string& v) { c.synth.max_words_per_utterance = ToSize(v); }},

      {"features.frame_length_ms", [](RunConfig& c, const std::string& v) { c.synth.features.frame_length_ms = ToDouble(v); }},
      {"features.hop_ms", [](RunConfig& c, const std::string& v) { c.synth.features.hop_ms = ToDouble(v); }},
      {"features.num_mel_banks", [](RunConfig& c, const std::string& v) { c.synth.features.num_mel_banks = static_cast<int>(ToSize(v)); }},
      {"features.speed_factors", [](RunConfig& c, const std::string& v) {
         c.speed_factors.clear();
         for (const auto& s : ToList(v)) c.speed_factors.push_back(ToDouble(s));
       }},

      {"model.scale", [](RunConfig& c, const std::string& v) {
         if (v != "desk" && v != "paper") throw std::invalid_argument("expected desk or paper");
         c.desk_scale = v == "desk";
       }},
      {"model.attention_heads", [](RunConfig& c, const std::string& v) { c.attention.num_heads = ToSize(v); }},
      {"model.attention_left", [](RunConfig& c, const std::string& v) { c.attention.left = ToSize(v); }},
      {"model.attention_right", [](RunConfig& c, const std::string& v) { c.attention.right = ToSize(v); }},
      {"model.attention_key_dim", [](RunConfig& c, const std::string& v) { c.attention.key_dim = ToSize(v); }},
      {"model.attention_value_dim", [](RunConfig& c, const std::string& v) { c.attention.value_dim = ToSize(v); }},

      {"train.epochs", [](RunConfig& c, const std::string& v) { c.train.epochs = ToSize(v); }},
      {"train.minibatch_size", [](RunConfig& c, const std::string& v) { c.train.minibatch_size = ToSize(v); }},
      {"train.lr_initial", [](RunConfig& c, const std::string& v) { c.train.lr_initial = ToDouble(v); }},
      {"train.lr_final", [](RunConfig& c, const std::string& v) { c.train.lr_final = ToDouble(v); }},
      {"train.momentum", [](RunConfig& c, const std::string& v) { c.train.momentum = ToDouble(v); }},
      {"train.models_to_average", [](RunConfig& c, const std::string& v) { c.train.models_to_average = ToSize(v); }},
      {"train.valid_interval", [](RunConfig& c, const std::string& v) { c.train.valid_interval = ToSize(v); }},
      {"train.max_valid_utterances", [](RunConfig& c, const std::string& v) { c.train.max_valid_utterances = ToSize(v); }},
      {"train.max_grad_norm", [](RunConfig& c, const std::string& v) { c.train.max_grad_norm = ToDouble(v); }},

      {"lm.first_pass_order", [](RunConfig& c, const std::string& v) { c.lm.first_pass_order = static_cast<int>(ToSize(v)); }},
      {"lm.rescore_order", [](RunConfig& c, const std::string& v) { c.lm.rescore_order = static_cast<int>(ToSize(v)); }},
      {"lm.unk", [](RunConfig& c, const std::string& v) { c.lm.unk = ToBool(v); }},
      {"lm.rnnlm", [](RunConfig& c, const std::string& v) { c.lm.rnnlm = ToBool(v); }},
      {"lm.unk_continuation", [](RunConfig& c, const std::string& v) { c.lm.unk_continuation = ToDouble(v); }},
      {"lm.rnnlm_dim", [](RunConfig& c, const std::string& v) { c.lm.rnnlm_config.dim = static_cast<int>(ToSize(v)); }},
      {"lm.rnnlm_epochs", [](RunConfig& c, const std::string& v) { c.lm.rnnlm_config.epochs = static_cast<int>(ToSize(v)); }},
      {"lm.rnnlm_learning_rate", [](RunConfig& c, const std::string& v) { c.lm.rnnlm_config.learning_rate = ToDouble(v); }},
      {"lm.rnnlm_weight", [](RunConfig& c, const std::string& v) { c.lm.rnnlm_rescore.weight = ToDouble(v); }},
      {"lm.rnnlm_pruning_beam", [](RunConfig& c, const std::string& v) { c.lm.rnnlm_rescore.pruning_beam = ToDouble(v); }},
      {"lm.rnnlm_history_words", [](RunConfig& c, const std::string& v) { c.lm.rnnlm_rescore.history_words = static_cast<int>(ToSize(v)); }},

      {"decode.beam", [](RunConfig& c, const std::string& v) { c.decode.beam = ToDouble(v); }},
      {"decode.lattice_beam", [](RunConfig& c, const std::string& v) { c.decode.lattice_beam = ToDouble(v); }},
      {"decode.acoustic_scale", [](RunConfig& c, const std::string& v) { c.decode.acoustic_scale = ToDouble(v); }},
      {"decode.word_insertion_penalty", [](RunConfig& c, const std::string& v) { c.decode.word_insertion_penalty = ToDouble(v); }},
      {"decode.max_active_tokens", [](RunConfig& c, const std::string& v) { c.decode.max_active_tokens = static_cast<int>(ToSize(v)); }},
  };
  return keys;
}

}  // namespace

am::ModelConfig RunConfig::ModelFor(const std::string& name, std::size_t output_units) const {
  am::ModelConfig m = desk_scale ? am::ModelConfig::Desk(output_units)
                                 : am::ModelConfig::Paper(output_units);
  m.feat_dim = static_cast<std::size_t>(synth.features.num_mel_banks);
  m.input_height = m.feat_dim;
  if (name == "ctdnn_sa")
    m.attention = attention;
  else if (name != "ctdnn")
    throw ConfigError("unknown model '" + name + "' (expected ctdnn or ctdnn_sa)");
  return m;
}

void RunConfig::Validate() const {
  try {
    synth.Validate();
    train.Validate();
    decode.Validate();
    attention.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  if (models.empty()) throw ConfigError("run.models is empty");
  for (const auto& m : models) ModelFor(m, 2);
  if (speed_factors.empty()) throw ConfigError("features.speed_factors is empty");
  for (double f : speed_factors)
    if (f <= 0) throw ConfigError("features.speed_factors must be positive");
  if (lm.first_pass_order < 1 || lm.rescore_order < lm.first_pass_order ||
      lm.rescore_order > 4)
    throw ConfigError("lm orders must satisfy 1 <= first_pass_order <= rescore_order <= 4");
  if (lm.rnnlm_rescore.weight < 0 || lm.rnnlm_rescore.weight > 1)
    throw ConfigError("lm.rnnlm_weight must lie in [0, 1]");
}

RunConfig ParseRunConfig(const std::string& text, const std::string& source) {
  static const std::vector<std::string> sections = {"run", "synth", "features", "model",
                                                    "train", "lm", "decode"};
  RunConfig config;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw ConfigError(source + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header '" + line + "'");
      section = Trim(line.substr(1, line.size() - 2));
      if (std::find(sections.begin(), sections.end(), section) == sections.end())
        fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', got '" + line + "'");
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (section.empty()) fail("key '" + key + "' outside any section");
    const auto it = Keys().find(section + "." + key);
    if (it == Keys().end()) fail("unknown key '" + key + "' in section [" + section + "]");
    try {
      it->second(config, value);
    } catch (const std::exception& e) {
      fail("bad value '" + value + "' for key '" + key + "': " + e.what());
    }
  }
  config.Validate();
  return config;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseRunConfig(ss.str(), path);
}

std::string DefaultConfigText() {
  const RunConfig c;
  std::ostringstream os;
  auto list = [](const auto& v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
    return s.str();
  };
  os << "[run]\noutput_dir = " << c.output_dir << "\nseed = " << c.seed
     << "\njobs = " << c.jobs << "\nmodels = " << list(c.models) << "\n\n";
  os << "[synth]\nnum_phones = " << c.synth.num_phones << "\nnum_words = " << c.synth.num_words
     << "\nnum_speakers = " << c.synth.num_speakers
     << "\ntrain_utterances = " << c.synth.train_utterances
     << "\ndev_utterances = " << c.synth.dev_utterances
     << "\ntest_utterances = " << c.synth.test_utterances
     << "\nnum_oov_words = " << c.synth.num_oov_words
     << "\ntest_oov_rate = " << c.synth.test_oov_rate
     << "\nlm_sentences = " << c.synth.lm_sentences
     << "\nmin_words_per_utterance = " << c.synth.min_words_per_utterance
     << "\nmax_words_per_utterance = " << c.synth.max_words_per_utterance << "\n\n";
  os << "[features]\nframe_length_ms = " << c.synth.features.frame_length_ms
     << "\nhop_ms = " << c.synth.features.hop_ms
     << "\nnum_mel_banks = " << c.synth.features.num_mel_banks
     << "\nspeed_factors = " << list(c.speed_factors) << "\n\n";
  os << "[model]\nscale = " << (c.desk_scale ? "desk" : "paper")
     << "\nattention_heads = " << c.attention.num_heads
     << "\nattention_left = " << c.attention.left << "\nattention_right = " << c.attention.right
     << "\nattention_key_dim = " << c.attention.key_dim
     << "\nattention_value_dim = " << c.attention.value_dim << "\n\n";
  os << "[train]\nepochs = " << c.train.epochs << "\nminibatch_size = " << c.train.minibatch_size
     << "\nlr_initial = " << c.train.lr_initial << "\nlr_final = " << c.train.lr_final
     << "\nmomentum = " << c.train.momentum
     << "\nmodels_to_average = " << c.train.models_to_average
     << "\nvalid_interval = " << c.train.valid_interval
     << "\nmax_valid_utterances = " << c.train.max_valid_utterances
     << "\nmax_grad_norm = " << c.train.max_grad_norm << "\n\n";
  os << "[lm]\nfirst_pass_order = " << c.lm.first_pass_order
     << "\nrescore_order = " << c.lm.rescore_order << "\nunk = " << (c.lm.unk ? "true" : "false")
     << "\nrnnlm = " << (c.lm.rnnlm ? "true" : "false")
     << "\nunk_continuation = " << c.lm.unk_continuation
     << "\nrnnlm_dim = " << c.lm.rnnlm_config.dim << "\nrnnlm_epochs = " << c.lm.rnnlm_config.epochs
     << "\nrnnlm_learning_rate = " << c.lm.rnnlm_config.learning_rate
     << "\nrnnlm_weight = " << c.lm.rnnlm_rescore.weight
     << "\nrnnlm_pruning_beam = " << c.lm.rnnlm_rescore.pruning_beam
     << "\nrnnlm_history_words = " << c.lm.rnnlm_rescore.history_words << "\n\n";
  os << "[decode]\nbeam = " << c.decode.beam << "\nlattice_beam = " << c.decode.lattice_beam
     << "\nacoustic_scale = " << c.decode.acoustic_scale
     << "\nword_insertion_penalty = " << c.decode.word_insertion_penalty
     << "\nmax_active_tokens = " << c.decode.max_active_tokens << "\n";
  return os.str();
}

}  // namespace altk::pipeline
