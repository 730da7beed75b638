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

// Command-line front end for the toolkit pipeline.

#include <omp.h>

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "altk/pipeline/stages.hpp"
#include "altk/util/error.hpp"

namespace {

using altk::pipeline::RunConfig;
using StageFn = std::vector<std::string> (*)(const RunConfig&, const altk::pipeline::Log&);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"altk: lyrics transcription toolkit"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  std::string config_path;
  int jobs = -1;
  std::string output;
  std::uint64_t seed = 0;
  bool print_default = false;
  app.add_option("--config", config_path, "Run configuration file");
  app.add_option("--jobs", jobs, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--output", output, "Run directory (overrides the config)");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_flag("--print-default-config", print_default, "Print the default configuration");

  const std::vector<std::tuple<std::string, std::string, StageFn>> stages = {
      {"synth", "Generate the synthetic corpus", altk::pipeline::RunSynth},
      {"features", "Extract features, CMVN, speed perturbation, speaker embeddings",
       altk::pipeline::RunFeatures},
      {"train-am", "Train the acoustic models", altk::pipeline::RunTrainAm},
      {"train-lm", "Train n-gram and recurrent language models", altk::pipeline::RunTrainLm},
      {"decode", "First-pass decoding to lattices", altk::pipeline::RunDecode},
      {"rescore", "Higher-order n-gram and recurrent LM lattice rescoring",
       altk::pipeline::RunRescore},
      {"score", "Score hypotheses and write results.csv", altk::pipeline::RunScore},
      {"analyze-attention", "Attention weight profiles (CSV, SVG, metrics)",
       altk::pipeline::RunAnalyzeAttention},
      {"params-report", "Trainable parameter counts", altk::pipeline::RunParamsReport},
      {"run-all", "Every stage in order", altk::pipeline::RunAll}};
  for (const auto& [name, help, fn] : stages) app.add_subcommand(name, help);

  CLI11_PARSE(app, argc, argv);
  if (print_default) {
    std::cout << altk::pipeline::DefaultConfigText();
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 2;
  }
  try {
    RunConfig config = config_path.empty() ? RunConfig{} : altk::pipeline::LoadRunConfig(config_path);
    if (const char* env = std::getenv("ALTK_OUTPUT_DIR"); env != nullptr && *env) config.output_dir = env;
    if (!output.empty()) config.output_dir = output;
    if (*seed_opt) config.seed = seed;
    if (jobs >= 0) config.jobs = jobs;
    config.Validate();
    if (config.jobs > 0) omp_set_num_threads(config.jobs);

    const std::string chosen = app.get_subcommands().front()->get_name();
    for (const auto& [name, help, fn] : stages)
      if (name == chosen) {
        const auto files = fn(config, [](const std::string& msg) { std::cerr << msg << std::endl; });
        std::cerr << chosen << ": wrote " << files.size() << " files under " << config.output_dir
                  << std::endl;
      }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
