// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0
//
// Corpus tooling. `corpus mix` reads a JSONL corpus of full examples and
// writes the shuffled 1:1 full/partial training mix; the whole pipeline is
// deterministic in the seed.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "simulst/corpus.hpp"

int main(int argc, char** argv) {
  CLI::App app{"partial-input training-mix generator"};
  app.require_subcommand(1);

  std::string in_path;
  std::string out_path;
  std::uint64_t seed = 0;
  simulst::RatioRange range;

  CLI::App* mix = app.add_subcommand("mix", "emit the 1:1 full/partial mix of a corpus");
  mix->add_option("--in", in_path, "input JSONL corpus of full examples")
      ->required()
      ->check(CLI::ExistingFile);
  mix->add_option("--out", out_path, "output JSONL mix manifest")->required();
  mix->add_option("--seed", seed, "RNG seed")->required();
  mix->add_option("--lo", range.lo, "lower truncation-ratio bound")->capture_default_str();
  mix->add_option("--hi", range.hi, "upper truncation-ratio bound")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<simulst::CorpusExample> corpus = simulst::load_corpus_jsonl(in_path);
    simulst::MixManifest manifest = simulst::build_mix(corpus, seed, range);
    simulst::save_corpus_jsonl(manifest.examples, out_path);
    std::cout << "wrote " << manifest.examples.size() << " examples (" << manifest.full_count
              << " full, " << manifest.partial_count << " partial) -> " << out_path << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
}
