// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0
//
// Benchmark of the parallel evaluation paths against their serial reference
// implementations: the per-utterance evaluation loop and the corpus BLEU
// statistics. Verifies that both paths agree before reporting speedups.

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "simulst/bleu.hpp"
#include "simulst/harness.hpp"
#include "simulst/math.hpp"
#include "simulst/toy_decoder.hpp"

namespace fs = std::filesystem;

namespace {

template <typename Fn>
double best_of_ms(int repeats, Fn&& fn) {
  double best = 0.0;
  for (int i = 0; i < repeats; ++i) {
    auto start = std::chrono::steady_clock::now();
    fn();
    auto end = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(end - start).count();
    if (i == 0 || ms < best) best = ms;
  }
  return best;
}

simulst::ToyTranslatorSpec make_spec(std::size_t vocabulary) {
  simulst::ToyTranslatorSpec spec;
  for (std::size_t i = 0; i < vocabulary; ++i) {
    spec.word_map["w" + std::to_string(i)] = "T" + std::to_string(i);
  }
  spec.tail_mode = simulst::TailGuessMode::kCycling;
  spec.stability_horizon = 2;
  return spec;
}

simulst::EvalManifest make_manifest(std::size_t utterances, std::size_t tokens,
                                    std::size_t vocabulary, const std::string& backend) {
  simulst::EvalManifest manifest;
  manifest.backend = backend;
  std::mt19937_64 rng(2026);
  for (std::size_t u = 0; u < utterances; ++u) {
    simulst::EvalUtterance utterance;
    utterance.id = "u" + std::to_string(u);
    utterance.direction = u % 2 == 0 ? "aa-bb" : "cc-dd";
    std::string reference;
    for (std::size_t t = 0; t < tokens; ++t) {
      auto word = simulst::uniform_below(rng, vocabulary);
      utterance.source_tokens.push_back("w" + std::to_string(word));
      if (!reference.empty()) reference += ' ';
      reference += "T" + std::to_string(word);
    }
    utterance.reference = reference;
    manifest.utterances.push_back(std::move(utterance));
  }
  return manifest;
}

void make_bleu_corpus(std::size_t pairs, std::size_t tokens, std::vector<std::string>& hyps,
                      std::vector<std::string>& refs) {
  std::mt19937_64 rng(777);
  const std::vector<std::string> vocab = {"the",  "model", "keeps",  "words", "stable",
                                          "once", "both",  "passes", "agree", "again"};
  for (std::size_t p = 0; p < pairs; ++p) {
    std::string ref;
    std::string hyp;
    for (std::size_t t = 0; t < tokens; ++t) {
      const std::string& word = vocab[simulst::uniform_below(rng, vocab.size())];
      if (!ref.empty()) ref += ' ';
      ref += word;
      if (!hyp.empty()) hyp += ' ';
      // ~20% substitutions keep precision realistic.
      hyp += simulst::uniform01(rng) < 0.2 ? vocab[simulst::uniform_below(rng, vocab.size())]
                                           : word;
    }
    refs.push_back(std::move(ref));
    hyps.push_back(std::move(hyp));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel benchmark"};

  std::size_t utterances = 300;
  std::size_t tokens = 80;
  std::size_t pairs = 20000;
  std::size_t sentence_tokens = 25;
  int repeats = 3;

  app.add_option("--utterances", utterances, "synthetic utterances in the eval benchmark")
      ->capture_default_str();
  app.add_option("--tokens", tokens, "tokens per synthetic utterance")->capture_default_str();
  app.add_option("--pairs", pairs, "sentence pairs in the BLEU benchmark")
      ->capture_default_str();
  app.add_option("--repeat", repeats, "repetitions, best time wins")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP: parallel paths fall back to serial\n");
#endif

    fs::path spec_path =
        fs::temp_directory_path() / ("bench-toy-spec-" + std::to_string(::getpid()) + ".json");
    {
      std::ofstream out(spec_path);
      out << make_spec(200).to_json_text();
    }

    simulst::EvalManifest manifest =
        make_manifest(utterances, tokens, 200, "toy:" + spec_path.string());
    simulst::RunOptions options;
    options.backend = simulst::BackendSpec::parse(*manifest.backend);

    std::vector<simulst::EvalRecord> serial_records;
    std::vector<simulst::EvalRecord> parallel_records;
    double eval_serial_ms =
        best_of_ms(repeats, [&] { serial_records = simulst::run_eval_serial(manifest, options); });
    double eval_parallel_ms =
        best_of_ms(repeats, [&] { parallel_records = simulst::run_eval(manifest, options); });
    bool eval_match = simulst::equivalent_ignoring_wall_time(serial_records, parallel_records);

    std::vector<std::string> hyps;
    std::vector<std::string> refs;
    make_bleu_corpus(pairs, sentence_tokens, hyps, refs);
    simulst::BleuStats serial_stats;
    simulst::BleuStats parallel_stats;
    double bleu_serial_ms =
        best_of_ms(repeats, [&] { serial_stats = simulst::corpus_stats_serial(hyps, refs); });
    double bleu_parallel_ms =
        best_of_ms(repeats, [&] { parallel_stats = simulst::corpus_stats(hyps, refs); });
    bool bleu_match = serial_stats == parallel_stats;

    std::printf("%-12s %12s %12s %9s %s\n", "benchmark", "serial_ms", "parallel_ms", "speedup",
                "results");
    std::printf("%-12s %12.2f %12.2f %8.2fx %s\n", "eval", eval_serial_ms, eval_parallel_ms,
                eval_serial_ms / eval_parallel_ms, eval_match ? "identical" : "MISMATCH");
    std::printf("%-12s %12.2f %12.2f %8.2fx %s\n", "bleu-stats", bleu_serial_ms, bleu_parallel_ms,
                bleu_serial_ms / bleu_parallel_ms, bleu_match ? "identical" : "MISMATCH");
    std::printf("bleu score: %.4f\n", simulst::bleu_from_stats(parallel_stats));

    fs::remove(spec_path);
    return eval_match && bleu_match ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
}
