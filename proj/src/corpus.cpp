// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/corpus.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <unordered_set>
#include <utility>

#include "simulst/errors.hpp"
#include "simulst/math.hpp"

namespace simulst {

using nlohmann::json;

namespace {

constexpr std::size_t kHistogramBins = 30;

void validate_example(const CorpusExample& example) {
  if (example.id.empty()) {
    throw ManifestError("corpus example with empty id");
  }
  if (example.target.empty()) {
    throw ManifestError("corpus example '" + example.id + "' has an empty target");
  }
  if (example.kind == CorpusExample::Kind::kPartial && !example.ratio.has_value()) {
    throw ManifestError("partial example '" + example.id + "' is missing its ratio");
  }
  if (example.kind == CorpusExample::Kind::kFull && example.ratio.has_value()) {
    throw ManifestError("full example '" + example.id + "' must not carry a ratio");
  }
}

std::uint64_t truncated_count(std::uint64_t length, double ratio) {
  auto kept = static_cast<std::uint64_t>(std::floor(ratio * static_cast<double>(length)));
  return kept < 1 ? 1 : kept;
}

}  // namespace

CorpusExample make_partial(const CorpusExample& example, double ratio, const RatioRange& range) {
  if (example.kind != CorpusExample::Kind::kFull) {
    throw ArgumentError("make_partial expects a full example, got '" + example.id + "'");
  }
  if (!(ratio >= range.lo && ratio <= range.hi)) {
    throw ArgumentError("ratio " + std::to_string(ratio) + " outside [" +
                        std::to_string(range.lo) + ", " + std::to_string(range.hi) + "]");
  }
  validate_example(example);

  CorpusExample partial;
  partial.id = example.id + "#partial";
  partial.kind = CorpusExample::Kind::kPartial;
  partial.ratio = ratio;

  std::uint64_t target_keep = truncated_count(example.target.size(), ratio);
  std::vector<std::string> target_tokens(example.target.tokens.begin(),
                                         example.target.tokens.begin() +
                                             static_cast<std::ptrdiff_t>(target_keep));
  partial.target = TokenSequence(std::move(target_tokens), example.target.tokenizer_tag);

  if (const auto* frames = std::get_if<FrameRef>(&example.source)) {
    FrameRef ref = *frames;
    ref.count = truncated_count(ref.count, ratio);
    partial.source = std::move(ref);
  } else {
    const auto& tokens = std::get<TokenSequence>(example.source);
    std::uint64_t source_keep = truncated_count(tokens.size(), ratio);
    std::vector<std::string> source_tokens(tokens.tokens.begin(),
                                           tokens.tokens.begin() +
                                               static_cast<std::ptrdiff_t>(source_keep));
    partial.source = TokenSequence(std::move(source_tokens), tokens.tokenizer_tag);
  }
  return partial;
}

MixManifest build_mix(const std::vector<CorpusExample>& corpus, std::uint64_t seed,
                      const RatioRange& range) {
  if (corpus.empty()) {
    throw ArgumentError("cannot build a mix from an empty corpus");
  }
  if (!(range.lo > 0.0 && range.lo <= range.hi && range.hi <= 1.0)) {
    throw ArgumentError("ratio range must satisfy 0 < lo <= hi <= 1");
  }
  std::unordered_set<std::string> seen_ids;
  for (const CorpusExample& example : corpus) {
    if (example.kind != CorpusExample::Kind::kFull) {
      throw ArgumentError("build_mix input must be all-full; '" + example.id + "' is not");
    }
    validate_example(example);
    if (!seen_ids.insert(example.id).second) {
      throw ManifestError("duplicate corpus id '" + example.id + "'");
    }
  }

  MixManifest manifest;
  manifest.seed = seed;
  manifest.ratio_histogram.assign(kHistogramBins, 0);
  manifest.examples.reserve(corpus.size() * 2);

  std::mt19937_64 rng(seed);
  for (const CorpusExample& example : corpus) {
    double ratio = range.lo + uniform01(rng) * (range.hi - range.lo);
    manifest.examples.push_back(example);
    manifest.examples.push_back(make_partial(example, ratio, range));

    double width = range.hi - range.lo;
    auto bin = width > 0.0 ? static_cast<std::size_t>((ratio - range.lo) / width *
                                                      static_cast<double>(kHistogramBins))
                           : std::size_t{0};
    if (bin >= kHistogramBins) bin = kHistogramBins - 1;
    manifest.ratio_histogram[bin] += 1;
  }
  deterministic_shuffle(manifest.examples, rng);

  manifest.full_count = corpus.size();
  manifest.partial_count = corpus.size();
  return manifest;
}

std::string to_jsonl_line(const CorpusExample& example) {
  json body;
  body["id"] = example.id;
  if (const auto* frames = std::get_if<FrameRef>(&example.source)) {
    body["source"] = json{{"frames", frames->path}, {"count", frames->count}};
  } else {
    body["source"] = json{{"tokens", std::get<TokenSequence>(example.source).tokens}};
  }
  body["target"] = example.target.tokens;
  body["kind"] = example.kind == CorpusExample::Kind::kFull ? "full" : "partial";
  if (example.ratio.has_value()) {
    body["ratio"] = *example.ratio;
  }
  return body.dump();
}

CorpusExample example_from_jsonl_line(const std::string& line) {
  try {
    json body = json::parse(line);
    CorpusExample example;
    example.id = body.at("id").get<std::string>();
    const json& source = body.at("source");
    if (source.contains("tokens")) {
      example.source =
          TokenSequence(source.at("tokens").get<std::vector<std::string>>(), "word");
    } else {
      FrameRef ref;
      ref.path = source.at("frames").get<std::string>();
      ref.count = source.at("count").get<std::uint64_t>();
      example.source = std::move(ref);
    }
    example.target = TokenSequence(body.at("target").get<std::vector<std::string>>(), "word");
    std::string kind = body.value("kind", "full");
    if (kind == "full") {
      example.kind = CorpusExample::Kind::kFull;
    } else if (kind == "partial") {
      example.kind = CorpusExample::Kind::kPartial;
    } else {
      throw ManifestError("unknown example kind '" + kind + "'");
    }
    if (body.contains("ratio")) {
      example.ratio = body.at("ratio").get<double>();
    }
    validate_example(example);
    return example;
  } catch (const json::exception& e) {
    throw ManifestError(std::string("malformed corpus line: ") + e.what());
  }
}

std::vector<CorpusExample> load_corpus_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ManifestError("cannot open corpus file '" + path + "'");
  }
  std::vector<CorpusExample> examples;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    try {
      examples.push_back(example_from_jsonl_line(line));
    } catch (const ManifestError& e) {
      throw ManifestError(path + ":" + std::to_string(line_number) + ": " + e.what());
    }
  }
  return examples;
}

void save_corpus_jsonl(const std::vector<CorpusExample>& examples, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ManifestError("cannot write corpus file '" + path + "'");
  }
  for (const CorpusExample& example : examples) {
    out << to_jsonl_line(example) << '\n';
  }
  if (!out) {
    throw ManifestError("failed writing corpus file '" + path + "'");
  }
}

}  // namespace simulst
