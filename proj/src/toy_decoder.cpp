// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/toy_decoder.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "simulst/errors.hpp"
#include "simulst/math.hpp"
#include "simulst/tokens.hpp"

namespace simulst {

using nlohmann::json;

const char* to_string(TailGuessMode mode) {
  switch (mode) {
    case TailGuessMode::kOff: return "off";
    case TailGuessMode::kCycling: return "cycling";
    case TailGuessMode::kRandomSeeded: return "random";
  }
  return "off";
}

TailGuessMode tail_guess_mode_from_string(const std::string& s) {
  if (s == "off") return TailGuessMode::kOff;
  if (s == "cycling") return TailGuessMode::kCycling;
  if (s == "random" || s == "random-seeded") return TailGuessMode::kRandomSeeded;
  throw ArgumentError("unknown tail guess mode: " + s);
}

ToyTranslatorSpec ToyTranslatorSpec::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ManifestError(std::string("toy spec is not valid JSON: ") + e.what());
  }
  ToyTranslatorSpec spec;
  try {
    spec.word_map = j.at("word_map").get<std::map<std::string, std::string>>();
    if (j.contains("tail_mode"))
      spec.tail_mode = tail_guess_mode_from_string(j.at("tail_mode").get<std::string>());
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("stability_horizon"))
      spec.stability_horizon = j.at("stability_horizon").get<std::uint32_t>();
    if (j.contains("tokenizer_tag")) spec.tokenizer_tag = j.at("tokenizer_tag").get<std::string>();
  } catch (const json::exception& e) {
    throw ManifestError(std::string("toy spec has unexpected shape: ") + e.what());
  }
  return spec;
}

ToyTranslatorSpec ToyTranslatorSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open toy spec file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ToyTranslatorSpec::to_json_text() const {
  json j;
  j["word_map"] = word_map;
  j["tail_mode"] = to_string(tail_mode);
  j["seed"] = seed;
  j["stability_horizon"] = stability_horizon;
  j["tokenizer_tag"] = tokenizer_tag;
  return j.dump();
}

static const std::string& stable_translation(const ToyTranslatorSpec& spec,
                                             const std::string& token) {
  auto it = spec.word_map.find(token);
  if (it == spec.word_map.end()) {
    throw VocabularyError("source token '" + token + "' is not in the toy vocabulary");
  }
  return it->second;
}

std::string unstable_guess(const ToyTranslatorSpec& spec, const std::string& token,
                           std::uint32_t chunks_seen) {
  switch (spec.tail_mode) {
    case TailGuessMode::kOff:
      return stable_translation(spec, token);
    case TailGuessMode::kCycling:
      // Rotates through three variants so consecutive chunks never agree on
      // an unstable position.
      return stable_translation(spec, token) + "~" + std::to_string(chunks_seen % 3);
    case TailGuessMode::kRandomSeeded: {
      std::uint64_t h = mix64(spec.seed ^ mix64(fnv1a(token) + chunks_seen));
      char buf[8];
      std::snprintf(buf, sizeof buf, "%04x", static_cast<unsigned>(h & 0xffff));
      return stable_translation(spec, token) + "~g" + buf;
    }
  }
  return stable_translation(spec, token);
}

TokenSequence toy_decode(const ToyTranslatorSpec& spec, const DecodeInput& input,
                         const TokenSequence& committed) {
  // Flatten chunk payloads, remembering which chunk each token arrived in.
  std::vector<std::string> source;
  std::vector<std::uint32_t> arrival;
  for (const Chunk& chunk : input.chunks) {
    for (auto& tok : split_tokens(chunk.payload)) {
      source.push_back(std::move(tok));
      arrival.push_back(chunk.index);
    }
  }
  auto chunks_seen = static_cast<std::uint32_t>(input.chunks.size());

  TokenSequence out;
  out.tokenizer_tag = spec.tokenizer_tag;
  out.tokens.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (i < committed.size()) {
      out.tokens.push_back(committed.tokens[i]);
      continue;
    }
    bool stable = spec.tail_mode == TailGuessMode::kOff ||
                  chunks_seen - arrival[i] >= spec.stability_horizon;
    out.tokens.push_back(stable ? stable_translation(spec, source[i])
                                : unstable_guess(spec, source[i], chunks_seen));
  }
  // A committed prefix longer than the source (guesses that agreed twice and
  // were committed) is preserved verbatim.
  for (std::size_t i = source.size(); i < committed.size(); ++i) {
    out.tokens.push_back(committed.tokens[i]);
  }
  return out;
}

DecoderInfo ToyDecoder::info() const {
  return DecoderInfo{.accepts_frames = false,
                     .accepts_tokens = true,
                     .deterministic = true,
                     .concurrent_safe = false};
}

TokenSequence ToyDecoder::decode(const DecodeInput& input, const TokenSequence& committed) {
  if (input.kind != PayloadKind::kTokens) {
    throw ArgumentError("toy decoder accepts token payloads only");
  }
  return toy_decode(spec_, input, committed);
}

}  // namespace simulst
