// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "simulst/decoder.hpp"

namespace simulst {

/// How the toy translator fills in translations for source tokens that have
/// not stabilized yet. The unstable modes emulate the flutter of real
/// chunk-level decoding, where recent input lacks future context and its
/// translation keeps changing between re-decodes.
enum class TailGuessMode { kOff, kCycling, kRandomSeeded };

const char* to_string(TailGuessMode mode);
TailGuessMode tail_guess_mode_from_string(const std::string& s);

/// Word-for-word test translator. A source token's translation becomes
/// final (the word-map entry) once the token has been visible for
/// stability_horizon chunks; before that the tail modes produce guesses that
/// change from chunk to chunk. With tail guessing off every token translates
/// through the map immediately and the output for k chunks is always a
/// prefix of the output for k+1.
struct ToyTranslatorSpec {
  std::map<std::string, std::string> word_map;
  TailGuessMode tail_mode = TailGuessMode::kOff;
  std::uint64_t seed = 0;
  std::uint32_t stability_horizon = 1;
  std::string tokenizer_tag = "word";

  static ToyTranslatorSpec from_json_text(const std::string& text);
  static ToyTranslatorSpec load(const std::string& path);
  std::string to_json_text() const;
};

/// The guess emitted for a not-yet-stable `token` when `chunks_seen` chunks
/// have arrived. Deterministic in (spec.seed, token, chunks_seen); exposed
/// so tests can replay the guess schedule independently.
std::string unstable_guess(const ToyTranslatorSpec& spec, const std::string& token,
                           std::uint32_t chunks_seen);

/// Full toy hypothesis for the given chunk payloads. Positions already
/// committed are echoed verbatim (forced decoding), later positions map
/// through the word map once stable or guess until then.
/// Throws VocabularyError on a source token missing from the word map.
TokenSequence toy_decode(const ToyTranslatorSpec& spec, const DecodeInput& input,
                         const TokenSequence& committed);

class ToyDecoder : public IncrementalDecoder {
 public:
  explicit ToyDecoder(ToyTranslatorSpec spec) : spec_(std::move(spec)) {}

  DecoderInfo info() const override;
  TokenSequence decode(const DecodeInput& input, const TokenSequence& committed) override;

  const ToyTranslatorSpec& spec() const { return spec_; }

 private:
  ToyTranslatorSpec spec_;
};

}  // namespace simulst
