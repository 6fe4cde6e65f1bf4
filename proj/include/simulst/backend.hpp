// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "simulst/decoder.hpp"
#include "simulst/scripted_decoder.hpp"
#include "simulst/toy_decoder.hpp"

namespace simulst {

/// Parsed backend selector. Accepted spellings:
///   "scripted"             scripts supplied per utterance by the caller
///   "scripted:<path>"      one transcript JSON replayed for every session
///   "toy:<path>"           toy translator spec JSON
///   "remote:<host:port>"   decoder served behind the wire protocol
struct BackendSpec {
  enum class Kind { kScripted, kToy, kRemote };
  Kind kind = Kind::kScripted;
  /// Transcript path, toy spec path, or remote address, depending on kind.
  std::string argument;

  static BackendSpec parse(const std::string& text);
  std::string to_string() const;
};

/// Replays one fixed transcript for every session.
class ScriptedDecoderFactory : public DecoderFactory {
 public:
  explicit ScriptedDecoderFactory(ScriptTranscript transcript)
      : transcript_(std::move(transcript)) {}

  std::unique_ptr<IncrementalDecoder> make() override {
    return std::make_unique<ScriptedDecoder>(transcript_);
  }

 private:
  ScriptTranscript transcript_;
};

class ToyDecoderFactory : public DecoderFactory {
 public:
  explicit ToyDecoderFactory(ToyTranslatorSpec spec) : spec_(std::move(spec)) {}

  std::unique_ptr<IncrementalDecoder> make() override {
    return std::make_unique<ToyDecoder>(spec_);
  }

  const ToyTranslatorSpec& spec() const { return spec_; }

 private:
  ToyTranslatorSpec spec_;
};

/// Factory for the parsed spec. A bare "scripted" selector has no transcript
/// to instantiate and is rejected here (ArgumentError); callers that own
/// per-utterance scripts construct ScriptedDecoder directly instead.
/// File-backed specs load eagerly so that configuration errors surface at
/// startup. `timeout_s` applies to remote backends only.
std::shared_ptr<DecoderFactory> make_decoder_factory(const BackendSpec& spec,
                                                     double timeout_s = 30.0);

}  // namespace simulst
