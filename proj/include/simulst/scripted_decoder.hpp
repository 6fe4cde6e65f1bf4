// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simulst/decoder.hpp"
#include "simulst/tokens.hpp"

namespace simulst {

/// A fixed table of chunk-level decoding outputs: entry k-1 is the full
/// hypothesis the decoder returns once k chunks have arrived. Scripts are
/// validated on construction so that each hypothesis extends every prefix
/// the depth-2 agreement policy can have committed by that point.
struct ScriptTranscript {
  std::string tokenizer_tag = "word";
  std::vector<std::vector<std::string>> hypotheses;

  std::size_t size() const { return hypotheses.size(); }

  /// Throws ManifestError when the script breaks the forced-prefix chain.
  void validate() const;

  static ScriptTranscript from_json_text(const std::string& text);
  static ScriptTranscript load(const std::string& path);
  std::string to_json_text() const;
};

/// Scripted full hypothesis for `chunks_seen` chunks. Throws
/// ScriptExhaustedError past the end of the script and
/// ContractViolationError when the entry does not extend `committed`.
TokenSequence scripted_decode(const ScriptTranscript& transcript, std::size_t chunks_seen,
                              const TokenSequence& committed);

/// Replays a transcript; payload contents are ignored, only the number of
/// chunks seen selects the output. Deterministic, one instance per session.
class ScriptedDecoder : public IncrementalDecoder {
 public:
  explicit ScriptedDecoder(ScriptTranscript transcript);

  DecoderInfo info() const override;
  TokenSequence decode(const DecodeInput& input, const TokenSequence& committed) override;

  const ScriptTranscript& transcript() const { return transcript_; }

 private:
  ScriptTranscript transcript_;
};

}  // namespace simulst
