// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>

#include "simulst/chunk.hpp"
#include "simulst/tokens.hpp"

namespace simulst {

/// Capability descriptor for a decoder backend.
struct DecoderInfo {
  bool accepts_frames = false;
  bool accepts_tokens = false;
  bool deterministic = false;
  /// Whether one instance may serve several sessions concurrently.
  /// Backends that are not must be instantiated per session.
  bool concurrent_safe = false;
};

/// Everything the backend sees on one call: the kind of the payloads and
/// every chunk received so far, oldest first. Decoders are stateless across
/// calls by contract; the full input is re-presented each time.
struct DecodeInput {
  PayloadKind kind = PayloadKind::kTokens;
  std::span<const Chunk> chunks;
};

/// Incremental decoder contract: decode() returns a full hypothesis for the
/// input seen so far that starts with `committed` (forced decoding). Callers
/// reject any hypothesis violating that prefix before touching session state.
class IncrementalDecoder {
 public:
  virtual ~IncrementalDecoder() = default;

  virtual DecoderInfo info() const = 0;
  virtual TokenSequence decode(const DecodeInput& input, const TokenSequence& committed) = 0;
};

/// Produces one decoder instance per session for backends that are not
/// concurrent-safe.
class DecoderFactory {
 public:
  virtual ~DecoderFactory() = default;

  virtual std::unique_ptr<IncrementalDecoder> make() = 0;
};

}  // namespace simulst
