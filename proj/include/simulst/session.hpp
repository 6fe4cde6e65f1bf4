// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "simulst/chunk.hpp"
#include "simulst/decoder.hpp"
#include "simulst/tokens.hpp"

namespace simulst {

/// Tokens irrevocably appended to the displayed output, stamped with the
/// 1-based index of the chunk whose processing produced them. Events kept in
/// a session's commit log always carry at least one token; chunk indices are
/// nondecreasing across the log.
struct CommitEvent {
  TokenSequence tokens;
  std::uint32_t chunk_index = 0;

  bool operator==(const CommitEvent&) const = default;
};

struct SessionConfig {
  double chunk_duration_s = 0.5;
  /// Number of consecutive hypotheses that must share a prefix before that
  /// prefix is committed. Minimum (and default) 2: current plus predecessor.
  std::uint32_t agreement_depth = 2;
  PayloadKind payload_kind = PayloadKind::kFrames;
  std::string tokenizer_tag = "word";
};

/// Per-utterance streaming state machine. Chunks go in, commits come out.
///
/// On each ingested chunk the decoder re-decodes the whole input under the
/// committed prefix; once `agreement_depth` consecutive full hypotheses
/// exist, their longest common prefix becomes the new committed output.
/// Committed text never shrinks, and a hypothesis that fails to extend it is
/// rejected with session state untouched.
///
/// Not thread-safe: operations on one session must be externally serialized.
/// Independent sessions may run concurrently.
class StreamSession {
 public:
  explicit StreamSession(SessionConfig config);

  /// Feeds the next chunk, re-decodes, and applies the agreement rule.
  /// Returns the newly committed tokens, or nullopt when nothing new agreed.
  /// Throws SequencingError on out-of-order chunks or a finished session,
  /// ArgumentError on a duration mismatch, and ContractViolationError when
  /// the decoder breaks the forced-prefix contract (state unchanged).
  std::optional<CommitEvent> ingest_chunk(const Chunk& chunk, IncrementalDecoder& decoder);

  /// Commits the entire remaining suffix of the final hypothesis, stamped
  /// with the final chunk index, and marks the session finished. Returns
  /// nullopt when the committed text already equals the final hypothesis.
  /// Throws EmptySessionError when no chunk was ingested, SequencingError
  /// when the session is already finished.
  std::optional<CommitEvent> finish_stream();

  const SessionConfig& config() const { return config_; }
  std::uint32_t chunks_arrived() const { return static_cast<std::uint32_t>(chunks_.size()); }
  bool finished() const { return finished_; }
  const TokenSequence& committed() const { return committed_; }
  const std::vector<CommitEvent>& commit_log() const { return commit_log_; }
  /// Full hypothesis returned by the decoder on the most recent chunk.
  const std::optional<TokenSequence>& last_hypothesis() const { return last_hypothesis_; }

 private:
  TokenSequence decode_validated(IncrementalDecoder& decoder);

  SessionConfig config_;
  std::vector<Chunk> chunks_;
  TokenSequence committed_;
  /// Sliding window of the last agreement_depth full hypotheses.
  std::deque<TokenSequence> hypothesis_window_;
  std::optional<TokenSequence> last_hypothesis_;
  std::vector<CommitEvent> commit_log_;
  bool finished_ = false;
};

/// One-shot decode of a complete utterance: a single decoder call over all
/// chunks with an empty committed prefix. The whole output is stamped with
/// the last chunk index, which is what makes offline latency equal the full
/// stream duration. Throws EmptySessionError on an empty chunk list.
struct OfflineResult {
  TokenSequence output;
  CommitEvent commit;
};
OfflineResult offline_decode(std::span<const Chunk> chunks, IncrementalDecoder& decoder,
                             const SessionConfig& config);

}  // namespace simulst
