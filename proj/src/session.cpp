// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/session.hpp"

#include <string>

#include "simulst/errors.hpp"

namespace simulst {

StreamSession::StreamSession(SessionConfig config) : config_(config) {
  if (config_.agreement_depth < 2) {
    throw ArgumentError("agreement_depth must be >= 2");
  }
  if (!(config_.chunk_duration_s > 0.0)) {
    throw ArgumentError("chunk_duration_s must be positive");
  }
  committed_.tokenizer_tag = config_.tokenizer_tag;
}

TokenSequence StreamSession::decode_validated(IncrementalDecoder& decoder) {
  DecodeInput input{config_.payload_kind, std::span<const Chunk>(chunks_)};
  TokenSequence hypothesis = decoder.decode(input, committed_);
  if (hypothesis.tokenizer_tag != config_.tokenizer_tag) {
    throw TokenizerMismatchError("decoder produced tokenizer tag '" + hypothesis.tokenizer_tag +
                                 "', session expects '" + config_.tokenizer_tag + "'");
  }
  if (!starts_with(hypothesis, committed_)) {
    throw ContractViolationError("hypothesis \"" + hypothesis.text() +
                                 "\" does not extend committed prefix \"" + committed_.text() +
                                 "\"");
  }
  return hypothesis;
}

std::optional<CommitEvent> StreamSession::ingest_chunk(const Chunk& chunk,
                                                       IncrementalDecoder& decoder) {
  if (finished_) throw SequencingError("session is finished, no further ingestion accepted");
  if (chunk.index != chunks_arrived() + 1) {
    throw SequencingError("expected chunk index " + std::to_string(chunks_arrived() + 1) +
                          ", got " + std::to_string(chunk.index));
  }
  if (chunk.duration_s != config_.chunk_duration_s) {
    throw ArgumentError("chunk duration mismatch within session");
  }

  chunks_.push_back(chunk);
  TokenSequence hypothesis;
  try {
    hypothesis = decode_validated(decoder);
  } catch (...) {
    chunks_.pop_back();
    throw;
  }

  hypothesis_window_.push_back(hypothesis);
  if (hypothesis_window_.size() > config_.agreement_depth) hypothesis_window_.pop_front();
  last_hypothesis_ = std::move(hypothesis);

  if (hypothesis_window_.size() < config_.agreement_depth) return std::nullopt;

  // Agreement over the last agreement_depth full hypotheses. Every window
  // entry extends the committed prefix, so the LCP does too and the
  // committed text can only grow.
  TokenSequence agreed = hypothesis_window_.front();
  for (std::size_t i = 1; i < hypothesis_window_.size(); ++i) {
    agreed = longest_common_prefix(agreed, hypothesis_window_[i]);
  }

  TokenSequence fresh = suffix_from(agreed, committed_.size());
  committed_ = std::move(agreed);
  if (fresh.empty()) return std::nullopt;

  CommitEvent event{std::move(fresh), chunk.index};
  commit_log_.push_back(event);
  return event;
}

std::optional<CommitEvent> StreamSession::finish_stream() {
  if (finished_) throw SequencingError("finish_stream called on a finished session");
  if (chunks_.empty()) throw EmptySessionError("cannot finish a session with no chunks");

  // Flush the suffix of the hypothesis produced by the last chunk. No
  // re-decode happens here, so the flushed text is exactly what the last
  // ingestion saw even for nondeterministic backends.
  TokenSequence final_hypothesis = *last_hypothesis_;

  finished_ = true;
  TokenSequence remainder = suffix_from(final_hypothesis, committed_.size());
  committed_ = std::move(final_hypothesis);
  if (remainder.empty()) return std::nullopt;

  CommitEvent event{std::move(remainder), chunks_.back().index};
  commit_log_.push_back(event);
  return event;
}

OfflineResult offline_decode(std::span<const Chunk> chunks, IncrementalDecoder& decoder,
                             const SessionConfig& config) {
  if (chunks.empty()) throw EmptySessionError("offline decode requires at least one chunk");

  TokenSequence empty_prefix;
  empty_prefix.tokenizer_tag = config.tokenizer_tag;
  DecodeInput input{config.payload_kind, chunks};
  TokenSequence output = decoder.decode(input, empty_prefix);
  if (output.tokenizer_tag != config.tokenizer_tag) {
    throw TokenizerMismatchError("decoder produced tokenizer tag '" + output.tokenizer_tag +
                                 "', session expects '" + config.tokenizer_tag + "'");
  }

  CommitEvent commit{output, chunks.back().index};
  return OfflineResult{std::move(output), std::move(commit)};
}

}  // namespace simulst
