// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/remote_decoder.hpp"

#include <utility>

#include "simulst/errors.hpp"
#include "simulst/tokens.hpp"
#include "simulst/wire.hpp"

namespace simulst {

RemoteDecoder::RemoteDecoder(net::Endpoint endpoint, double timeout_s)
    : endpoint_(std::move(endpoint)),
      timeout_s_(timeout_s),
      socket_(net::Socket::connect(endpoint_)) {
  socket_.set_receive_timeout(timeout_s_);
}

DecoderInfo RemoteDecoder::info() const {
  DecoderInfo info;
  info.accepts_frames = true;
  info.accepts_tokens = true;
  // The far side is a black box; promise nothing.
  info.deterministic = false;
  info.concurrent_safe = false;
  return info;
}

TokenSequence RemoteDecoder::decode(const DecodeInput& input, const TokenSequence& committed) {
  wire::DecodeRequest request;
  request.id = next_id_++;
  request.committed = committed.tokens;
  request.kind = input.kind;
  if (input.kind == PayloadKind::kTokens) {
    for (const Chunk& chunk : input.chunks) {
      for (std::string& token : split_tokens(chunk.payload)) {
        request.tokens.push_back(std::move(token));
      }
    }
  } else {
    for (const Chunk& chunk : input.chunks) {
      request.frame_bytes += chunk.payload;
    }
  }

  socket_.send_line(wire::to_json_line(request));

  std::optional<std::string> line;
  try {
    line = socket_.read_line();
  } catch (const TimeoutError&) {
    throw TimeoutError("decode request to " + net::to_string(endpoint_) + " timed out after " +
                       std::to_string(timeout_s_) + " s");
  }
  if (!line.has_value()) {
    throw TransportError("connection to " + net::to_string(endpoint_) +
                         " closed mid-session");
  }
  wire::DecodeResponse response = wire::response_from_json(*line);
  if (response.id != request.id) {
    throw ProtocolError("response id " + std::to_string(response.id) +
                        " does not match request id " + std::to_string(request.id));
  }
  if (!response.ok) {
    throw ProtocolError("remote decoder at " + net::to_string(endpoint_) +
                        " reported: " + response.error);
  }
  TokenSequence hypothesis(response.hypothesis, committed.tokenizer_tag);
  if (!starts_with(hypothesis, committed)) {
    throw ContractViolationError("remote hypothesis does not extend the committed prefix");
  }
  return hypothesis;
}

}  // namespace simulst
