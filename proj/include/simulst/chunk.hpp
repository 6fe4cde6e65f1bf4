// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

namespace simulst {

/// What a chunk payload encodes. Payloads are opaque to the commit policy;
/// only decoders interpret them. Token payloads are UTF-8 text with tokens
/// separated by single spaces, frame payloads are raw bytes.
enum class PayloadKind { kFrames, kTokens };

const char* to_string(PayloadKind kind);
PayloadKind payload_kind_from_string(const std::string& s);

/// A fixed-duration slice of the input stream. Indices are 1-based and
/// strictly consecutive within a session; every chunk of a session carries
/// the same duration.
struct Chunk {
  std::uint32_t index = 0;
  std::string payload;
  double duration_s = 0.5;
};

}  // namespace simulst
