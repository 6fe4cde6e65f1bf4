// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/chunk.hpp"

#include "simulst/errors.hpp"

namespace simulst {

const char* to_string(PayloadKind kind) {
  return kind == PayloadKind::kFrames ? "frames" : "tokens";
}

PayloadKind payload_kind_from_string(const std::string& s) {
  if (s == "frames") return PayloadKind::kFrames;
  if (s == "tokens") return PayloadKind::kTokens;
  throw ArgumentError("unknown payload kind: " + s);
}

}  // namespace simulst
