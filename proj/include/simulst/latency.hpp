// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "simulst/session.hpp"

namespace simulst {

/// One displayed token together with the 1-based index of the chunk whose
/// processing emitted it. The token's timestamp is chunk_index multiplied by
/// the chunk duration: output text appears at the end of the chunk that
/// produced it.
struct TokenEmission {
  std::string token;
  std::uint32_t chunk_index = 0;

  bool operator==(const TokenEmission&) const = default;
};

/// Per-token emission schedule of one finished session.
struct LatencyLog {
  std::vector<TokenEmission> emissions;
  double chunk_duration_s = 0.5;
  std::uint32_t total_chunks = 0;
};

/// Expands each commit event into one emission per token. Validates that
/// chunk indices stay within [1, total_chunks] and are nondecreasing.
LatencyLog latency_log_from_commits(std::span<const CommitEvent> commits, double chunk_duration_s,
                                    std::uint32_t total_chunks);

/// Mean emission timestamp over all output tokens, in seconds:
/// (1/T) * sum over tokens of chunk_index * chunk_duration_s.
/// Latency of an empty log is undefined, not zero: throws ArgumentError.
double latency_seconds(const LatencyLog& log);

/// Latency improvement of `system_s` over `baseline_s`: absolute difference
/// in seconds and relative gain in percent (positive = faster than the
/// baseline). Throws ArgumentError unless baseline_s > 0.
struct LatencyDelta {
  double difference_s = 0.0;
  double percent_gain = 0.0;
};
LatencyDelta delta_latency(double system_s, double baseline_s);

}  // namespace simulst
