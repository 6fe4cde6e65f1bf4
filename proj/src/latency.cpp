// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/latency.hpp"

#include <cmath>

#include "simulst/errors.hpp"

namespace simulst {

LatencyLog latency_log_from_commits(std::span<const CommitEvent> commits, double chunk_duration_s,
                                    std::uint32_t total_chunks) {
  if (!(chunk_duration_s > 0.0)) {
    throw ArgumentError("chunk duration must be positive");
  }
  LatencyLog log;
  log.chunk_duration_s = chunk_duration_s;
  log.total_chunks = total_chunks;
  std::uint32_t previous = 1;
  for (const CommitEvent& commit : commits) {
    if (commit.chunk_index < 1 || commit.chunk_index > total_chunks) {
      throw ArgumentError("commit chunk index " + std::to_string(commit.chunk_index) +
                          " outside [1, " + std::to_string(total_chunks) + "]");
    }
    if (commit.chunk_index < previous) {
      throw ArgumentError("commit chunk indices must be nondecreasing");
    }
    previous = commit.chunk_index;
    for (const std::string& token : commit.tokens.tokens) {
      log.emissions.push_back(TokenEmission{token, commit.chunk_index});
    }
  }
  return log;
}

double latency_seconds(const LatencyLog& log) {
  if (log.emissions.empty()) {
    throw ArgumentError("latency is undefined for a session that emitted no tokens");
  }
  double sum = 0.0;
  for (const TokenEmission& emission : log.emissions) {
    sum += static_cast<double>(emission.chunk_index) * log.chunk_duration_s;
  }
  return sum / static_cast<double>(log.emissions.size());
}

LatencyDelta delta_latency(double system_s, double baseline_s) {
  if (!(baseline_s > 0.0)) {
    throw ArgumentError("baseline latency must be positive");
  }
  LatencyDelta delta;
  delta.difference_s = baseline_s - system_s;
  delta.percent_gain = 100.0 * (baseline_s - system_s) / baseline_s;
  return delta;
}

}  // namespace simulst
