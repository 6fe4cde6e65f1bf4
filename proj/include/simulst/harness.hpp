// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simulst/backend.hpp"
#include "simulst/corpus.hpp"
#include "simulst/report.hpp"
#include "simulst/scripted_decoder.hpp"
#include "simulst/session.hpp"

namespace simulst {

/// One utterance to evaluate. The input arrives in exactly one of three
/// forms: explicit per-chunk token payloads, a flat token list chunked by
/// the manifest's tokens_per_chunk, or an audio frame file chunked by the
/// manifest's frame rate. Scripted backends take their transcript from the
/// per-utterance script when present.
struct EvalUtterance {
  std::string id;
  std::string direction;
  std::string reference;
  std::vector<std::string> chunk_payloads;
  std::vector<std::string> source_tokens;
  std::optional<FrameRef> source_frames;
  std::optional<ScriptTranscript> script;
};

/// A batch evaluation: shared chunking/agreement settings plus utterances.
struct EvalManifest {
  double chunk_duration_s = 0.5;
  std::uint32_t agreement_depth = 2;
  std::uint32_t tokens_per_chunk = 1;
  double frame_rate_hz = 100.0;
  /// Default backend selector; the CLI --backend flag overrides it.
  std::optional<std::string> backend;
  std::vector<EvalUtterance> utterances;

  static EvalManifest from_json_text(const std::string& text);
  static EvalManifest load(const std::string& path);
};

enum class EvalMode { kOffline, kOnline };
const char* to_string(EvalMode mode);
EvalMode eval_mode_from_string(const std::string& s);

/// Result of one utterance in one mode. Failed utterances become records
/// with ok=false and the diagnostic in `error`; they never abort the run.
/// Wall time is bookkeeping only and never enters the latency metric.
struct EvalRecord {
  std::string id;
  std::string direction;
  EvalMode mode = EvalMode::kOnline;
  bool ok = false;
  std::string error;
  std::string output_text;
  std::string reference;
  std::vector<CommitEvent> commits;
  double chunk_duration_s = 0.5;
  std::uint32_t total_chunks = 0;
  double wall_ms = 0.0;

  bool operator==(const EvalRecord&) const = default;
};

/// True when the records differ at most in measured wall time (the
/// equivalence the parallel evaluation path is held to).
bool equivalent_ignoring_wall_time(const std::vector<EvalRecord>& a,
                                   const std::vector<EvalRecord>& b);

struct RunOptions {
  bool run_offline = true;
  bool run_online = true;
  BackendSpec backend;
  double remote_timeout_s = 30.0;
};

/// Evaluates every utterance in every selected mode. Records come back in
/// manifest order, offline before online per utterance. Backend
/// configuration problems (unloadable spec, unreachable remote) abort the
/// run by throwing; per-utterance failures come back as error records.
/// The plain entry point evaluates utterances concurrently when OpenMP is
/// available; the _serial variant is the reference implementation.
std::vector<EvalRecord> run_eval(const EvalManifest& manifest, const RunOptions& options);
std::vector<EvalRecord> run_eval_serial(const EvalManifest& manifest, const RunOptions& options);

/// Record persistence: JSON Lines, one record per line.
std::string record_to_jsonl_line(const EvalRecord& record);
EvalRecord record_from_jsonl_line(const std::string& line);
void save_records_jsonl(const std::vector<EvalRecord>& records, const std::string& path);
std::vector<EvalRecord> load_records_jsonl(const std::string& path);

struct ReportOptions {
  std::string system_label = "system";
  /// "Avg." row: unweighted mean of the per-direction rows (default), or a
  /// pooled computation over all utterances regardless of direction.
  bool utterance_weighted_avg = false;
  /// Per-direction latency: mean of per-utterance latencies (default), or
  /// pooled over all emitted tokens of the direction.
  bool pooled_latency = false;
};

/// Groups records by direction and computes quality (corpus BLEU against
/// the stored references) and mean latency per direction, then appends the
/// "Avg." row. With a baseline, each row gains delta and percent columns;
/// system and baseline must cover identical sets of successful utterance
/// ids (PairingError otherwise). Error records are excluded from metrics.
std::vector<ReportRow> build_report(const std::vector<EvalRecord>& system_records,
                                    const std::vector<EvalRecord>* baseline_records,
                                    const ReportOptions& options = ReportOptions{});

}  // namespace simulst
