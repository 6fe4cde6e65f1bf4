// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace simulst {

/// One line of the evaluation report: quality and latency of a system for
/// one direction (or the "Avg." row), with deltas against a baseline when
/// one was supplied. Deltas are baseline minus system: positive delta_bleu
/// is quality lost, positive delta_latency_s is latency saved. A present
/// delta with an absent percent means the percent is undefined (zero
/// baseline), not that it was skipped.
struct ReportRow {
  std::string system;
  std::string direction;
  double bleu = 0.0;
  std::optional<double> delta_bleu;
  std::optional<double> bleu_loss_pct;
  double latency_s = 0.0;
  std::optional<double> delta_latency_s;
  std::optional<double> latency_gain_pct;

  bool operator==(const ReportRow&) const = default;
};

/// Fixed column order, shared by both formats:
/// system, direction, bleu, delta_bleu, bleu_loss_pct, latency_s,
/// delta_latency_s, latency_gain_pct.
///
/// TSV: header line first; scores, deltas and latencies with 2 decimals,
/// percents with 1; absent deltas render as "-", undefined percents as
/// "undefined". JSON: an array of objects with the column names as keys and
/// unrounded numbers; absent and undefined values are null.
std::string report_to_tsv(const std::vector<ReportRow>& rows);
std::string report_to_json(const std::vector<ReportRow>& rows);

}  // namespace simulst
