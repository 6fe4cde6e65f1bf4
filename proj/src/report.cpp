// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/report.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>

namespace simulst {

using nlohmann::json;

namespace {

std::string fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  return buffer;
}

// "-" = no baseline; "undefined" = baseline present but percent undefined.
std::string optional_fixed(const std::optional<double>& value, int decimals,
                           bool undefined_not_absent) {
  if (value.has_value()) return fixed(*value, decimals);
  return undefined_not_absent ? "undefined" : "-";
}

json optional_json(const std::optional<double>& value) {
  if (value.has_value()) return *value;
  return nullptr;
}

}  // namespace

std::string report_to_tsv(const std::vector<ReportRow>& rows) {
  std::string out =
      "system\tdirection\tbleu\tdelta_bleu\tbleu_loss_pct\tlatency_s\tdelta_latency_s\t"
      "latency_gain_pct\n";
  for (const ReportRow& row : rows) {
    out += row.system;
    out += '\t';
    out += row.direction;
    out += '\t';
    out += fixed(row.bleu, 2);
    out += '\t';
    out += optional_fixed(row.delta_bleu, 2, false);
    out += '\t';
    out += optional_fixed(row.bleu_loss_pct, 1, row.delta_bleu.has_value());
    out += '\t';
    out += fixed(row.latency_s, 2);
    out += '\t';
    out += optional_fixed(row.delta_latency_s, 2, false);
    out += '\t';
    out += optional_fixed(row.latency_gain_pct, 1, row.delta_latency_s.has_value());
    out += '\n';
  }
  return out;
}

std::string report_to_json(const std::vector<ReportRow>& rows) {
  json array = json::array();
  for (const ReportRow& row : rows) {
    json body;
    body["system"] = row.system;
    body["direction"] = row.direction;
    body["bleu"] = row.bleu;
    body["delta_bleu"] = optional_json(row.delta_bleu);
    body["bleu_loss_pct"] = optional_json(row.bleu_loss_pct);
    body["latency_s"] = row.latency_s;
    body["delta_latency_s"] = optional_json(row.delta_latency_s);
    body["latency_gain_pct"] = optional_json(row.latency_gain_pct);
    array.push_back(std::move(body));
  }
  return array.dump(1) + "\n";
}

}  // namespace simulst
