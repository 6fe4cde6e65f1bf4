// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/harness.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "simulst/bleu.hpp"
#include "simulst/errors.hpp"
#include "simulst/latency.hpp"
#include "simulst/net.hpp"

namespace simulst {

using nlohmann::json;

namespace {

EvalUtterance utterance_from_json(const json& body) {
  EvalUtterance utterance;
  utterance.id = body.at("id").get<std::string>();
  utterance.direction = body.at("direction").get<std::string>();
  utterance.reference = body.at("reference").get<std::string>();

  const json& source = body.at("source");
  std::string kind = source.at("kind").get<std::string>();
  if (kind == "chunks") {
    utterance.chunk_payloads = source.at("chunks").get<std::vector<std::string>>();
  } else if (kind == "tokens") {
    utterance.source_tokens = source.at("tokens").get<std::vector<std::string>>();
  } else if (kind == "frames") {
    FrameRef ref;
    ref.path = source.at("path").get<std::string>();
    ref.count = source.value("count", std::uint64_t{0});
    utterance.source_frames = std::move(ref);
  } else {
    throw ManifestError("unknown source kind '" + kind + "'");
  }

  if (body.contains("script")) {
    utterance.script = ScriptTranscript::from_json_text(body.at("script").dump());
  }
  return utterance;
}

// Bytes per frame chunk; frames are single bytes, so this is just the frame
// rate times the chunk length.
std::size_t frame_bytes_per_chunk(const EvalManifest& manifest) {
  double bytes = manifest.frame_rate_hz * manifest.chunk_duration_s;
  auto rounded = static_cast<std::size_t>(std::llround(bytes));
  if (rounded < 1) {
    throw ManifestError("frame_rate_hz x chunk_duration_s must come to at least one frame");
  }
  return rounded;
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ManifestError("cannot open frame file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

/// Materializes the utterance input as chunks and reports the payload kind.
std::vector<Chunk> chunks_for(const EvalUtterance& utterance, const EvalManifest& manifest,
                              PayloadKind& kind_out) {
  std::vector<Chunk> chunks;
  if (!utterance.chunk_payloads.empty()) {
    kind_out = PayloadKind::kTokens;
    for (const std::string& payload : utterance.chunk_payloads) {
      Chunk chunk;
      chunk.index = static_cast<std::uint32_t>(chunks.size() + 1);
      chunk.payload = payload;
      chunk.duration_s = manifest.chunk_duration_s;
      chunks.push_back(std::move(chunk));
    }
  } else if (!utterance.source_tokens.empty()) {
    kind_out = PayloadKind::kTokens;
    for (std::size_t begin = 0; begin < utterance.source_tokens.size();
         begin += manifest.tokens_per_chunk) {
      std::size_t end = std::min(utterance.source_tokens.size(),
                                 begin + static_cast<std::size_t>(manifest.tokens_per_chunk));
      std::string payload;
      for (std::size_t i = begin; i < end; ++i) {
        if (!payload.empty()) payload += ' ';
        payload += utterance.source_tokens[i];
      }
      Chunk chunk;
      chunk.index = static_cast<std::uint32_t>(chunks.size() + 1);
      chunk.payload = std::move(payload);
      chunk.duration_s = manifest.chunk_duration_s;
      chunks.push_back(std::move(chunk));
    }
  } else if (utterance.source_frames.has_value()) {
    kind_out = PayloadKind::kFrames;
    std::string bytes = read_file_bytes(utterance.source_frames->path);
    std::uint64_t wanted = utterance.source_frames->count;
    if (wanted == 0) wanted = bytes.size();
    if (wanted > bytes.size()) {
      throw ManifestError("frame file '" + utterance.source_frames->path + "' holds " +
                          std::to_string(bytes.size()) + " frames, " + std::to_string(wanted) +
                          " requested");
    }
    std::size_t per_chunk = frame_bytes_per_chunk(manifest);
    for (std::size_t begin = 0; begin < wanted; begin += per_chunk) {
      std::size_t end = std::min(static_cast<std::size_t>(wanted), begin + per_chunk);
      Chunk chunk;
      chunk.index = static_cast<std::uint32_t>(chunks.size() + 1);
      chunk.payload = bytes.substr(begin, end - begin);
      chunk.duration_s = manifest.chunk_duration_s;
      chunks.push_back(std::move(chunk));
    }
  } else {
    throw ManifestError("utterance '" + utterance.id + "' has no input payload");
  }
  if (chunks.empty()) {
    throw ManifestError("utterance '" + utterance.id + "' produced no chunks");
  }
  return chunks;
}

struct WorkItem {
  std::size_t utterance_index = 0;
  EvalMode mode = EvalMode::kOffline;
};

EvalRecord evaluate_item(const EvalManifest& manifest, const EvalUtterance& utterance,
                         EvalMode mode, DecoderFactory* factory) {
  EvalRecord record;
  record.id = utterance.id;
  record.direction = utterance.direction;
  record.mode = mode;
  record.reference = utterance.reference;
  record.chunk_duration_s = manifest.chunk_duration_s;
  try {
    PayloadKind kind = PayloadKind::kTokens;
    std::vector<Chunk> chunks = chunks_for(utterance, manifest, kind);
    record.total_chunks = static_cast<std::uint32_t>(chunks.size());

    std::unique_ptr<IncrementalDecoder> decoder;
    if (factory != nullptr) {
      decoder = factory->make();
    } else {
      if (!utterance.script.has_value()) {
        throw ManifestError("utterance '" + utterance.id +
                            "' has no script for the scripted backend");
      }
      decoder = std::make_unique<ScriptedDecoder>(*utterance.script);
    }

    SessionConfig config;
    config.chunk_duration_s = manifest.chunk_duration_s;
    config.agreement_depth = manifest.agreement_depth;
    config.payload_kind = kind;

    auto start = std::chrono::steady_clock::now();
    if (mode == EvalMode::kOffline) {
      OfflineResult result = offline_decode(chunks, *decoder, config);
      record.output_text = result.output.text();
      if (!result.output.empty()) {
        record.commits = {result.commit};
      }
    } else {
      StreamSession session(config);
      for (const Chunk& chunk : chunks) {
        session.ingest_chunk(chunk, *decoder);
      }
      session.finish_stream();
      record.output_text = session.committed().text();
      record.commits = session.commit_log();
    }
    auto end = std::chrono::steady_clock::now();
    record.wall_ms = std::chrono::duration<double, std::milli>(end - start).count();
    record.ok = true;
  } catch (const std::exception& e) {
    record.ok = false;
    record.error = e.what();
    record.output_text.clear();
    record.commits.clear();
  }
  return record;
}

void validate_manifest(const EvalManifest& manifest) {
  if (manifest.utterances.empty()) {
    throw ManifestError("manifest holds no utterances");
  }
  if (!(manifest.chunk_duration_s > 0.0)) {
    throw ManifestError("chunk_duration_s must be positive");
  }
  if (manifest.agreement_depth < 2) {
    throw ManifestError("agreement_depth must be >= 2");
  }
  if (manifest.tokens_per_chunk < 1) {
    throw ManifestError("tokens_per_chunk must be >= 1");
  }
  std::set<std::string> ids;
  for (const EvalUtterance& utterance : manifest.utterances) {
    if (utterance.id.empty()) {
      throw ManifestError("utterance with empty id");
    }
    if (!ids.insert(utterance.id).second) {
      throw ManifestError("duplicate utterance id '" + utterance.id + "'");
    }
  }
}

/// Resolves the backend up front so that configuration and reachability
/// problems abort the run before any utterance is touched. A null result
/// means per-utterance scripted transcripts.
std::shared_ptr<DecoderFactory> resolve_backend(const RunOptions& options) {
  if (options.backend.kind == BackendSpec::Kind::kScripted && options.backend.argument.empty()) {
    return nullptr;
  }
  std::shared_ptr<DecoderFactory> factory =
      make_decoder_factory(options.backend, options.remote_timeout_s);
  if (options.backend.kind == BackendSpec::Kind::kRemote) {
    // Handshake probe: one throwaway connection proves the endpoint accepts.
    net::Socket probe = net::Socket::connect(net::parse_endpoint(options.backend.argument));
    probe.close();
  }
  return factory;
}

std::vector<WorkItem> plan_items(const EvalManifest& manifest, const RunOptions& options) {
  if (!options.run_offline && !options.run_online) {
    throw ArgumentError("no evaluation mode selected");
  }
  std::vector<WorkItem> items;
  for (std::size_t i = 0; i < manifest.utterances.size(); ++i) {
    if (options.run_offline) items.push_back(WorkItem{i, EvalMode::kOffline});
    if (options.run_online) items.push_back(WorkItem{i, EvalMode::kOnline});
  }
  return items;
}

json commit_to_json(const CommitEvent& commit) {
  return json{{"tokens", commit.tokens.tokens}, {"chunk", commit.chunk_index}};
}

CommitEvent commit_from_json(const json& body) {
  CommitEvent commit;
  commit.tokens = TokenSequence(body.at("tokens").get<std::vector<std::string>>(), "word");
  commit.chunk_index = body.at("chunk").get<std::uint32_t>();
  return commit;
}

/// Quality/latency aggregate of one group of successful records.
struct GroupMetrics {
  double bleu = 0.0;
  double latency_s = 0.0;
};

GroupMetrics group_metrics(const std::vector<const EvalRecord*>& records,
                           const ReportOptions& options) {
  std::vector<std::string> outputs;
  std::vector<std::string> references;
  outputs.reserve(records.size());
  references.reserve(records.size());
  double latency_sum = 0.0;
  double pooled_time_sum = 0.0;
  std::uint64_t pooled_tokens = 0;
  for (const EvalRecord* record : records) {
    outputs.push_back(record->output_text);
    references.push_back(record->reference);
    LatencyLog log =
        latency_log_from_commits(record->commits, record->chunk_duration_s, record->total_chunks);
    try {
      latency_sum += latency_seconds(log);
    } catch (const ArgumentError&) {
      throw ArgumentError("utterance '" + record->id +
                          "' emitted no tokens; its latency is undefined");
    }
    for (const TokenEmission& emission : log.emissions) {
      pooled_time_sum += static_cast<double>(emission.chunk_index) * log.chunk_duration_s;
    }
    pooled_tokens += log.emissions.size();
  }
  GroupMetrics metrics;
  metrics.bleu = corpus_bleu(outputs, references);
  metrics.latency_s = options.pooled_latency
                          ? pooled_time_sum / static_cast<double>(pooled_tokens)
                          : latency_sum / static_cast<double>(records.size());
  return metrics;
}

std::optional<double> mean_of_optionals(const std::vector<std::optional<double>>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (const std::optional<double>& value : values) {
    if (!value.has_value()) return std::nullopt;
    sum += *value;
  }
  return sum / static_cast<double>(values.size());
}

}  // namespace

EvalManifest EvalManifest::from_json_text(const std::string& text) {
  try {
    json body = json::parse(text);
    EvalManifest manifest;
    manifest.chunk_duration_s = body.value("chunk_duration_s", 0.5);
    manifest.agreement_depth = body.value("agreement_depth", std::uint32_t{2});
    manifest.tokens_per_chunk = body.value("tokens_per_chunk", std::uint32_t{1});
    manifest.frame_rate_hz = body.value("frame_rate_hz", 100.0);
    if (body.contains("backend")) {
      manifest.backend = body.at("backend").get<std::string>();
    }
    for (const json& entry : body.at("utterances")) {
      manifest.utterances.push_back(utterance_from_json(entry));
    }
    validate_manifest(manifest);
    return manifest;
  } catch (const json::exception& e) {
    throw ManifestError(std::string("malformed eval manifest: ") + e.what());
  }
}

EvalManifest EvalManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ManifestError("cannot open manifest '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return from_json_text(buffer.str());
  } catch (const ManifestError& e) {
    throw ManifestError(path + ": " + e.what());
  }
}

const char* to_string(EvalMode mode) {
  return mode == EvalMode::kOffline ? "offline" : "online";
}

EvalMode eval_mode_from_string(const std::string& s) {
  if (s == "offline") return EvalMode::kOffline;
  if (s == "online") return EvalMode::kOnline;
  throw ArgumentError("unknown eval mode '" + s + "' (expected offline or online)");
}

bool equivalent_ignoring_wall_time(const std::vector<EvalRecord>& a,
                                   const std::vector<EvalRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EvalRecord flattened = b[i];
    flattened.wall_ms = a[i].wall_ms;
    if (!(a[i] == flattened)) return false;
  }
  return true;
}

std::vector<EvalRecord> run_eval_serial(const EvalManifest& manifest, const RunOptions& options) {
  validate_manifest(manifest);
  std::shared_ptr<DecoderFactory> factory = resolve_backend(options);
  std::vector<WorkItem> items = plan_items(manifest, options);
  std::vector<EvalRecord> records(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    records[i] = evaluate_item(manifest, manifest.utterances[items[i].utterance_index],
                               items[i].mode, factory.get());
  }
  return records;
}

std::vector<EvalRecord> run_eval(const EvalManifest& manifest, const RunOptions& options) {
#ifdef _OPENMP
  validate_manifest(manifest);
  std::shared_ptr<DecoderFactory> factory = resolve_backend(options);
  std::vector<WorkItem> items = plan_items(manifest, options);
  std::vector<EvalRecord> records(items.size());
  const auto count = static_cast<std::int64_t>(items.size());
  // evaluate_item catches everything per utterance, so no exception can
  // escape the parallel region.
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    const WorkItem& item = items[static_cast<std::size_t>(i)];
    records[static_cast<std::size_t>(i)] = evaluate_item(
        manifest, manifest.utterances[item.utterance_index], item.mode, factory.get());
  }
  return records;
#else
  return run_eval_serial(manifest, options);
#endif
}

std::string record_to_jsonl_line(const EvalRecord& record) {
  json body;
  body["id"] = record.id;
  body["direction"] = record.direction;
  body["mode"] = to_string(record.mode);
  body["ok"] = record.ok;
  if (!record.ok) {
    body["error"] = record.error;
  }
  body["output"] = record.output_text;
  body["reference"] = record.reference;
  body["chunk_duration_s"] = record.chunk_duration_s;
  body["total_chunks"] = record.total_chunks;
  body["wall_ms"] = record.wall_ms;
  json commits = json::array();
  for (const CommitEvent& commit : record.commits) {
    commits.push_back(commit_to_json(commit));
  }
  body["commits"] = std::move(commits);
  return body.dump();
}

EvalRecord record_from_jsonl_line(const std::string& line) {
  try {
    json body = json::parse(line);
    EvalRecord record;
    record.id = body.at("id").get<std::string>();
    record.direction = body.at("direction").get<std::string>();
    record.mode = eval_mode_from_string(body.at("mode").get<std::string>());
    record.ok = body.at("ok").get<bool>();
    record.error = body.value("error", "");
    record.output_text = body.at("output").get<std::string>();
    record.reference = body.at("reference").get<std::string>();
    record.chunk_duration_s = body.at("chunk_duration_s").get<double>();
    record.total_chunks = body.at("total_chunks").get<std::uint32_t>();
    record.wall_ms = body.at("wall_ms").get<double>();
    for (const json& entry : body.at("commits")) {
      record.commits.push_back(commit_from_json(entry));
    }
    return record;
  } catch (const json::exception& e) {
    throw ManifestError(std::string("malformed eval record: ") + e.what());
  }
}

void save_records_jsonl(const std::vector<EvalRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ManifestError("cannot write records file '" + path + "'");
  }
  for (const EvalRecord& record : records) {
    out << record_to_jsonl_line(record) << '\n';
  }
  if (!out) {
    throw ManifestError("failed writing records file '" + path + "'");
  }
}

std::vector<EvalRecord> load_records_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ManifestError("cannot open records file '" + path + "'");
  }
  std::vector<EvalRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_jsonl_line(line));
    } catch (const ManifestError& e) {
      throw ManifestError(path + ":" + std::to_string(line_number) + ": " + e.what());
    }
  }
  return records;
}

std::vector<ReportRow> build_report(const std::vector<EvalRecord>& system_records,
                                    const std::vector<EvalRecord>* baseline_records,
                                    const ReportOptions& options) {
  auto collect_ok = [](const std::vector<EvalRecord>& records) {
    std::vector<const EvalRecord*> ok;
    for (const EvalRecord& record : records) {
      if (record.ok) ok.push_back(&record);
    }
    return ok;
  };
  std::vector<const EvalRecord*> system_ok = collect_ok(system_records);

  std::vector<const EvalRecord*> baseline_ok;
  if (baseline_records != nullptr) {
    baseline_ok = collect_ok(*baseline_records);
    std::map<std::string, std::string> system_dirs;
    std::map<std::string, std::string> baseline_dirs;
    for (const EvalRecord* record : system_ok) system_dirs[record->id] = record->direction;
    for (const EvalRecord* record : baseline_ok) baseline_dirs[record->id] = record->direction;
    if (system_dirs != baseline_dirs) {
      throw PairingError(
          "system and baseline records do not cover the same utterances (ids or "
          "directions differ)");
    }
  }

  auto group_by_direction = [](const std::vector<const EvalRecord*>& records) {
    std::map<std::string, std::vector<const EvalRecord*>> groups;
    for (const EvalRecord* record : records) {
      groups[record->direction].push_back(record);
    }
    return groups;
  };
  std::map<std::string, std::vector<const EvalRecord*>> system_groups =
      group_by_direction(system_ok);
  std::map<std::string, std::vector<const EvalRecord*>> baseline_groups =
      group_by_direction(baseline_ok);

  std::vector<ReportRow> rows;
  std::vector<double> direction_bleus;
  std::vector<double> direction_latencies;
  std::vector<std::optional<double>> direction_delta_bleus;
  std::vector<std::optional<double>> direction_bleu_losses;
  std::vector<std::optional<double>> direction_delta_latencies;
  std::vector<std::optional<double>> direction_latency_gains;

  for (const auto& [direction, group] : system_groups) {
    GroupMetrics metrics = group_metrics(group, options);
    ReportRow row;
    row.system = options.system_label;
    row.direction = direction;
    row.bleu = metrics.bleu;
    row.latency_s = metrics.latency_s;
    if (baseline_records != nullptr) {
      GroupMetrics base = group_metrics(baseline_groups.at(direction), options);
      BleuDelta quality = delta_bleu(metrics.bleu, base.bleu);
      LatencyDelta speed = delta_latency(metrics.latency_s, base.latency_s);
      row.delta_bleu = quality.difference;
      row.bleu_loss_pct = quality.percent_loss;
      row.delta_latency_s = speed.difference_s;
      row.latency_gain_pct = speed.percent_gain;
    }
    direction_bleus.push_back(row.bleu);
    direction_latencies.push_back(row.latency_s);
    direction_delta_bleus.push_back(row.delta_bleu);
    direction_bleu_losses.push_back(row.bleu_loss_pct);
    direction_delta_latencies.push_back(row.delta_latency_s);
    direction_latency_gains.push_back(row.latency_gain_pct);
    rows.push_back(std::move(row));
  }

  if (rows.empty()) {
    return rows;
  }

  ReportRow average;
  average.system = options.system_label;
  average.direction = "Avg.";
  if (options.utterance_weighted_avg) {
    GroupMetrics metrics = group_metrics(system_ok, options);
    average.bleu = metrics.bleu;
    average.latency_s = metrics.latency_s;
    if (baseline_records != nullptr) {
      GroupMetrics base = group_metrics(baseline_ok, options);
      BleuDelta quality = delta_bleu(metrics.bleu, base.bleu);
      LatencyDelta speed = delta_latency(metrics.latency_s, base.latency_s);
      average.delta_bleu = quality.difference;
      average.bleu_loss_pct = quality.percent_loss;
      average.delta_latency_s = speed.difference_s;
      average.latency_gain_pct = speed.percent_gain;
    }
  } else {
    auto mean = [](const std::vector<double>& values) {
      double sum = 0.0;
      for (double value : values) sum += value;
      return sum / static_cast<double>(values.size());
    };
    average.bleu = mean(direction_bleus);
    average.latency_s = mean(direction_latencies);
    if (baseline_records != nullptr) {
      average.delta_bleu = mean_of_optionals(direction_delta_bleus);
      average.bleu_loss_pct = mean_of_optionals(direction_bleu_losses);
      average.delta_latency_s = mean_of_optionals(direction_delta_latencies);
      average.latency_gain_pct = mean_of_optionals(direction_latency_gains);
    }
  }
  rows.push_back(std::move(average));
  return rows;
}

}  // namespace simulst
