// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simulst/errors.hpp"
#include "simulst/harness.hpp"
#include "simulst/latency.hpp"
#include "simulst/report.hpp"

#include "test_util.hpp"

using namespace simulst;
using testutil::ts;

namespace {

EvalManifest nature_manifest() {
  return EvalManifest::load(testutil::fixture_path("nature_manifest.json"));
}

RunOptions default_options() {
  RunOptions options;
  options.backend = BackendSpec::parse("scripted");
  return options;
}

const EvalRecord* find_record(const std::vector<EvalRecord>& records, const std::string& id,
                              EvalMode mode) {
  for (const EvalRecord& record : records) {
    if (record.id == id && record.mode == mode) return &record;
  }
  return nullptr;
}

/// A record whose output already equals its reference, emitted at `chunk`.
EvalRecord perfect_record(const std::string& id, const std::string& direction,
                          const std::string& text, std::uint32_t chunk,
                          std::uint32_t total_chunks, EvalMode mode = EvalMode::kOnline) {
  EvalRecord record;
  record.id = id;
  record.direction = direction;
  record.mode = mode;
  record.ok = true;
  record.output_text = text;
  record.reference = text;
  record.commits = {CommitEvent{ts(split_tokens(text)), chunk}};
  record.chunk_duration_s = 0.5;
  record.total_chunks = total_chunks;
  return record;
}

}  // namespace

TEST_CASE("manifest loading keeps chunking and script data") {
  EvalManifest manifest = nature_manifest();
  CHECK(manifest.chunk_duration_s == doctest::Approx(0.5));
  CHECK(manifest.agreement_depth == 2);
  REQUIRE(manifest.utterances.size() == 1);
  const EvalUtterance& utterance = manifest.utterances[0];
  CHECK(utterance.id == "nature");
  CHECK(utterance.direction == "en-de");
  CHECK(utterance.chunk_payloads ==
        std::vector<std::string>{"Nature", "can", "tell", "us"});
  REQUIRE(utterance.script.has_value());
  CHECK(utterance.script->size() == 4);
}

TEST_CASE("manifest validation rejects broken inputs") {
  CHECK_THROWS_AS(EvalManifest::from_json_text("{"), ManifestError);
  CHECK_THROWS_AS(EvalManifest::from_json_text(R"({"utterances": []})"), ManifestError);
  CHECK_THROWS_AS(EvalManifest::from_json_text(R"({
    "utterances": [
      {"id": "a", "direction": "x", "reference": "r",
       "source": {"kind": "chunks", "chunks": ["p"]}},
      {"id": "a", "direction": "x", "reference": "r",
       "source": {"kind": "chunks", "chunks": ["p"]}}
    ]})"),
                  ManifestError);
  CHECK_THROWS_AS(EvalManifest::from_json_text(R"({
    "utterances": [
      {"id": "a", "direction": "x", "reference": "r",
       "source": {"kind": "telepathy"}}
    ]})"),
                  ManifestError);
  CHECK_THROWS_AS(EvalManifest::load("/nonexistent/manifest.json"), ManifestError);
}

TEST_CASE("streaming evaluation reproduces the chunk-by-chunk commit log") {
  std::vector<EvalRecord> records = run_eval_serial(nature_manifest(), default_options());
  REQUIRE(records.size() == 2);

  const EvalRecord* online = find_record(records, "nature", EvalMode::kOnline);
  REQUIRE(online != nullptr);
  CHECK(online->ok);
  CHECK(online->output_text == "Nature can tell us");
  CHECK(online->total_chunks == 4);
  REQUIRE(online->commits.size() == 4);
  CHECK(online->commits[0].tokens == ts({"Nature"}));
  CHECK(online->commits[0].chunk_index == 2);
  CHECK(online->commits[1].tokens == ts({"can"}));
  CHECK(online->commits[1].chunk_index == 3);
  CHECK(online->commits[2].tokens == ts({"tell"}));
  CHECK(online->commits[2].chunk_index == 4);
  CHECK(online->commits[3].tokens == ts({"us"}));
  CHECK(online->commits[3].chunk_index == 4);

  LatencyLog online_log =
      latency_log_from_commits(online->commits, online->chunk_duration_s, online->total_chunks);
  CHECK(latency_seconds(online_log) == doctest::Approx(1.625).epsilon(1e-12));

  const EvalRecord* offline = find_record(records, "nature", EvalMode::kOffline);
  REQUIRE(offline != nullptr);
  CHECK(offline->ok);
  CHECK(offline->output_text == "Nature can tell us");
  REQUIRE(offline->commits.size() == 1);
  CHECK(offline->commits[0].chunk_index == 4);
  LatencyLog offline_log = latency_log_from_commits(offline->commits, offline->chunk_duration_s,
                                                    offline->total_chunks);
  CHECK(latency_seconds(offline_log) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("parallel evaluation equals the serial reference") {
  EvalManifest manifest = nature_manifest();
  // Widen the batch so the parallel loop has real work to split.
  EvalUtterance base = manifest.utterances[0];
  for (int i = 0; i < 40; ++i) {
    EvalUtterance copy = base;
    copy.id = "copy" + std::to_string(i);
    copy.direction = (i % 2 == 0) ? "en-de" : "en-fr";
    manifest.utterances.push_back(copy);
  }
  std::vector<EvalRecord> parallel = run_eval(manifest, default_options());
  std::vector<EvalRecord> serial = run_eval_serial(manifest, default_options());
  CHECK(equivalent_ignoring_wall_time(parallel, serial));
  CHECK(parallel.size() == 82);
}

TEST_CASE("a failing utterance becomes an error record, not a crash") {
  EvalManifest manifest = nature_manifest();
  EvalUtterance broken = manifest.utterances[0];
  broken.id = "broken";
  broken.script.reset();  // scripted backend with nothing to replay
  manifest.utterances.push_back(broken);

  std::vector<EvalRecord> records = run_eval_serial(manifest, default_options());
  REQUIRE(records.size() == 4);
  const EvalRecord* failed = find_record(records, "broken", EvalMode::kOnline);
  REQUIRE(failed != nullptr);
  CHECK_FALSE(failed->ok);
  CHECK_FALSE(failed->error.empty());
  const EvalRecord* good = find_record(records, "nature", EvalMode::kOnline);
  REQUIRE(good != nullptr);
  CHECK(good->ok);
}

TEST_CASE("tokens-per-chunk grouping splits a flat source") {
  EvalManifest manifest;
  manifest.tokens_per_chunk = 2;
  EvalUtterance utterance;
  utterance.id = "grouped";
  utterance.direction = "xx";
  utterance.reference = "A B C D E";
  utterance.source_tokens = {"a", "b", "c", "d", "e"};
  ScriptTranscript script;
  script.hypotheses = {{"A", "B"}, {"A", "B", "C", "D"}, {"A", "B", "C", "D", "E"}};
  utterance.script = script;
  manifest.utterances.push_back(utterance);

  std::vector<EvalRecord> records = run_eval_serial(manifest, default_options());
  const EvalRecord* online = find_record(records, "grouped", EvalMode::kOnline);
  REQUIRE(online != nullptr);
  CHECK(online->ok);
  CHECK(online->total_chunks == 3);  // ceil(5 / 2)
  CHECK(online->output_text == "A B C D E");
}

TEST_CASE("frame sources chunk by the configured frame rate") {
  testutil::TempDir dir;
  std::string frames(230, 'f');
  std::string path = dir.file("audio.frames");
  testutil::write_file(path, frames);

  EvalManifest manifest;
  manifest.frame_rate_hz = 100.0;  // 50 frames per 0.5 s chunk
  EvalUtterance utterance;
  utterance.id = "audio";
  utterance.direction = "xx";
  utterance.reference = "A";
  utterance.source_frames = FrameRef{path, 0};
  ScriptTranscript script;
  script.hypotheses = {{"A"}, {"A"}, {"A"}, {"A"}, {"A"}};
  utterance.script = script;
  manifest.utterances.push_back(utterance);

  std::vector<EvalRecord> records = run_eval_serial(manifest, default_options());
  const EvalRecord* online = find_record(records, "audio", EvalMode::kOnline);
  REQUIRE(online != nullptr);
  CHECK(online->ok);
  CHECK(online->total_chunks == 5);  // 230 frames in 50-frame chunks

  // Asking for more frames than the file holds is a manifest error.
  manifest.utterances[0].source_frames = FrameRef{path, 999};
  std::vector<EvalRecord> overrun = run_eval_serial(manifest, default_options());
  CHECK_FALSE(overrun[0].ok);
}

TEST_CASE("records survive the JSONL round trip") {
  std::vector<EvalRecord> records = run_eval_serial(nature_manifest(), default_options());
  testutil::TempDir dir;
  std::string path = dir.file("records.jsonl");
  save_records_jsonl(records, path);
  std::vector<EvalRecord> loaded = load_records_jsonl(path);
  CHECK(equivalent_ignoring_wall_time(loaded, records));

  EvalRecord error_record;
  error_record.id = "bad";
  error_record.direction = "xx";
  error_record.mode = EvalMode::kOffline;
  error_record.ok = false;
  error_record.error = "decoder exploded";
  EvalRecord parsed = record_from_jsonl_line(record_to_jsonl_line(error_record));
  CHECK(parsed == error_record);

  CHECK_THROWS_AS(record_from_jsonl_line("{oops"), ManifestError);
  CHECK_THROWS_AS(load_records_jsonl(dir.file("absent.jsonl")), ManifestError);
}

TEST_CASE("identical system and baseline report all-zero deltas") {
  std::vector<EvalRecord> records = {perfect_record("u1", "en-de", "guten tag welt heute", 2, 4),
                                     perfect_record("u2", "en-fr", "bonjour tout le monde", 3, 4)};
  std::vector<ReportRow> rows = build_report(records, &records);
  REQUIRE(rows.size() == 3);  // two directions plus the average row
  for (const ReportRow& row : rows) {
    REQUIRE(row.delta_bleu.has_value());
    REQUIRE(row.delta_latency_s.has_value());
    CHECK(std::abs(*row.delta_bleu) < 1e-12);
    CHECK(std::abs(*row.delta_latency_s) < 1e-12);
    REQUIRE(row.bleu_loss_pct.has_value());
    REQUIRE(row.latency_gain_pct.has_value());
    CHECK(std::abs(*row.bleu_loss_pct) < 1e-12);
    CHECK(std::abs(*row.latency_gain_pct) < 1e-12);
  }
  CHECK(rows.back().direction == "Avg.");
}

TEST_CASE("the average row is the unweighted mean of the direction rows") {
  // Two directions with deliberately unbalanced utterance counts: the
  // average row must still weight the directions equally.
  std::vector<EvalRecord> system = {
      perfect_record("a1", "en-de", "alpha beta gamma delta", 2, 4),
      perfect_record("a2", "en-de", "epsilon zeta eta theta", 4, 4),
      perfect_record("a3", "en-de", "iota kappa lambda mu", 3, 4),
      perfect_record("b1", "en-fr", "nu xi omicron pi", 1, 2)};
  // Baseline: same references, later emissions, one garbled output.
  std::vector<EvalRecord> baseline = system;
  for (EvalRecord& record : baseline) {
    record.commits.back().chunk_index = record.total_chunks;
  }
  baseline[2].output_text = "iota kappa wrong words";
  baseline[2].commits = {CommitEvent{ts(split_tokens(baseline[2].output_text)), 4}};

  std::vector<ReportRow> rows = build_report(system, &baseline);
  REQUIRE(rows.size() == 3);
  const ReportRow& de = rows[0];
  const ReportRow& fr = rows[1];
  const ReportRow& avg = rows[2];
  CHECK(de.direction == "en-de");
  CHECK(fr.direction == "en-fr");
  CHECK(avg.direction == "Avg.");

  CHECK(avg.bleu == doctest::Approx((de.bleu + fr.bleu) / 2).epsilon(1e-12));
  CHECK(avg.latency_s == doctest::Approx((de.latency_s + fr.latency_s) / 2).epsilon(1e-12));
  CHECK(*avg.delta_bleu ==
        doctest::Approx((*de.delta_bleu + *fr.delta_bleu) / 2).epsilon(1e-12));
  CHECK(*avg.bleu_loss_pct ==
        doctest::Approx((*de.bleu_loss_pct + *fr.bleu_loss_pct) / 2).epsilon(1e-12));
  CHECK(*avg.delta_latency_s ==
        doctest::Approx((*de.delta_latency_s + *fr.delta_latency_s) / 2).epsilon(1e-12));
  CHECK(*avg.latency_gain_pct ==
        doctest::Approx((*de.latency_gain_pct + *fr.latency_gain_pct) / 2).epsilon(1e-12));

  // Baseline got slower, system got faster: gains must be positive.
  CHECK(*de.delta_latency_s > 0.0);
  CHECK(*de.latency_gain_pct > 0.0);
  // The garbled baseline sentence means the system gained quality in en-de.
  CHECK(*de.delta_bleu < 0.0);
}

TEST_CASE("report generation is deterministic") {
  std::vector<EvalRecord> records = {perfect_record("u1", "en-de", "eins zwei drei", 2, 3),
                                     perfect_record("u2", "en-fr", "un deux trois", 1, 3)};
  std::vector<ReportRow> once = build_report(records, &records);
  std::vector<ReportRow> twice = build_report(records, &records);
  CHECK(once == twice);
  CHECK(report_to_tsv(once) == report_to_tsv(twice));
}

TEST_CASE("system and baseline must cover the same successful utterances") {
  std::vector<EvalRecord> system = {perfect_record("u1", "en-de", "wort eins", 2, 3),
                                    perfect_record("u2", "en-de", "wort zwei", 2, 3)};
  std::vector<EvalRecord> baseline = {perfect_record("u1", "en-de", "wort eins", 3, 3)};
  CHECK_THROWS_AS(build_report(system, &baseline), PairingError);

  // A shared failure is excluded from both sides and pairing succeeds.
  EvalRecord failed;
  failed.id = "u2";
  failed.direction = "en-de";
  failed.ok = false;
  failed.error = "boom";
  std::vector<EvalRecord> baseline_with_failure = baseline;
  baseline_with_failure.push_back(failed);
  std::vector<EvalRecord> system_with_failure = {system[0], failed};
  CHECK_NOTHROW(build_report(system_with_failure, &baseline_with_failure));
}

TEST_CASE("a successful record without emissions has undefined latency") {
  EvalRecord silent;
  silent.id = "mute";
  silent.direction = "en-de";
  silent.ok = true;
  silent.output_text = "";
  silent.reference = "something";
  silent.chunk_duration_s = 0.5;
  silent.total_chunks = 3;
  std::vector<EvalRecord> records = {silent};
  CHECK_THROWS_AS(build_report(records, nullptr), ArgumentError);
  try {
    build_report(records, nullptr);
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("mute") != std::string::npos);
  }
}

TEST_CASE("without a baseline the delta columns stay empty") {
  std::vector<EvalRecord> records = {perfect_record("u1", "en-de", "nur system", 2, 3)};
  std::vector<ReportRow> rows = build_report(records, nullptr);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].delta_bleu.has_value());
  CHECK_FALSE(rows[0].delta_latency_s.has_value());
  CHECK_FALSE(rows[0].bleu_loss_pct.has_value());
  CHECK_FALSE(rows[0].latency_gain_pct.has_value());
  std::string tsv = report_to_tsv(rows);
  CHECK(tsv.find("\t-\t") != std::string::npos);
}

TEST_CASE("pooled and utterance-weighted aggregation are available") {
  std::vector<EvalRecord> records = {
      perfect_record("u1", "en-de", "ein zwei drei vier", 2, 4),
      perfect_record("u2", "en-de", "token", 4, 4),
      perfect_record("u3", "en-fr", "mot", 1, 2)};

  ReportOptions pooled;
  pooled.pooled_latency = true;
  std::vector<ReportRow> pooled_rows = build_report(records, nullptr, pooled);
  // en-de pooled: 4 tokens at chunk 2 and 1 token at chunk 4 over 5 tokens.
  CHECK(pooled_rows[0].latency_s ==
        doctest::Approx((4 * 2 + 1 * 4) * 0.5 / 5).epsilon(1e-12));

  ReportOptions plain;
  std::vector<ReportRow> mean_rows = build_report(records, nullptr, plain);
  // en-de mean of per-utterance latencies: (1.0 + 2.0) / 2.
  CHECK(mean_rows[0].latency_s == doctest::Approx(1.5).epsilon(1e-12));

  ReportOptions weighted;
  weighted.utterance_weighted_avg = true;
  std::vector<ReportRow> weighted_rows = build_report(records, nullptr, weighted);
  const ReportRow& avg = weighted_rows.back();
  REQUIRE(avg.direction == "Avg.");
  // Utterance-weighted average latency pools all three utterances equally.
  CHECK(avg.latency_s == doctest::Approx((1.0 + 2.0 + 0.5) / 3).epsilon(1e-12));
}

TEST_CASE("mode labels parse and print") {
  CHECK(eval_mode_from_string("online") == EvalMode::kOnline);
  CHECK(eval_mode_from_string("offline") == EvalMode::kOffline);
  CHECK(std::string(to_string(EvalMode::kOnline)) == "online");
  CHECK(std::string(to_string(EvalMode::kOffline)) == "offline");
  CHECK_THROWS_AS(eval_mode_from_string("sideways"), ArgumentError);
}
