// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0
//
// Batch evaluation driver. `eval run` chunks every utterance of a manifest,
// drives the commit policy in offline and/or online mode and writes one
// records file per mode; `eval report` aggregates two record sets into the
// direction/Avg. quality-latency table.
//
// Exit codes: 0 success, 2 run finished but some utterances failed, 1 fatal.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "simulst/errors.hpp"
#include "simulst/harness.hpp"

namespace fs = std::filesystem;

namespace {

struct RunArgs {
  std::string manifest_path;
  std::string backend;
  double chunk_duration_s = 0.5;
  std::uint32_t depth = 2;
  std::string mode = "both";
  std::string out_dir;
  double timeout_s = 30.0;
  bool serial = false;
};

struct ReportArgs {
  std::string system_dir;
  std::string baseline_dir;
  std::string format = "tsv";
  std::string system_mode;
  std::string baseline_mode;
  std::string system_label = "system";
  std::string out_path;
  bool weighted_avg = false;
  bool pooled_latency = false;
};

int do_run(const RunArgs& args, bool chunk_set, bool depth_set, bool backend_set) {
  simulst::EvalManifest manifest = simulst::EvalManifest::load(args.manifest_path);
  if (chunk_set) manifest.chunk_duration_s = args.chunk_duration_s;
  if (depth_set) manifest.agreement_depth = args.depth;

  std::string backend_text = backend_set ? args.backend : manifest.backend.value_or("scripted");

  simulst::RunOptions options;
  options.backend = simulst::BackendSpec::parse(backend_text);
  options.remote_timeout_s = args.timeout_s;
  options.run_offline = args.mode == "offline" || args.mode == "both";
  options.run_online = args.mode == "online" || args.mode == "both";
  if (!options.run_offline && !options.run_online) {
    throw simulst::ArgumentError("--mode must be online, offline, or both");
  }

  std::vector<simulst::EvalRecord> records =
      args.serial ? simulst::run_eval_serial(manifest, options)
                  : simulst::run_eval(manifest, options);

  std::size_t failures = 0;
  for (simulst::EvalMode mode : {simulst::EvalMode::kOffline, simulst::EvalMode::kOnline}) {
    if (mode == simulst::EvalMode::kOffline && !options.run_offline) continue;
    if (mode == simulst::EvalMode::kOnline && !options.run_online) continue;

    std::vector<simulst::EvalRecord> subset;
    for (const simulst::EvalRecord& record : records) {
      if (record.mode == mode) subset.push_back(record);
    }
    for (const simulst::EvalRecord& record : subset) {
      if (!record.ok) {
        ++failures;
        std::cerr << "error: " << record.id << " (" << to_string(record.mode)
                  << "): " << record.error << "\n";
      }
    }
    fs::path mode_dir = fs::path(args.out_dir) / to_string(mode);
    fs::create_directories(mode_dir);
    fs::path records_path = mode_dir / "records.jsonl";
    simulst::save_records_jsonl(subset, records_path.string());
    std::cout << to_string(mode) << ": " << subset.size() << " records -> "
              << records_path.string() << "\n";
  }
  if (failures > 0) {
    std::cerr << failures << " utterance(s) failed\n";
    return 2;
  }
  return 0;
}

std::string locate_records(const std::string& dir, const std::string& explicit_mode,
                           const char* preferred_mode) {
  if (!explicit_mode.empty()) {
    fs::path path = fs::path(dir) / explicit_mode / "records.jsonl";
    if (!fs::exists(path)) {
      throw simulst::ManifestError("no records at " + path.string());
    }
    return path.string();
  }
  fs::path direct = fs::path(dir) / "records.jsonl";
  if (fs::exists(direct)) return direct.string();
  fs::path preferred = fs::path(dir) / preferred_mode / "records.jsonl";
  if (fs::exists(preferred)) return preferred.string();
  const char* other = std::string(preferred_mode) == "online" ? "offline" : "online";
  fs::path fallback = fs::path(dir) / other / "records.jsonl";
  if (fs::exists(fallback)) return fallback.string();
  throw simulst::ManifestError("no records.jsonl under '" + dir + "'");
}

int do_report(const ReportArgs& args) {
  // The conventional comparison is the online system against the offline
  // baseline, so that is where each side looks first.
  std::vector<simulst::EvalRecord> system_records =
      simulst::load_records_jsonl(locate_records(args.system_dir, args.system_mode, "online"));
  std::vector<simulst::EvalRecord> baseline_records;
  bool have_baseline = !args.baseline_dir.empty();
  if (have_baseline) {
    baseline_records = simulst::load_records_jsonl(
        locate_records(args.baseline_dir, args.baseline_mode, "offline"));
  }

  simulst::ReportOptions options;
  options.system_label = args.system_label;
  options.utterance_weighted_avg = args.weighted_avg;
  options.pooled_latency = args.pooled_latency;

  std::vector<simulst::ReportRow> rows =
      simulst::build_report(system_records, have_baseline ? &baseline_records : nullptr, options);

  std::string rendered =
      args.format == "json" ? simulst::report_to_json(rows) : simulst::report_to_tsv(rows);
  if (!args.out_path.empty()) {
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) {
      throw simulst::ManifestError("cannot write report to '" + args.out_path + "'");
    }
    out << rendered;
  }
  std::cout << rendered;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chunked simultaneous-translation evaluation harness"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "evaluate a manifest and write records");
  run->add_option("--manifest", run_args.manifest_path, "eval manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  CLI::Option* backend_opt = run->add_option(
      "--backend", run_args.backend, "scripted[:path] | toy:<spec.json> | remote:<host:port>");
  CLI::Option* chunk_opt =
      run->add_option("--chunk", run_args.chunk_duration_s, "chunk duration in seconds");
  CLI::Option* depth_opt = run->add_option("--depth", run_args.depth, "agreement depth (>= 2)");
  run->add_option("--mode", run_args.mode, "online | offline | both")
      ->check(CLI::IsMember({"online", "offline", "both"}))
      ->capture_default_str();
  run->add_option("--out", run_args.out_dir, "output directory")->required();
  run->add_option("--timeout", run_args.timeout_s, "remote decode timeout in seconds")
      ->capture_default_str();
  run->add_flag("--serial", run_args.serial, "disable parallel evaluation");

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand("report", "aggregate records into the report table");
  report->add_option("--system", report_args.system_dir, "system run directory")->required();
  report->add_option("--baseline", report_args.baseline_dir, "baseline run directory");
  report->add_option("--format", report_args.format, "tsv | json")
      ->check(CLI::IsMember({"tsv", "json"}))
      ->capture_default_str();
  report->add_option("--system-mode", report_args.system_mode,
                     "which mode to read from the system directory (online | offline)")
      ->check(CLI::IsMember({"online", "offline"}));
  report->add_option("--baseline-mode", report_args.baseline_mode,
                     "which mode to read from the baseline directory (online | offline)")
      ->check(CLI::IsMember({"online", "offline"}));
  report->add_option("--system-label", report_args.system_label, "label for the system column")
      ->capture_default_str();
  report->add_option("--out", report_args.out_path, "also write the report to this file");
  report->add_flag("--weighted-avg", report_args.weighted_avg,
                   "Avg. row pools all utterances instead of averaging directions");
  report->add_flag("--pooled-latency", report_args.pooled_latency,
                   "per-direction latency pooled over tokens instead of per-utterance mean");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return do_run(run_args, chunk_opt->count() > 0, depth_opt->count() > 0,
                    backend_opt->count() > 0);
    }
    return do_report(report_args);
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
}
