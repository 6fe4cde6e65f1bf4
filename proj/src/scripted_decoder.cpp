// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/scripted_decoder.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "simulst/errors.hpp"

namespace simulst {

using nlohmann::json;

void ScriptTranscript::validate() const {
  if (hypotheses.empty()) throw ManifestError("script has no hypotheses");
  // Simulate depth-2 agreement: each hypothesis must extend the prefix
  // committed after its predecessor pair. Deeper agreement depths commit
  // prefixes of the depth-2 one, so this is the strictest check needed.
  TokenSequence committed;
  committed.tokenizer_tag = tokenizer_tag;
  TokenSequence prev;
  prev.tokenizer_tag = tokenizer_tag;
  for (std::size_t k = 0; k < hypotheses.size(); ++k) {
    TokenSequence h;
    try {
      h = TokenSequence(hypotheses[k], tokenizer_tag);
    } catch (const ArgumentError& e) {
      throw ManifestError("script entry " + std::to_string(k + 1) + ": " + e.what());
    }
    if (!starts_with(h, committed)) {
      throw ManifestError("script entry " + std::to_string(k + 1) + " (\"" + h.text() +
                          "\") does not extend the committed prefix \"" + committed.text() +
                          "\" the policy forces at that point");
    }
    if (k > 0) committed = longest_common_prefix(prev, h);
    prev = std::move(h);
  }
}

ScriptTranscript ScriptTranscript::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ManifestError(std::string("script is not valid JSON: ") + e.what());
  }
  ScriptTranscript t;
  try {
    if (j.contains("tokenizer_tag")) t.tokenizer_tag = j.at("tokenizer_tag").get<std::string>();
    t.hypotheses = j.at("hypotheses").get<std::vector<std::vector<std::string>>>();
  } catch (const json::exception& e) {
    throw ManifestError(std::string("script has unexpected shape: ") + e.what());
  }
  t.validate();
  return t;
}

ScriptTranscript ScriptTranscript::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open script file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ScriptTranscript::to_json_text() const {
  json j;
  j["tokenizer_tag"] = tokenizer_tag;
  j["hypotheses"] = hypotheses;
  return j.dump();
}

TokenSequence scripted_decode(const ScriptTranscript& transcript, std::size_t chunks_seen,
                              const TokenSequence& committed) {
  if (chunks_seen == 0 || chunks_seen > transcript.size()) {
    throw ScriptExhaustedError("script has " + std::to_string(transcript.size()) +
                               " entries, no output for chunk count " +
                               std::to_string(chunks_seen));
  }
  TokenSequence h(transcript.hypotheses[chunks_seen - 1], transcript.tokenizer_tag);
  if (!starts_with(h, committed)) {
    throw ContractViolationError("scripted hypothesis \"" + h.text() +
                                 "\" does not extend committed prefix \"" + committed.text() +
                                 "\"");
  }
  return h;
}

ScriptedDecoder::ScriptedDecoder(ScriptTranscript transcript) : transcript_(std::move(transcript)) {
  transcript_.validate();
}

DecoderInfo ScriptedDecoder::info() const {
  return DecoderInfo{.accepts_frames = true,
                     .accepts_tokens = true,
                     .deterministic = true,
                     .concurrent_safe = false};
}

TokenSequence ScriptedDecoder::decode(const DecodeInput& input, const TokenSequence& committed) {
  return scripted_decode(transcript_, input.chunks.size(), committed);
}

}  // namespace simulst
