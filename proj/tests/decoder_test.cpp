// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "simulst/backend.hpp"
#include "simulst/errors.hpp"
#include "simulst/net.hpp"
#include "simulst/remote_decoder.hpp"
#include "simulst/scripted_decoder.hpp"
#include "simulst/session.hpp"
#include "simulst/toy_decoder.hpp"
#include "simulst/wire.hpp"

#include "test_util.hpp"

using namespace simulst;
using testutil::ts;

namespace {

Chunk make_chunk(std::uint32_t index, std::string payload, double duration_s = 0.5) {
  Chunk chunk;
  chunk.index = index;
  chunk.payload = std::move(payload);
  chunk.duration_s = duration_s;
  return chunk;
}

ScriptTranscript nature_script() {
  return ScriptTranscript::load(testutil::fixture_path("nature_script.json"));
}

std::vector<Chunk> token_chunks(const std::vector<std::string>& payloads) {
  std::vector<Chunk> chunks;
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    chunks.push_back(make_chunk(static_cast<std::uint32_t>(i + 1), payloads[i]));
  }
  return chunks;
}

ToyTranslatorSpec basic_toy() {
  ToyTranslatorSpec spec;
  spec.word_map = {{"a", "A"}, {"b", "B"}, {"c", "C"}};
  return spec;
}

/// Serves hypotheses that never extend the committed prefix.
class RogueFactory : public DecoderFactory {
  class Rogue : public IncrementalDecoder {
   public:
    DecoderInfo info() const override {
      return DecoderInfo{.accepts_frames = false,
                         .accepts_tokens = true,
                         .deterministic = true,
                         .concurrent_safe = true};
    }
    TokenSequence decode(const DecodeInput&, const TokenSequence&) override {
      return ts({"rogue"});
    }
  };

 public:
  std::unique_ptr<IncrementalDecoder> make() override { return std::make_unique<Rogue>(); }
};

std::vector<CommitEvent> run_session(IncrementalDecoder& decoder,
                                     const std::vector<std::string>& payloads) {
  SessionConfig config;
  config.payload_kind = PayloadKind::kTokens;
  StreamSession session(config);
  for (const Chunk& chunk : token_chunks(payloads)) {
    session.ingest_chunk(chunk, decoder);
  }
  session.finish_stream();
  return session.commit_log();
}

}  // namespace

TEST_CASE("script fixture loads and validates") {
  ScriptTranscript script = nature_script();
  CHECK(script.size() == 4);
  CHECK(script.tokenizer_tag == "word");
  CHECK_NOTHROW(script.validate());
}

TEST_CASE("scripted hypotheses follow the transcript") {
  ScriptTranscript script = nature_script();
  CHECK(scripted_decode(script, 1, ts({})).text() == "Nature canned");
  CHECK(scripted_decode(script, 2, ts({})).text() == "Nature can not");
  CHECK(scripted_decode(script, 4, ts({"Nature", "can"})).text() == "Nature can tell us");
}

TEST_CASE("scripted decoding exhausts past the final entry") {
  ScriptTranscript script = nature_script();
  CHECK_THROWS_AS(scripted_decode(script, 5, ts({})), ScriptExhaustedError);
  CHECK_THROWS_AS(scripted_decode(script, 0, ts({})), ScriptExhaustedError);
}

TEST_CASE("scripted decoding rejects prefixes the script cannot extend") {
  ScriptTranscript script = nature_script();
  CHECK_THROWS_AS(scripted_decode(script, 2, ts({"Wrong"})), ContractViolationError);
}

TEST_CASE("scripts that break the forced-prefix chain fail validation") {
  ScriptTranscript script;
  // After entries 1 and 2 the committed prefix is "a"; entry 3 drops it.
  script.hypotheses = {{"a", "b"}, {"a", "c"}, {"x"}};
  CHECK_THROWS_AS(script.validate(), ManifestError);

  CHECK_THROWS_AS(ScriptTranscript::from_json_text(
                      R"({"hypotheses": [["a","b"],["a","c"],["x"]]})"),
                  ManifestError);
  CHECK_THROWS_AS(ScriptTranscript::from_json_text("not json"), ManifestError);
  CHECK_THROWS_AS(ScriptTranscript::from_json_text(R"({"hypotheses": []})"), ManifestError);
}

TEST_CASE("script JSON round-trips") {
  ScriptTranscript script = nature_script();
  ScriptTranscript again = ScriptTranscript::from_json_text(script.to_json_text());
  CHECK(again.hypotheses == script.hypotheses);
  CHECK(again.tokenizer_tag == script.tokenizer_tag);
}

TEST_CASE("toy translation maps stabilized tokens through the word map") {
  ToyTranslatorSpec spec = basic_toy();
  DecodeInput input{PayloadKind::kTokens, {}};
  std::vector<Chunk> chunks = token_chunks({"a b"});
  input.chunks = chunks;
  CHECK(toy_decode(spec, input, ts({})) == ts({"A", "B"}));
}

TEST_CASE("toy translation of no input is empty") {
  ToyTranslatorSpec spec = basic_toy();
  DecodeInput input{PayloadKind::kTokens, {}};
  CHECK(toy_decode(spec, input, ts({})).empty());
}

TEST_CASE("toy tail guesses settle after the stability horizon") {
  ToyTranslatorSpec spec = basic_toy();
  spec.tail_mode = TailGuessMode::kRandomSeeded;
  spec.seed = 9;
  spec.stability_horizon = 1;

  // Two chunks seen, "b" arrived with chunk 2: still a guess.
  std::vector<Chunk> two = token_chunks({"a", "b"});
  DecodeInput input{PayloadKind::kTokens, two};
  TokenSequence at_two = toy_decode(spec, input, ts({}));
  REQUIRE(at_two.size() == 2);
  CHECK(at_two.tokens[0] == "A");
  CHECK(at_two.tokens[1] == unstable_guess(spec, "b", 2));
  CHECK(at_two.tokens[1] != "B");

  // One more chunk and the guess settles to the word-map entry.
  std::vector<Chunk> three = token_chunks({"a", "b", ""});
  input.chunks = three;
  CHECK(toy_decode(spec, input, ts({})) == ts({"A", "B"}));
}

TEST_CASE("cycling tail guesses differ between consecutive chunks") {
  ToyTranslatorSpec spec = basic_toy();
  spec.tail_mode = TailGuessMode::kCycling;
  for (std::uint32_t chunks_seen = 1; chunks_seen < 8; ++chunks_seen) {
    CHECK(unstable_guess(spec, "a", chunks_seen) != unstable_guess(spec, "a", chunks_seen + 1));
  }
}

TEST_CASE("toy translation rejects out-of-vocabulary tokens") {
  ToyTranslatorSpec spec = basic_toy();
  std::vector<Chunk> chunks = token_chunks({"a z"});
  DecodeInput input{PayloadKind::kTokens, chunks};
  CHECK_THROWS_AS(toy_decode(spec, input, ts({})), VocabularyError);
}

TEST_CASE("toy outputs are prefix-monotone when tail guessing is off") {
  ToyTranslatorSpec spec = basic_toy();
  std::vector<Chunk> chunks = token_chunks({"a", "b c", "a", "c"});
  for (std::size_t k = 1; k < chunks.size(); ++k) {
    DecodeInput shorter{PayloadKind::kTokens,
                        std::span<const Chunk>(chunks.data(), k)};
    DecodeInput longer{PayloadKind::kTokens,
                       std::span<const Chunk>(chunks.data(), k + 1)};
    CHECK(starts_with(toy_decode(spec, longer, ts({})), toy_decode(spec, shorter, ts({}))));
  }
}

TEST_CASE("with stable tails the policy trails the toy output by one chunk") {
  // Depth-2 agreement over prefix-monotone hypotheses commits, after chunk
  // t, exactly the hypothesis of chunk t-1. Brute force over 50 chunks of
  // one token each.
  ToyTranslatorSpec spec;
  std::vector<std::string> payloads;
  for (int i = 0; i < 50; ++i) {
    std::string word = "w" + std::to_string(i);
    spec.word_map[word] = "W" + std::to_string(i);
    payloads.push_back(word);
  }
  ToyDecoder decoder(spec);

  SessionConfig config;
  config.payload_kind = PayloadKind::kTokens;
  StreamSession session(config);
  std::vector<Chunk> chunks = token_chunks(payloads);
  for (std::size_t t = 0; t < chunks.size(); ++t) {
    session.ingest_chunk(chunks[t], decoder);
    if (t == 0) {
      CHECK(session.committed().empty());
      continue;
    }
    DecodeInput prior{PayloadKind::kTokens, std::span<const Chunk>(chunks.data(), t)};
    CHECK(session.committed() == toy_decode(spec, prior, ts({})));
  }
}

TEST_CASE("toy spec JSON round-trips") {
  ToyTranslatorSpec spec = basic_toy();
  spec.tail_mode = TailGuessMode::kRandomSeeded;
  spec.seed = 1234;
  spec.stability_horizon = 3;
  ToyTranslatorSpec again = ToyTranslatorSpec::from_json_text(spec.to_json_text());
  CHECK(again.word_map == spec.word_map);
  CHECK(again.tail_mode == spec.tail_mode);
  CHECK(again.seed == spec.seed);
  CHECK(again.stability_horizon == spec.stability_horizon);
  CHECK_THROWS_AS(ToyTranslatorSpec::from_json_text("nope"), ManifestError);
  CHECK_THROWS_AS(ToyTranslatorSpec::from_json_text("{}"), ManifestError);
}

TEST_CASE("backend selectors parse and print") {
  BackendSpec scripted = BackendSpec::parse("scripted");
  CHECK(scripted.kind == BackendSpec::Kind::kScripted);
  CHECK(scripted.argument.empty());

  BackendSpec scripted_file = BackendSpec::parse("scripted:/tmp/x.json");
  CHECK(scripted_file.kind == BackendSpec::Kind::kScripted);
  CHECK(scripted_file.argument == "/tmp/x.json");

  BackendSpec toy = BackendSpec::parse("toy:/tmp/spec.json");
  CHECK(toy.kind == BackendSpec::Kind::kToy);

  BackendSpec remote = BackendSpec::parse("remote:127.0.0.1:9100");
  CHECK(remote.kind == BackendSpec::Kind::kRemote);
  CHECK(remote.argument == "127.0.0.1:9100");
  CHECK(remote.to_string() == "remote:127.0.0.1:9100");

  CHECK_THROWS_AS(BackendSpec::parse("toy"), ArgumentError);
  CHECK_THROWS_AS(BackendSpec::parse("remote:"), ArgumentError);
  CHECK_THROWS_AS(BackendSpec::parse("quantum:foo"), ArgumentError);
}

TEST_CASE("a bare scripted selector has nothing to instantiate") {
  CHECK_THROWS_AS(make_decoder_factory(BackendSpec::parse("scripted")), ArgumentError);
}

TEST_CASE("decode requests and responses survive the wire encoding") {
  wire::DecodeRequest request;
  request.id = 42;
  request.committed = {"Nature", "can"};
  request.kind = PayloadKind::kTokens;
  request.tokens = {"Nature", "can", "tell", "us"};
  wire::DecodeRequest parsed = wire::request_from_json(wire::to_json_line(request));
  CHECK(parsed.id == 42);
  CHECK(parsed.committed == request.committed);
  CHECK(parsed.kind == PayloadKind::kTokens);
  CHECK(parsed.tokens == request.tokens);

  wire::DecodeRequest frames;
  frames.id = 7;
  frames.kind = PayloadKind::kFrames;
  frames.frame_bytes = std::string("\x00\x01\xff\x7f", 4);
  wire::DecodeRequest frames_parsed = wire::request_from_json(wire::to_json_line(frames));
  CHECK(frames_parsed.frame_bytes == frames.frame_bytes);
  CHECK(frames_parsed.kind == PayloadKind::kFrames);

  wire::DecodeResponse ok;
  ok.id = 42;
  ok.ok = true;
  ok.hypothesis = {"Nature", "can", "tell", "us"};
  wire::DecodeResponse ok_parsed = wire::response_from_json(wire::to_json_line(ok));
  CHECK(ok_parsed.ok);
  CHECK(ok_parsed.hypothesis == ok.hypothesis);

  wire::DecodeResponse err;
  err.id = 43;
  err.ok = false;
  err.error = "script has 4 entries";
  wire::DecodeResponse err_parsed = wire::response_from_json(wire::to_json_line(err));
  CHECK_FALSE(err_parsed.ok);
  CHECK(err_parsed.error == err.error);

  CHECK_THROWS_AS(wire::request_from_json("{"), ProtocolError);
  CHECK_THROWS_AS(wire::response_from_json(R"({"id": 1})"), ProtocolError);
}

TEST_CASE("regrouping a flat request restores the chunk sequence") {
  wire::DecodeRequest request;
  request.kind = PayloadKind::kTokens;
  request.tokens = {"a", "b", "c", "d", "e"};
  wire::WireChunking chunking;
  chunking.tokens_per_chunk = 2;
  std::vector<Chunk> chunks = wire::rechunk(request, chunking);
  REQUIRE(chunks.size() == 3);
  CHECK(chunks[0].payload == "a b");
  CHECK(chunks[1].payload == "c d");
  CHECK(chunks[2].payload == "e");
  CHECK(chunks[2].index == 3);

  wire::DecodeRequest frames;
  frames.kind = PayloadKind::kFrames;
  frames.frame_bytes = std::string(120, 'x');
  wire::WireChunking frame_chunking;
  frame_chunking.bytes_per_chunk = 50;
  std::vector<Chunk> frame_chunks = wire::rechunk(frames, frame_chunking);
  REQUIRE(frame_chunks.size() == 3);
  CHECK(frame_chunks[0].payload.size() == 50);
  CHECK(frame_chunks[2].payload.size() == 20);
}

TEST_CASE("a served decoder matches its in-process twin commit for commit") {
  wire::DecoderWireServer server(net::Listener::bind(net::parse_endpoint("127.0.0.1:0")),
                                 std::make_shared<ScriptedDecoderFactory>(nature_script()),
                                 wire::WireChunking{});
  server.start();

  std::vector<std::string> payloads = {"Nature", "can", "tell", "us"};

  ScriptedDecoder local(nature_script());
  std::vector<CommitEvent> local_log = run_session(local, payloads);

  RemoteDecoder remote(server.endpoint(), 10.0);
  CHECK(remote.info().accepts_tokens);
  std::vector<CommitEvent> remote_log = run_session(remote, payloads);

  CHECK(remote_log == local_log);
  server.stop();
}

TEST_CASE("a remote answer that drops the committed prefix is rejected locally") {
  wire::DecoderWireServer server(net::Listener::bind(net::parse_endpoint("127.0.0.1:0")),
                                 std::make_shared<RogueFactory>(), wire::WireChunking{});
  server.start();

  RemoteDecoder remote(server.endpoint(), 10.0);
  std::vector<Chunk> chunks = token_chunks({"x"});
  DecodeInput input{PayloadKind::kTokens, chunks};
  // First call: empty prefix, anything goes.
  CHECK(remote.decode(input, ts({})) == ts({"rogue"}));
  // Conflicting prefix: the contract check fires on the client side.
  CHECK_THROWS_AS(remote.decode(input, ts({"other"})), ContractViolationError);
  server.stop();
}

TEST_CASE("a server-side decoder fault answers with a wire error") {
  wire::DecoderWireServer server(net::Listener::bind(net::parse_endpoint("127.0.0.1:0")),
                                 std::make_shared<ScriptedDecoderFactory>(nature_script()),
                                 wire::WireChunking{});
  server.start();

  RemoteDecoder remote(server.endpoint(), 10.0);
  // Five chunks overruns the four-entry script: server reports, client throws.
  std::vector<Chunk> chunks = token_chunks({"a", "b", "c", "d", "e"});
  DecodeInput input{PayloadKind::kTokens, chunks};
  CHECK_THROWS_AS(remote.decode(input, ts({})), ProtocolError);

  // The connection stays usable for a well-formed follow-up request.
  std::vector<Chunk> ok_chunks = token_chunks({"a"});
  DecodeInput ok_input{PayloadKind::kTokens, ok_chunks};
  CHECK(remote.decode(ok_input, ts({})).text() == "Nature canned");
  server.stop();
}

TEST_CASE("connecting to a dead endpoint names the endpoint in the error") {
  // Bind and immediately close to obtain a port that refuses connections.
  net::Listener listener = net::Listener::bind(net::parse_endpoint("127.0.0.1:0"));
  net::Endpoint endpoint = listener.local_endpoint();
  listener.close();

  try {
    RemoteDecoder remote(endpoint, 1.0);
    FAIL("expected a transport error");
  } catch (const TransportError& e) {
    CHECK(std::string(e.what()).find(net::to_string(endpoint)) != std::string::npos);
  }
}

TEST_CASE("a silent server trips the configured timeout") {
  net::Listener listener = net::Listener::bind(net::parse_endpoint("127.0.0.1:0"));
  net::Endpoint endpoint = listener.local_endpoint();
  std::atomic<bool> done{false};
  std::thread sink([&] {
    net::Socket socket = listener.accept();
    while (!done.load()) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    socket.close();
  });

  RemoteDecoder remote(endpoint, 0.3);
  std::vector<Chunk> chunks = token_chunks({"x"});
  DecodeInput input{PayloadKind::kTokens, chunks};
  auto begin = std::chrono::steady_clock::now();
  CHECK_THROWS_AS(remote.decode(input, ts({})), TimeoutError);
  auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
  CHECK(elapsed < 5.0);

  done.store(true);
  sink.join();
  listener.close();
}

TEST_CASE("base64 round-trips arbitrary bytes and rejects garbage") {
  std::string bytes;
  for (int i = 0; i < 256; ++i) bytes.push_back(static_cast<char>(i));
  CHECK(net::base64_decode(net::base64_encode(bytes)) == bytes);
  CHECK(net::base64_encode("") == "");
  CHECK(net::base64_encode("f") == "Zg==");
  CHECK(net::base64_encode("fo") == "Zm8=");
  CHECK(net::base64_encode("foo") == "Zm9v");
  CHECK_THROWS_AS(net::base64_decode("!!!!"), ArgumentError);
  CHECK_THROWS_AS(net::base64_decode("Zg="), ArgumentError);
}

TEST_CASE("endpoint strings parse both address families") {
  net::Endpoint v4 = net::parse_endpoint("127.0.0.1:9000");
  CHECK(v4.host == "127.0.0.1");
  CHECK(v4.port == 9000);
  CHECK(net::to_string(v4) == "127.0.0.1:9000");

  net::Endpoint v6 = net::parse_endpoint("[::1]:8080");
  CHECK(v6.host == "::1");
  CHECK(v6.port == 8080);
  CHECK(net::to_string(v6) == "[::1]:8080");

  CHECK_THROWS_AS(net::parse_endpoint("no-port"), ArgumentError);
  CHECK_THROWS_AS(net::parse_endpoint("host:notanumber"), ArgumentError);
  CHECK_THROWS_AS(net::parse_endpoint("host:70000"), ArgumentError);
}
