// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0
//
// Hosts a local decoder behind the decode wire protocol so that remote:<addr>
// backends have something to talk to. The wire carries the flat input; this
// daemon re-chunks it with fixed group sizes, which therefore must match how
// the client side chunked the utterance (see --tokens-per-chunk /
// --bytes-per-chunk).

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <string>
#include <thread>

#include "simulst/backend.hpp"
#include "simulst/errors.hpp"
#include "simulst/wire.hpp"

namespace {

volatile std::sig_atomic_t g_stop_requested = 0;

void handle_stop_signal(int) { g_stop_requested = 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wire-protocol decoder daemon"};

  std::string bind_address = "127.0.0.1:9100";
  std::string backend_text;
  simulst::wire::WireChunking chunking;

  app.add_option("--bind", bind_address, "address to listen on (host:port, port 0 = ephemeral)")
      ->capture_default_str();
  app.add_option("--backend", backend_text, "scripted:<path> | toy:<path>")->required();
  app.add_option("--tokens-per-chunk", chunking.tokens_per_chunk,
                 "how many source tokens form one chunk")
      ->capture_default_str();
  app.add_option("--bytes-per-chunk", chunking.bytes_per_chunk,
                 "how many frame bytes form one chunk")
      ->capture_default_str();
  app.add_option("--chunk", chunking.chunk_duration_s, "chunk duration in seconds")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    simulst::BackendSpec spec = simulst::BackendSpec::parse(backend_text);
    if (spec.kind == simulst::BackendSpec::Kind::kRemote) {
      throw simulst::ArgumentError("decoderd hosts local decoders; remote:... would just proxy");
    }
    std::shared_ptr<simulst::DecoderFactory> factory = simulst::make_decoder_factory(spec);

    simulst::net::Listener listener =
        simulst::net::Listener::bind(simulst::net::parse_endpoint(bind_address));
    simulst::wire::DecoderWireServer server(std::move(listener), factory, chunking);
    server.start();
    std::cout << "listening on " << simulst::net::to_string(server.endpoint()) << std::endl;

    std::signal(SIGINT, handle_stop_signal);
    std::signal(SIGTERM, handle_stop_signal);
    while (g_stop_requested == 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    std::cout << "shutting down" << std::endl;
    server.stop();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
}
