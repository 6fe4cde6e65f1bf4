// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0
//
// Session server: clients stream input chunks over newline-delimited JSON
// and receive irrevocable commit envelopes back. Runs until SIGINT/SIGTERM.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "simulst/backend.hpp"
#include "simulst/errors.hpp"
#include "simulst/stream_server.hpp"

namespace {

volatile std::sig_atomic_t g_stop_requested = 0;

void handle_stop_signal(int) { g_stop_requested = 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streaming commit server"};

  std::string bind_address = "127.0.0.1:9000";
  std::vector<std::string> backend_args;
  simulst::StreamServerLimits limits;
  double timeout_s = 30.0;

  app.add_option("--bind", bind_address, "address to listen on (host:port, port 0 = ephemeral)")
      ->capture_default_str();
  app.add_option("--backend", backend_args,
                 "backend registration, repeatable: [name=]scripted:<path> | [name=]toy:<path> "
                 "| [name=]remote:<host:port>")
      ->required();
  app.add_option("--max-sessions", limits.max_sessions, "concurrent session limit")
      ->capture_default_str();
  app.add_option("--max-chunk-bytes", limits.max_chunk_bytes, "per-chunk payload byte limit")
      ->capture_default_str();
  app.add_option("--timeout", timeout_s, "remote-backend decode timeout in seconds")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    std::map<std::string, std::shared_ptr<simulst::DecoderFactory>> backends;
    for (const std::string& arg : backend_args) {
      std::string name;
      std::string spec_text = arg;
      std::size_t equals = arg.find('=');
      // "name=spec" registers under the given name, a bare spec under the
      // spec's kind ("scripted", "toy", "remote").
      if (equals != std::string::npos && arg.find(':') > equals) {
        name = arg.substr(0, equals);
        spec_text = arg.substr(equals + 1);
      }
      simulst::BackendSpec spec = simulst::BackendSpec::parse(spec_text);
      if (name.empty()) {
        name = spec_text.substr(0, spec_text.find(':'));
      }
      if (!backends.emplace(name, simulst::make_decoder_factory(spec, timeout_s)).second) {
        throw simulst::ArgumentError("duplicate backend name '" + name + "'");
      }
    }

    simulst::net::Listener listener =
        simulst::net::Listener::bind(simulst::net::parse_endpoint(bind_address));
    simulst::StreamServer server(std::move(listener), std::move(backends), limits);
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
