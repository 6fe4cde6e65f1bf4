// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0
//
// Replay client: streams a stored utterance to a running commit server chunk
// by chunk and prints the commits as they arrive, then the session summary.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "simulst/errors.hpp"
#include "simulst/stream_server.hpp"

namespace {

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw simulst::ArgumentError("cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"utterance replay client"};

  std::string connect_address;
  std::string frames_path;
  double chunk_duration_s = 0.5;
  double frame_rate_hz = 100.0;
  std::uint32_t depth = 2;
  std::string session_id = "replay-1";
  std::string backend;

  app.add_option("--connect", connect_address, "server address (host:port)")->required();
  app.add_option("--wav-frames", frames_path, "stored frame file to replay")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--chunk", chunk_duration_s, "chunk duration in seconds")
      ->capture_default_str();
  app.add_option("--frame-rate", frame_rate_hz, "frames per second in the stored file")
      ->capture_default_str();
  app.add_option("--depth", depth, "agreement depth")->capture_default_str();
  app.add_option("--session", session_id, "session id")->capture_default_str();
  app.add_option("--backend", backend, "backend name on the server (optional)");

  CLI11_PARSE(app, argc, argv);

  try {
    std::string bytes = read_file_bytes(frames_path);
    auto per_chunk =
        static_cast<std::size_t>(std::llround(frame_rate_hz * chunk_duration_s));
    if (per_chunk < 1) {
      throw simulst::ArgumentError("frame rate x chunk duration must reach one frame");
    }

    simulst::StreamClient client(simulst::net::parse_endpoint(connect_address));
    client.open(session_id, chunk_duration_s, depth, backend, simulst::PayloadKind::kFrames);

    std::uint32_t index = 0;
    for (std::size_t begin = 0; begin < bytes.size(); begin += per_chunk) {
      std::size_t end = std::min(bytes.size(), begin + per_chunk);
      ++index;
      simulst::ServerEnvelope commit =
          client.send_chunk(session_id, index, bytes.substr(begin, end - begin));
      std::cout << "chunk " << index << " ->";
      for (const std::string& token : commit.tokens) {
        std::cout << ' ' << token;
      }
      std::cout << "\n";
    }

    auto [final_envelope, summary] = client.close(session_id);
    std::cout << "final ->";
    for (const std::string& token : final_envelope.tokens) {
      std::cout << ' ' << token;
    }
    std::cout << "\n";
    std::cout << "summary: status=" << summary.status << " tokens=" << summary.token_count
              << " chunks=" << summary.chunk_count;
    if (summary.latency_s.has_value()) {
      std::cout << " latency_s=" << *summary.latency_s;
    }
    std::cout << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
}
