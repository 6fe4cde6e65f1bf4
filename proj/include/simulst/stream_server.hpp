// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "simulst/chunk.hpp"
#include "simulst/decoder.hpp"
#include "simulst/net.hpp"

namespace simulst {

/// Client-to-server message. One JSON object per line:
///   {"type":"open","session":s, "chunk_duration_s":0.5, "agreement_depth":2,
///    "backend":name?, "payload_kind":"tokens"|"frames"?}
///   {"type":"chunk","session":s, "index":n, "payload":base64}
///   {"type":"close","session":s}
/// Sessions on one connection are sequential; ids may not be reused. The
/// client keeps at most one chunk in flight (send, await the commit
/// envelope, send the next).
struct ClientEnvelope {
  enum class Type { kOpen, kChunk, kClose };
  Type type = Type::kOpen;
  std::string session;
  // open
  double chunk_duration_s = 0.5;
  std::uint32_t agreement_depth = 2;
  std::string backend;
  std::optional<PayloadKind> payload_kind;
  // chunk
  std::uint32_t index = 0;
  std::string payload;  // raw bytes; base64 on the wire
};

/// Server-to-client message:
///   {"type":"commit","session":s,"tokens":[...],"chunk_index":n,"final":b}
///   {"type":"error","session":s,"error":msg,"code":c}
///   {"type":"summary","session":s,"status":"ok"|"empty-session",
///    "latency_s":x|null,"tokens":n,"chunks":n}
/// Every chunk is answered by exactly one commit envelope (tokens possibly
/// empty); close is answered by one final commit envelope plus one summary.
struct ServerEnvelope {
  enum class Type { kCommit, kError, kSummary };
  Type type = Type::kCommit;
  std::string session;
  // commit
  std::vector<std::string> tokens;
  std::uint32_t chunk_index = 0;
  bool final_flag = false;
  // error
  std::string error;
  std::string code;
  // summary
  std::string status;
  std::optional<double> latency_s;
  std::uint64_t token_count = 0;
  std::uint32_t chunk_count = 0;
};

std::string to_json_line(const ClientEnvelope& envelope);
std::string to_json_line(const ServerEnvelope& envelope);
/// Throw ProtocolError on malformed lines.
ClientEnvelope client_envelope_from_json(const std::string& line);
ServerEnvelope server_envelope_from_json(const std::string& line);

struct StreamServerLimits {
  /// Sessions allowed to be active at once across all connections.
  std::size_t max_sessions = 64;
  /// Upper bound on one chunk's decoded payload.
  std::size_t max_chunk_bytes = 1 << 20;
};

/// Session-oriented streaming service: each connection hosts one session at
/// a time (sequential re-opens allowed), each session drives one decoder
/// instance through the commit policy and streams irrevocable commits back.
/// A failure inside one session (malformed input, backend fault, limit hit)
/// aborts that session with an error envelope; other sessions are untouched.
class StreamServer {
 public:
  StreamServer(net::Listener listener,
               std::map<std::string, std::shared_ptr<DecoderFactory>> backends,
               StreamServerLimits limits);
  ~StreamServer();
  StreamServer(const StreamServer&) = delete;
  StreamServer& operator=(const StreamServer&) = delete;

  void start();
  void stop();
  net::Endpoint endpoint() const { return endpoint_; }
  std::size_t active_sessions() const { return active_sessions_.load(); }

 private:
  class Connection;

  void accept_loop();

  net::Listener listener_;
  net::Endpoint endpoint_;
  std::map<std::string, std::shared_ptr<DecoderFactory>> backends_;
  StreamServerLimits limits_;
  std::atomic<bool> stopping_{false};
  std::atomic<std::size_t> active_sessions_{0};
  std::thread accept_thread_;
  std::mutex workers_mutex_;
  std::vector<std::thread> workers_;
};

/// Blocking client for the session protocol; used by the replay CLI and the
/// integration tests. Not thread-safe.
class StreamClient {
 public:
  explicit StreamClient(const net::Endpoint& endpoint, double timeout_s = 30.0);

  /// Sends the open envelope. The server does not acknowledge opens; a
  /// rejected open surfaces as an error envelope on the next read.
  void open(const std::string& session, double chunk_duration_s, std::uint32_t agreement_depth,
            const std::string& backend = "", std::optional<PayloadKind> payload_kind = {});

  /// Sends one chunk and blocks for the answering envelope. Returns the
  /// commit envelope; throws ProtocolError carrying the server's message if
  /// an error envelope arrives instead.
  ServerEnvelope send_chunk(const std::string& session, std::uint32_t index,
                            const std::string& payload);

  /// Sends close and blocks for the final commit envelope plus the summary.
  std::pair<ServerEnvelope, ServerEnvelope> close(const std::string& session);

  /// Protocol-level access for tests: raw line out, next envelope in.
  void send_raw_line(const std::string& line);
  ServerEnvelope read_envelope();

 private:
  net::Socket socket_;
};

}  // namespace simulst
