// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/stream_server.hpp"

#include <nlohmann/json.hpp>

#include <set>
#include <utility>

#include "simulst/errors.hpp"
#include "simulst/latency.hpp"
#include "simulst/session.hpp"

namespace simulst {

using nlohmann::json;

std::string to_json_line(const ClientEnvelope& envelope) {
  json body;
  body["session"] = envelope.session;
  switch (envelope.type) {
    case ClientEnvelope::Type::kOpen:
      body["type"] = "open";
      body["chunk_duration_s"] = envelope.chunk_duration_s;
      body["agreement_depth"] = envelope.agreement_depth;
      if (!envelope.backend.empty()) body["backend"] = envelope.backend;
      if (envelope.payload_kind.has_value()) {
        body["payload_kind"] = to_string(*envelope.payload_kind);
      }
      break;
    case ClientEnvelope::Type::kChunk:
      body["type"] = "chunk";
      body["index"] = envelope.index;
      body["payload"] = net::base64_encode(envelope.payload);
      break;
    case ClientEnvelope::Type::kClose:
      body["type"] = "close";
      break;
  }
  return body.dump();
}

std::string to_json_line(const ServerEnvelope& envelope) {
  json body;
  body["session"] = envelope.session;
  switch (envelope.type) {
    case ServerEnvelope::Type::kCommit:
      body["type"] = "commit";
      body["tokens"] = envelope.tokens;
      body["chunk_index"] = envelope.chunk_index;
      body["final"] = envelope.final_flag;
      break;
    case ServerEnvelope::Type::kError:
      body["type"] = "error";
      body["error"] = envelope.error;
      body["code"] = envelope.code;
      break;
    case ServerEnvelope::Type::kSummary:
      body["type"] = "summary";
      body["status"] = envelope.status;
      body["latency_s"] = envelope.latency_s.has_value() ? json(*envelope.latency_s) : json();
      body["tokens"] = envelope.token_count;
      body["chunks"] = envelope.chunk_count;
      break;
  }
  return body.dump();
}

ClientEnvelope client_envelope_from_json(const std::string& line) {
  try {
    json body = json::parse(line);
    ClientEnvelope envelope;
    envelope.session = body.at("session").get<std::string>();
    std::string type = body.at("type").get<std::string>();
    if (type == "open") {
      envelope.type = ClientEnvelope::Type::kOpen;
      envelope.chunk_duration_s = body.value("chunk_duration_s", 0.5);
      envelope.agreement_depth = body.value("agreement_depth", std::uint32_t{2});
      envelope.backend = body.value("backend", "");
      if (body.contains("payload_kind")) {
        envelope.payload_kind =
            payload_kind_from_string(body.at("payload_kind").get<std::string>());
      }
    } else if (type == "chunk") {
      envelope.type = ClientEnvelope::Type::kChunk;
      envelope.index = body.at("index").get<std::uint32_t>();
      envelope.payload = net::base64_decode(body.at("payload").get<std::string>());
    } else if (type == "close") {
      envelope.type = ClientEnvelope::Type::kClose;
    } else {
      throw ProtocolError("unknown envelope type '" + type + "'");
    }
    return envelope;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed session envelope: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ProtocolError(std::string("malformed session envelope: ") + e.what());
  }
}

ServerEnvelope server_envelope_from_json(const std::string& line) {
  try {
    json body = json::parse(line);
    ServerEnvelope envelope;
    envelope.session = body.at("session").get<std::string>();
    std::string type = body.at("type").get<std::string>();
    if (type == "commit") {
      envelope.type = ServerEnvelope::Type::kCommit;
      envelope.tokens = body.at("tokens").get<std::vector<std::string>>();
      envelope.chunk_index = body.at("chunk_index").get<std::uint32_t>();
      envelope.final_flag = body.at("final").get<bool>();
    } else if (type == "error") {
      envelope.type = ServerEnvelope::Type::kError;
      envelope.error = body.at("error").get<std::string>();
      envelope.code = body.value("code", "");
    } else if (type == "summary") {
      envelope.type = ServerEnvelope::Type::kSummary;
      envelope.status = body.at("status").get<std::string>();
      if (body.contains("latency_s") && !body.at("latency_s").is_null()) {
        envelope.latency_s = body.at("latency_s").get<double>();
      }
      envelope.token_count = body.value("tokens", std::uint64_t{0});
      envelope.chunk_count = body.value("chunks", std::uint32_t{0});
    } else {
      throw ProtocolError("unknown envelope type '" + type + "'");
    }
    return envelope;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed server envelope: ") + e.what());
  }
}

/// Per-connection protocol handler. Runs on its own thread; owns at most one
/// live session at a time.
class StreamServer::Connection {
 public:
  Connection(StreamServer& server, net::Socket socket)
      : server_(server), socket_(std::move(socket)) {}

  void run() {
    socket_.set_receive_timeout(0.25);
    while (!server_.stopping_.load()) {
      std::optional<std::string> line;
      try {
        line = socket_.read_line();
      } catch (const TimeoutError&) {
        continue;
      } catch (const TransportError&) {
        break;
      }
      if (!line.has_value()) break;
      if (line->empty()) continue;
      if (!handle_line(*line)) break;
    }
    drop_active_session();
  }

 private:
  struct ActiveSession {
    std::string id;
    StreamSession session;
    std::unique_ptr<IncrementalDecoder> decoder;

    ActiveSession(std::string session_id, SessionConfig config,
                  std::unique_ptr<IncrementalDecoder> dec)
        : id(std::move(session_id)), session(config), decoder(std::move(dec)) {}
  };

  bool send(const ServerEnvelope& envelope) {
    try {
      socket_.send_line(to_json_line(envelope));
      return true;
    } catch (const TransportError&) {
      return false;
    }
  }

  bool send_error(const std::string& session, const std::string& code,
                  const std::string& message) {
    ServerEnvelope envelope;
    envelope.type = ServerEnvelope::Type::kError;
    envelope.session = session;
    envelope.code = code;
    envelope.error = message;
    return send(envelope);
  }

  void drop_active_session() {
    if (active_.has_value()) {
      used_ids_.insert(active_->id);
      active_.reset();
      server_.active_sessions_.fetch_sub(1);
    }
  }

  /// Returns false when the connection must be dropped.
  bool handle_line(const std::string& line) {
    ClientEnvelope envelope;
    try {
      envelope = client_envelope_from_json(line);
    } catch (const ProtocolError& e) {
      // Framing is broken; report and hang up. An active session aborts.
      send_error("", "malformed", e.what());
      return false;
    }
    switch (envelope.type) {
      case ClientEnvelope::Type::kOpen:
        return handle_open(envelope);
      case ClientEnvelope::Type::kChunk:
        return handle_chunk(envelope);
      case ClientEnvelope::Type::kClose:
        return handle_close(envelope);
    }
    return false;
  }

  bool handle_open(const ClientEnvelope& envelope) {
    if (active_.has_value()) {
      return send_error(envelope.session, "protocol",
                        "a session is already open on this connection");
    }
    if (used_ids_.count(envelope.session) > 0) {
      return send_error(envelope.session, "protocol",
                        "session id '" + envelope.session + "' was already used");
    }
    if (envelope.session.empty()) {
      return send_error(envelope.session, "protocol", "session id must be nonempty");
    }

    std::shared_ptr<DecoderFactory> factory;
    if (!envelope.backend.empty()) {
      auto it = server_.backends_.find(envelope.backend);
      if (it == server_.backends_.end()) {
        return send_error(envelope.session, "protocol",
                          "unknown backend '" + envelope.backend + "'");
      }
      factory = it->second;
    } else if (server_.backends_.size() == 1) {
      factory = server_.backends_.begin()->second;
    } else {
      return send_error(envelope.session, "protocol",
                        "open must name a backend (several are registered)");
    }

    // Reserve a session slot; roll back if anything below fails.
    std::size_t occupied = server_.active_sessions_.fetch_add(1);
    if (occupied >= server_.limits_.max_sessions) {
      server_.active_sessions_.fetch_sub(1);
      return send_error(envelope.session, "limit", "server is at its session capacity");
    }

    std::unique_ptr<IncrementalDecoder> decoder;
    try {
      decoder = factory->make();
    } catch (const std::exception& e) {
      server_.active_sessions_.fetch_sub(1);
      return send_error(envelope.session, "backend",
                        std::string("backend instantiation failed: ") + e.what());
    }

    SessionConfig config;
    config.chunk_duration_s = envelope.chunk_duration_s;
    config.agreement_depth = envelope.agreement_depth;
    if (envelope.payload_kind.has_value()) {
      config.payload_kind = *envelope.payload_kind;
    } else {
      config.payload_kind =
          decoder->info().accepts_tokens ? PayloadKind::kTokens : PayloadKind::kFrames;
    }

    try {
      active_.emplace(envelope.session, config, std::move(decoder));
    } catch (const std::exception& e) {
      server_.active_sessions_.fetch_sub(1);
      return send_error(envelope.session, "protocol", e.what());
    }
    return true;
  }

  bool handle_chunk(const ClientEnvelope& envelope) {
    if (!active_.has_value() || active_->id != envelope.session) {
      return send_error(envelope.session, "protocol",
                        "no open session '" + envelope.session + "'");
    }
    if (envelope.payload.size() > server_.limits_.max_chunk_bytes) {
      bool sent = send_error(envelope.session, "limit",
                             "chunk of " + std::to_string(envelope.payload.size()) +
                                 " bytes exceeds the limit of " +
                                 std::to_string(server_.limits_.max_chunk_bytes));
      drop_active_session();
      return sent;
    }

    Chunk chunk;
    chunk.index = envelope.index;
    chunk.payload = envelope.payload;
    chunk.duration_s = active_->session.config().chunk_duration_s;

    std::optional<CommitEvent> commit;
    try {
      commit = active_->session.ingest_chunk(chunk, *active_->decoder);
    } catch (const std::exception& e) {
      bool sent = send_error(envelope.session, "backend", e.what());
      drop_active_session();
      return sent;
    }

    ServerEnvelope reply;
    reply.type = ServerEnvelope::Type::kCommit;
    reply.session = envelope.session;
    reply.chunk_index = envelope.index;
    reply.final_flag = false;
    if (commit.has_value()) {
      reply.tokens = commit->tokens.tokens;
      reply.chunk_index = commit->chunk_index;
    }
    return send(reply);
  }

  bool handle_close(const ClientEnvelope& envelope) {
    if (!active_.has_value() || active_->id != envelope.session) {
      // Duplicate close lands here: the id is in used_ids_, the session is
      // gone, and exactly one error envelope answers it.
      return send_error(envelope.session, "protocol",
                        used_ids_.count(envelope.session) > 0
                            ? "session '" + envelope.session + "' is already closed"
                            : "no open session '" + envelope.session + "'");
    }

    ServerEnvelope final_envelope;
    final_envelope.type = ServerEnvelope::Type::kCommit;
    final_envelope.session = envelope.session;
    final_envelope.final_flag = true;

    ServerEnvelope summary;
    summary.type = ServerEnvelope::Type::kSummary;
    summary.session = envelope.session;

    try {
      std::optional<CommitEvent> flush = active_->session.finish_stream();
      if (flush.has_value()) {
        final_envelope.tokens = flush->tokens.tokens;
        final_envelope.chunk_index = flush->chunk_index;
      } else {
        final_envelope.chunk_index = active_->session.chunks_arrived();
      }
      summary.status = "ok";
      LatencyLog log = latency_log_from_commits(active_->session.commit_log(),
                                                active_->session.config().chunk_duration_s,
                                                active_->session.chunks_arrived());
      summary.token_count = log.emissions.size();
      summary.chunk_count = active_->session.chunks_arrived();
      if (!log.emissions.empty()) {
        summary.latency_s = latency_seconds(log);
      }
    } catch (const EmptySessionError&) {
      final_envelope.tokens.clear();
      final_envelope.chunk_index = 0;
      summary.status = "empty-session";
      summary.token_count = 0;
      summary.chunk_count = 0;
    } catch (const std::exception& e) {
      bool sent = send_error(envelope.session, "backend", e.what());
      drop_active_session();
      return sent;
    }

    drop_active_session();
    if (!send(final_envelope)) return false;
    return send(summary);
  }

  StreamServer& server_;
  net::Socket socket_;
  std::optional<ActiveSession> active_;
  std::set<std::string> used_ids_;
};

StreamServer::StreamServer(net::Listener listener,
                           std::map<std::string, std::shared_ptr<DecoderFactory>> backends,
                           StreamServerLimits limits)
    : listener_(std::move(listener)),
      endpoint_(listener_.local_endpoint()),
      backends_(std::move(backends)),
      limits_(limits) {
  if (backends_.empty()) {
    throw ArgumentError("stream server needs at least one registered backend");
  }
}

StreamServer::~StreamServer() { stop(); }

void StreamServer::start() {
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void StreamServer::stop() {
  bool expected = false;
  if (!stopping_.compare_exchange_strong(expected, true)) {
    if (accept_thread_.joinable()) accept_thread_.join();
    return;
  }
  listener_.close();
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard<std::mutex> lock(workers_mutex_);
    workers.swap(workers_);
  }
  for (std::thread& worker : workers) {
    if (worker.joinable()) worker.join();
  }
}

void StreamServer::accept_loop() {
  while (!stopping_.load()) {
    net::Socket socket;
    try {
      socket = listener_.accept();
    } catch (const TransportError&) {
      break;
    }
    std::lock_guard<std::mutex> lock(workers_mutex_);
    workers_.emplace_back(
        [this, moved = std::make_shared<net::Socket>(std::move(socket))]() mutable {
          Connection connection(*this, std::move(*moved));
          connection.run();
        });
  }
}

StreamClient::StreamClient(const net::Endpoint& endpoint, double timeout_s)
    : socket_(net::Socket::connect(endpoint)) {
  socket_.set_receive_timeout(timeout_s);
}

void StreamClient::open(const std::string& session, double chunk_duration_s,
                        std::uint32_t agreement_depth, const std::string& backend,
                        std::optional<PayloadKind> payload_kind) {
  ClientEnvelope envelope;
  envelope.type = ClientEnvelope::Type::kOpen;
  envelope.session = session;
  envelope.chunk_duration_s = chunk_duration_s;
  envelope.agreement_depth = agreement_depth;
  envelope.backend = backend;
  envelope.payload_kind = payload_kind;
  socket_.send_line(to_json_line(envelope));
}

ServerEnvelope StreamClient::send_chunk(const std::string& session, std::uint32_t index,
                                        const std::string& payload) {
  ClientEnvelope envelope;
  envelope.type = ClientEnvelope::Type::kChunk;
  envelope.session = session;
  envelope.index = index;
  envelope.payload = payload;
  socket_.send_line(to_json_line(envelope));
  ServerEnvelope reply = read_envelope();
  if (reply.type == ServerEnvelope::Type::kError) {
    throw ProtocolError("server error (" + reply.code + "): " + reply.error);
  }
  return reply;
}

std::pair<ServerEnvelope, ServerEnvelope> StreamClient::close(const std::string& session) {
  ClientEnvelope envelope;
  envelope.type = ClientEnvelope::Type::kClose;
  envelope.session = session;
  socket_.send_line(to_json_line(envelope));
  ServerEnvelope final_envelope = read_envelope();
  if (final_envelope.type == ServerEnvelope::Type::kError) {
    throw ProtocolError("server error (" + final_envelope.code + "): " + final_envelope.error);
  }
  ServerEnvelope summary = read_envelope();
  if (summary.type == ServerEnvelope::Type::kError) {
    throw ProtocolError("server error (" + summary.code + "): " + summary.error);
  }
  return {final_envelope, summary};
}

void StreamClient::send_raw_line(const std::string& line) { socket_.send_line(line); }

ServerEnvelope StreamClient::read_envelope() {
  std::optional<std::string> line = socket_.read_line();
  if (!line.has_value()) {
    throw TransportError("server closed the connection");
  }
  return server_envelope_from_json(*line);
}

}  // namespace simulst
