// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/wire.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <utility>

#include "simulst/errors.hpp"
#include "simulst/tokens.hpp"

namespace simulst::wire {

using nlohmann::json;

std::string to_json_line(const DecodeRequest& request) {
  json body;
  body["id"] = request.id;
  body["committed"] = request.committed;
  json input;
  if (request.kind == PayloadKind::kTokens) {
    input["kind"] = "tokens";
    input["payload"] = request.tokens;
  } else {
    input["kind"] = "frames";
    input["payload"] = net::base64_encode(request.frame_bytes);
  }
  body["input"] = std::move(input);
  return body.dump();
}

std::string to_json_line(const DecodeResponse& response) {
  json body;
  body["id"] = response.id;
  if (response.ok) {
    body["hypothesis"] = response.hypothesis;
  } else {
    body["error"] = response.error;
  }
  return body.dump();
}

DecodeRequest request_from_json(const std::string& line) {
  try {
    json body = json::parse(line);
    DecodeRequest request;
    request.id = body.at("id").get<std::uint64_t>();
    request.committed = body.at("committed").get<std::vector<std::string>>();
    const json& input = body.at("input");
    std::string kind = input.at("kind").get<std::string>();
    request.kind = payload_kind_from_string(kind);
    if (request.kind == PayloadKind::kTokens) {
      request.tokens = input.at("payload").get<std::vector<std::string>>();
    } else {
      request.frame_bytes = net::base64_decode(input.at("payload").get<std::string>());
    }
    return request;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed decode request: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ProtocolError(std::string("malformed decode request: ") + e.what());
  }
}

DecodeResponse response_from_json(const std::string& line) {
  try {
    json body = json::parse(line);
    DecodeResponse response;
    response.id = body.at("id").get<std::uint64_t>();
    if (body.contains("hypothesis")) {
      response.ok = true;
      response.hypothesis = body.at("hypothesis").get<std::vector<std::string>>();
    } else {
      response.ok = false;
      response.error = body.at("error").get<std::string>();
    }
    return response;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed decode response: ") + e.what());
  }
}

std::vector<Chunk> rechunk(const DecodeRequest& request, const WireChunking& chunking) {
  if (chunking.tokens_per_chunk == 0 || chunking.bytes_per_chunk == 0) {
    throw ArgumentError("wire chunk group sizes must be positive");
  }
  std::vector<Chunk> chunks;
  if (request.kind == PayloadKind::kTokens) {
    for (std::size_t begin = 0; begin < request.tokens.size();
         begin += chunking.tokens_per_chunk) {
      std::size_t end = std::min(request.tokens.size(),
                                 begin + static_cast<std::size_t>(chunking.tokens_per_chunk));
      std::string payload;
      for (std::size_t i = begin; i < end; ++i) {
        if (!payload.empty()) payload += ' ';
        payload += request.tokens[i];
      }
      Chunk chunk;
      chunk.index = static_cast<std::uint32_t>(chunks.size() + 1);
      chunk.payload = std::move(payload);
      chunk.duration_s = chunking.chunk_duration_s;
      chunks.push_back(std::move(chunk));
    }
  } else {
    for (std::size_t begin = 0; begin < request.frame_bytes.size();
         begin += chunking.bytes_per_chunk) {
      std::size_t end = std::min(request.frame_bytes.size(),
                                 begin + static_cast<std::size_t>(chunking.bytes_per_chunk));
      Chunk chunk;
      chunk.index = static_cast<std::uint32_t>(chunks.size() + 1);
      chunk.payload = request.frame_bytes.substr(begin, end - begin);
      chunk.duration_s = chunking.chunk_duration_s;
      chunks.push_back(std::move(chunk));
    }
  }
  return chunks;
}

DecoderWireServer::DecoderWireServer(net::Listener listener,
                                     std::shared_ptr<DecoderFactory> factory,
                                     WireChunking chunking)
    : listener_(std::move(listener)),
      endpoint_(listener_.local_endpoint()),
      factory_(std::move(factory)),
      chunking_(chunking) {}

DecoderWireServer::~DecoderWireServer() { stop(); }

void DecoderWireServer::start() {
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void DecoderWireServer::stop() {
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

void DecoderWireServer::accept_loop() {
  while (!stopping_.load()) {
    net::Socket socket;
    try {
      socket = listener_.accept();
    } catch (const TransportError&) {
      break;  // listener closed (shutdown) or hard failure
    }
    std::lock_guard<std::mutex> lock(workers_mutex_);
    workers_.emplace_back(
        [this, moved = std::make_shared<net::Socket>(std::move(socket))]() mutable {
          serve_connection(std::move(*moved));
        });
  }
}

void DecoderWireServer::serve_connection(net::Socket socket) {
  std::unique_ptr<IncrementalDecoder> decoder;
  try {
    decoder = factory_->make();
  } catch (const std::exception&) {
    return;  // cannot serve this session at all
  }
  // Wake up periodically so stop() can end idle connections.
  socket.set_receive_timeout(0.25);
  while (!stopping_.load()) {
    std::optional<std::string> line;
    try {
      line = socket.read_line();
    } catch (const TimeoutError&) {
      continue;
    } catch (const TransportError&) {
      break;
    }
    if (!line.has_value()) break;
    if (line->empty()) continue;

    DecodeResponse response;
    try {
      DecodeRequest request = request_from_json(*line);
      response.id = request.id;
      std::vector<Chunk> chunks = rechunk(request, chunking_);
      DecodeInput input;
      input.kind = request.kind;
      input.chunks = std::span<const Chunk>(chunks);
      TokenSequence committed(request.committed, "word");
      TokenSequence hypothesis = decoder->decode(input, committed);
      response.ok = true;
      response.hypothesis = hypothesis.tokens;
    } catch (const ProtocolError& e) {
      // Unparseable line: answer with id 0 and drop the connection, since
      // framing can no longer be trusted.
      response.ok = false;
      response.error = e.what();
      try {
        socket.send_line(to_json_line(response));
      } catch (const TransportError&) {
      }
      break;
    } catch (const std::exception& e) {
      response.ok = false;
      response.error = e.what();
    }
    try {
      socket.send_line(to_json_line(response));
    } catch (const TransportError&) {
      break;
    }
  }
}

}  // namespace simulst::wire
