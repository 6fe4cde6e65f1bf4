// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "simulst/chunk.hpp"
#include "simulst/decoder.hpp"
#include "simulst/net.hpp"

namespace simulst::wire {

/// One decode request: the full input so far plus the committed prefix the
/// hypothesis must extend. Token inputs travel as a flat token list, frame
/// inputs as base64 bytes. One request is in flight per connection.
struct DecodeRequest {
  std::uint64_t id = 0;
  std::vector<std::string> committed;
  PayloadKind kind = PayloadKind::kTokens;
  std::vector<std::string> tokens;
  std::string frame_bytes;
};

/// Either a hypothesis or an error, echoing the request id.
struct DecodeResponse {
  std::uint64_t id = 0;
  bool ok = false;
  std::vector<std::string> hypothesis;
  std::string error;
};

std::string to_json_line(const DecodeRequest& request);
std::string to_json_line(const DecodeResponse& response);
/// Throw ProtocolError on malformed lines.
DecodeRequest request_from_json(const std::string& line);
DecodeResponse response_from_json(const std::string& line);

/// The wire flattens the chunked input; the serving side re-chunks it with
/// fixed group sizes so that chunk-counting decoders observe the same chunk
/// sequence the client produced. Both sides must agree on the group sizes.
struct WireChunking {
  std::uint32_t tokens_per_chunk = 1;
  std::uint32_t bytes_per_chunk = 50;
  double chunk_duration_s = 0.5;
};

std::vector<Chunk> rechunk(const DecodeRequest& request, const WireChunking& chunking);

/// Hosts one decoder factory behind the wire protocol: each connection is one
/// session served by a fresh decoder instance; requests on a connection are
/// processed strictly in order; a decoder failure answers that request with
/// an error and leaves the connection usable.
class DecoderWireServer {
 public:
  DecoderWireServer(net::Listener listener, std::shared_ptr<DecoderFactory> factory,
                    WireChunking chunking);
  ~DecoderWireServer();
  DecoderWireServer(const DecoderWireServer&) = delete;
  DecoderWireServer& operator=(const DecoderWireServer&) = delete;

  void start();
  void stop();
  net::Endpoint endpoint() const { return endpoint_; }

 private:
  void accept_loop();
  void serve_connection(net::Socket socket);

  net::Listener listener_;
  net::Endpoint endpoint_;
  std::shared_ptr<DecoderFactory> factory_;
  WireChunking chunking_;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::mutex workers_mutex_;
  std::vector<std::thread> workers_;
};

}  // namespace simulst::wire
