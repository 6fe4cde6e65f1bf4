// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace simulst::net {

/// Standard base64 with padding. decode throws ArgumentError on anything but
/// canonical input.
std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

/// "host:port" endpoint. IPv6 literals use brackets: "[::1]:9000".
struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};
Endpoint parse_endpoint(std::string_view address);
std::string to_string(const Endpoint& endpoint);

/// Owning wrapper around a connected stream socket with buffered
/// line-oriented I/O (the transport under all wire protocols here).
/// Move-only; the descriptor closes with the object.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket();

  /// Connects to the endpoint; throws TransportError (message names the
  /// endpoint) on resolution or connection failure.
  static Socket connect(const Endpoint& endpoint);

  bool valid() const { return fd_ >= 0; }
  int fd() const { return fd_; }

  /// Bounds every subsequent receive; an expired bound surfaces as
  /// TimeoutError from read_line. Zero disables the bound.
  void set_receive_timeout(double seconds);

  /// Writes the full buffer; throws TransportError on failure.
  void send_all(std::string_view data);

  /// `line` plus a trailing newline.
  void send_line(std::string_view line);

  /// Next newline-terminated line without the terminator, or std::nullopt on
  /// clean end-of-stream. Throws TimeoutError when the receive timeout
  /// expires and TransportError on hard failures.
  std::optional<std::string> read_line();

  /// Half-closes the write side so the peer observes end-of-stream.
  void shutdown_write();

  void close();

 private:
  int fd_ = -1;
  std::string buffer_;
};

/// Owning wrapper around a listening socket.
class Listener {
 public:
  Listener() = default;
  Listener(Listener&& other) noexcept;
  Listener& operator=(Listener&& other) noexcept;
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;
  ~Listener();

  /// Binds and listens; port 0 picks a free port (see local_endpoint).
  static Listener bind(const Endpoint& endpoint);

  /// Blocks for the next connection; throws TransportError once the listener
  /// is closed (the shutdown path for accept loops).
  Socket accept();

  Endpoint local_endpoint() const { return local_; }
  bool valid() const { return fd_ >= 0; }
  void close();

 private:
  int fd_ = -1;
  Endpoint local_;
};

}  // namespace simulst::net
