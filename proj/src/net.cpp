// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/net.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <utility>

#include "simulst/errors.hpp"

namespace simulst::net {
namespace {

constexpr std::string_view kBase64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_base64_symbol(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

std::string errno_message(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

}  // namespace

std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= bytes.size()) {
    std::uint32_t group = (static_cast<unsigned char>(bytes[i]) << 16) |
                          (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                          static_cast<unsigned char>(bytes[i + 2]);
    out += kBase64Alphabet[(group >> 18) & 0x3f];
    out += kBase64Alphabet[(group >> 12) & 0x3f];
    out += kBase64Alphabet[(group >> 6) & 0x3f];
    out += kBase64Alphabet[group & 0x3f];
    i += 3;
  }
  std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    std::uint32_t group = static_cast<unsigned char>(bytes[i]) << 16;
    out += kBase64Alphabet[(group >> 18) & 0x3f];
    out += kBase64Alphabet[(group >> 12) & 0x3f];
    out += "==";
  } else if (rest == 2) {
    std::uint32_t group = (static_cast<unsigned char>(bytes[i]) << 16) |
                          (static_cast<unsigned char>(bytes[i + 1]) << 8);
    out += kBase64Alphabet[(group >> 18) & 0x3f];
    out += kBase64Alphabet[(group >> 12) & 0x3f];
    out += kBase64Alphabet[(group >> 6) & 0x3f];
    out += '=';
  }
  return out;
}

std::string base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) {
    throw ArgumentError("base64 length must be a multiple of 4");
  }
  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int values[4];
    int padding = 0;
    for (int k = 0; k < 4; ++k) {
      char c = text[i + k];
      if (c == '=') {
        // Padding is only legal in the final group's last two positions.
        if (i + 4 != text.size() || k < 2) {
          throw ArgumentError("malformed base64 padding");
        }
        values[k] = 0;
        ++padding;
      } else {
        if (padding > 0) {
          throw ArgumentError("base64 symbol after padding");
        }
        values[k] = decode_base64_symbol(c);
        if (values[k] < 0) {
          throw ArgumentError("invalid base64 symbol");
        }
      }
    }
    std::uint32_t group = (static_cast<std::uint32_t>(values[0]) << 18) |
                          (static_cast<std::uint32_t>(values[1]) << 12) |
                          (static_cast<std::uint32_t>(values[2]) << 6) |
                          static_cast<std::uint32_t>(values[3]);
    out += static_cast<char>((group >> 16) & 0xff);
    if (padding < 2) out += static_cast<char>((group >> 8) & 0xff);
    if (padding < 1) out += static_cast<char>(group & 0xff);
  }
  return out;
}

Endpoint parse_endpoint(std::string_view address) {
  std::string_view host;
  std::string_view port_text;
  if (!address.empty() && address.front() == '[') {
    std::size_t closing = address.find(']');
    if (closing == std::string_view::npos || closing + 1 >= address.size() ||
        address[closing + 1] != ':') {
      throw ArgumentError("expected [host]:port, got '" + std::string(address) + "'");
    }
    host = address.substr(1, closing - 1);
    port_text = address.substr(closing + 2);
  } else {
    std::size_t colon = address.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 >= address.size()) {
      throw ArgumentError("expected host:port, got '" + std::string(address) + "'");
    }
    host = address.substr(0, colon);
    port_text = address.substr(colon + 1);
  }
  std::uint32_t port = 0;
  for (char c : port_text) {
    if (c < '0' || c > '9') {
      throw ArgumentError("invalid port in '" + std::string(address) + "'");
    }
    port = port * 10 + static_cast<std::uint32_t>(c - '0');
    if (port > 65535) {
      throw ArgumentError("port out of range in '" + std::string(address) + "'");
    }
  }
  return Endpoint{std::string(host), static_cast<std::uint16_t>(port)};
}

std::string to_string(const Endpoint& endpoint) {
  if (endpoint.host.find(':') != std::string::npos) {
    return "[" + endpoint.host + "]:" + std::to_string(endpoint.port);
  }
  return endpoint.host + ":" + std::to_string(endpoint.port);
}

Socket::Socket(Socket&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), buffer_(std::move(other.buffer_)) {}

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = std::exchange(other.fd_, -1);
    buffer_ = std::move(other.buffer_);
  }
  return *this;
}

Socket::~Socket() { close(); }

Socket Socket::connect(const Endpoint& endpoint) {
  struct addrinfo hints = {};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  struct addrinfo* results = nullptr;
  std::string port_text = std::to_string(endpoint.port);
  int rc = ::getaddrinfo(endpoint.host.c_str(), port_text.c_str(), &hints, &results);
  if (rc != 0) {
    throw TransportError("cannot resolve " + to_string(endpoint) + ": " + gai_strerror(rc));
  }
  int last_errno = 0;
  for (struct addrinfo* entry = results; entry != nullptr; entry = entry->ai_next) {
    int fd = ::socket(entry->ai_family, entry->ai_socktype, entry->ai_protocol);
    if (fd < 0) {
      last_errno = errno;
      continue;
    }
    if (::connect(fd, entry->ai_addr, entry->ai_addrlen) == 0) {
      ::freeaddrinfo(results);
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      return Socket(fd);
    }
    last_errno = errno;
    ::close(fd);
  }
  ::freeaddrinfo(results);
  throw TransportError("cannot connect to " + to_string(endpoint) + ": " +
                       std::strerror(last_errno == 0 ? ECONNREFUSED : last_errno));
}

void Socket::set_receive_timeout(double seconds) {
  if (fd_ < 0) return;
  struct timeval tv = {};
  if (seconds > 0.0) {
    tv.tv_sec = static_cast<time_t>(seconds);
    tv.tv_usec = static_cast<suseconds_t>((seconds - static_cast<double>(tv.tv_sec)) * 1e6);
    if (tv.tv_sec == 0 && tv.tv_usec == 0) tv.tv_usec = 1;
  }
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
}

void Socket::send_all(std::string_view data) {
  if (fd_ < 0) {
    throw TransportError("send on closed socket");
  }
  std::size_t sent = 0;
  while (sent < data.size()) {
    ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno_message("send failed"));
    }
    sent += static_cast<std::size_t>(n);
  }
}

void Socket::send_line(std::string_view line) {
  std::string framed(line);
  framed += '\n';
  send_all(framed);
}

std::optional<std::string> Socket::read_line() {
  while (true) {
    std::size_t newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      return line;
    }
    if (fd_ < 0) {
      return std::nullopt;
    }
    char chunk[4096];
    ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (n > 0) {
      buffer_.append(chunk, static_cast<std::size_t>(n));
      continue;
    }
    if (n == 0) {
      // Peer closed; a dangling partial line cannot be a complete message.
      return std::nullopt;
    }
    if (errno == EINTR) continue;
    if (errno == EAGAIN || errno == EWOULDBLOCK) {
      throw TimeoutError("timed out waiting for a line");
    }
    throw TransportError(errno_message("recv failed"));
  }
}

void Socket::shutdown_write() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_WR);
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

Listener::Listener(Listener&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), local_(std::move(other.local_)) {}

Listener& Listener::operator=(Listener&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = std::exchange(other.fd_, -1);
    local_ = std::move(other.local_);
  }
  return *this;
}

Listener::~Listener() { close(); }

Listener Listener::bind(const Endpoint& endpoint) {
  struct addrinfo hints = {};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  struct addrinfo* results = nullptr;
  std::string port_text = std::to_string(endpoint.port);
  const char* node = endpoint.host.empty() ? nullptr : endpoint.host.c_str();
  int rc = ::getaddrinfo(node, port_text.c_str(), &hints, &results);
  if (rc != 0) {
    throw TransportError("cannot resolve " + to_string(endpoint) + ": " + gai_strerror(rc));
  }
  int last_errno = 0;
  for (struct addrinfo* entry = results; entry != nullptr; entry = entry->ai_next) {
    int fd = ::socket(entry->ai_family, entry->ai_socktype, entry->ai_protocol);
    if (fd < 0) {
      last_errno = errno;
      continue;
    }
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, entry->ai_addr, entry->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
      Listener listener;
      listener.fd_ = fd;
      listener.local_ = endpoint;
      struct sockaddr_storage bound = {};
      socklen_t bound_len = sizeof(bound);
      if (::getsockname(fd, reinterpret_cast<struct sockaddr*>(&bound), &bound_len) == 0) {
        if (bound.ss_family == AF_INET) {
          listener.local_.port =
              ntohs(reinterpret_cast<struct sockaddr_in*>(&bound)->sin_port);
        } else if (bound.ss_family == AF_INET6) {
          listener.local_.port =
              ntohs(reinterpret_cast<struct sockaddr_in6*>(&bound)->sin6_port);
        }
      }
      if (listener.local_.host.empty()) {
        listener.local_.host = "127.0.0.1";
      }
      ::freeaddrinfo(results);
      return listener;
    }
    last_errno = errno;
    ::close(fd);
  }
  ::freeaddrinfo(results);
  throw TransportError("cannot bind " + to_string(endpoint) + ": " +
                       std::strerror(last_errno == 0 ? EADDRINUSE : last_errno));
}

Socket Listener::accept() {
  if (fd_ < 0) {
    throw TransportError("accept on closed listener");
  }
  while (true) {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      return Socket(fd);
    }
    if (errno == EINTR) continue;
    throw TransportError(errno_message("accept failed"));
  }
}

void Listener::close() {
  if (fd_ >= 0) {
    // shutdown() wakes any thread blocked in accept() before the close.
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

}  // namespace simulst::net
