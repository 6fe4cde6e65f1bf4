// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>

#include "simulst/decoder.hpp"
#include "simulst/net.hpp"

namespace simulst {

/// Drives a decoder served behind the newline-delimited JSON wire protocol.
/// One instance owns one connection and serves one session; requests are
/// strictly sequential (one in flight). The forced-prefix contract is
/// validated locally — a faulty server cannot corrupt session state.
///
/// Errors: TransportError on connect/IO failure (message names the
/// endpoint), TimeoutError when a response exceeds the configured timeout,
/// ProtocolError on malformed or mismatched responses or server-reported
/// errors, ContractViolationError when the returned hypothesis does not
/// extend the committed prefix.
class RemoteDecoder : public IncrementalDecoder {
 public:
  explicit RemoteDecoder(net::Endpoint endpoint, double timeout_s = 30.0);

  DecoderInfo info() const override;
  TokenSequence decode(const DecodeInput& input, const TokenSequence& committed) override;

  const net::Endpoint& endpoint() const { return endpoint_; }

 private:
  net::Endpoint endpoint_;
  double timeout_s_;
  net::Socket socket_;
  std::uint64_t next_id_ = 1;
};

/// Opens a fresh connection (= one wire session) per decoder instance.
class RemoteDecoderFactory : public DecoderFactory {
 public:
  explicit RemoteDecoderFactory(net::Endpoint endpoint, double timeout_s = 30.0)
      : endpoint_(std::move(endpoint)), timeout_s_(timeout_s) {}

  std::unique_ptr<IncrementalDecoder> make() override {
    return std::make_unique<RemoteDecoder>(endpoint_, timeout_s_);
  }

 private:
  net::Endpoint endpoint_;
  double timeout_s_;
};

}  // namespace simulst
