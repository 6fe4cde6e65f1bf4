// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace simulst {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Two token sequences with different tokenizer tags were compared.
class TokenizerMismatchError : public Error {
 public:
  using Error::Error;
};

/// A chunk arrived out of order, or an operation hit a finished session.
class SequencingError : public Error {
 public:
  using Error::Error;
};

/// finish/offline decode invoked with no input, or duplicate finish.
class EmptySessionError : public Error {
 public:
  using Error::Error;
};

/// A decoder returned a hypothesis that does not extend the committed prefix.
class ContractViolationError : public Error {
 public:
  using Error::Error;
};

/// A scripted transcript has no entry for the requested chunk count.
class ScriptExhaustedError : public Error {
 public:
  using Error::Error;
};

/// The toy translator saw a source token outside its vocabulary.
class VocabularyError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument value (out-of-range ratio, nonpositive baseline, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent manifest / fixture / config file.
class ManifestError : public Error {
 public:
  using Error::Error;
};

/// System and baseline record sets do not cover the same utterance ids.
class PairingError : public Error {
 public:
  using Error::Error;
};

/// Connection-level failure (refused, reset, EOF mid-message). Retriable.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// A remote peer exceeded the configured deadline.
class TimeoutError : public TransportError {
 public:
  using TransportError::TransportError;
};

/// The remote peer answered with garbage or an error payload. Not retriable.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace simulst
