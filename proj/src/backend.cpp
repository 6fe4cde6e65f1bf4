// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/backend.hpp"

#include "simulst/errors.hpp"
#include "simulst/remote_decoder.hpp"

namespace simulst {

BackendSpec BackendSpec::parse(const std::string& text) {
  BackendSpec spec;
  std::size_t colon = text.find(':');
  std::string name = colon == std::string::npos ? text : text.substr(0, colon);
  std::string argument = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (name == "scripted") {
    spec.kind = Kind::kScripted;
    spec.argument = argument;
    return spec;
  }
  if (name == "toy") {
    if (argument.empty()) {
      throw ArgumentError("toy backend needs a spec file: toy:<path>");
    }
    spec.kind = Kind::kToy;
    spec.argument = argument;
    return spec;
  }
  if (name == "remote") {
    if (argument.empty()) {
      throw ArgumentError("remote backend needs an address: remote:<host:port>");
    }
    net::parse_endpoint(argument);  // validate eagerly
    spec.kind = Kind::kRemote;
    spec.argument = argument;
    return spec;
  }
  throw ArgumentError("unknown backend '" + text +
                      "' (expected scripted[:path], toy:<path>, or remote:<host:port>)");
}

std::string BackendSpec::to_string() const {
  switch (kind) {
    case Kind::kScripted:
      return argument.empty() ? "scripted" : "scripted:" + argument;
    case Kind::kToy:
      return "toy:" + argument;
    case Kind::kRemote:
      return "remote:" + argument;
  }
  return "scripted";
}

std::shared_ptr<DecoderFactory> make_decoder_factory(const BackendSpec& spec, double timeout_s) {
  switch (spec.kind) {
    case BackendSpec::Kind::kScripted:
      if (spec.argument.empty()) {
        throw ArgumentError(
            "bare 'scripted' backend carries no transcript; use scripted:<path> or supply "
            "per-utterance scripts");
      }
      return std::make_shared<ScriptedDecoderFactory>(ScriptTranscript::load(spec.argument));
    case BackendSpec::Kind::kToy:
      return std::make_shared<ToyDecoderFactory>(ToyTranslatorSpec::load(spec.argument));
    case BackendSpec::Kind::kRemote:
      return std::make_shared<RemoteDecoderFactory>(net::parse_endpoint(spec.argument),
                                                    timeout_s);
  }
  throw ArgumentError("unhandled backend kind");
}

}  // namespace simulst
