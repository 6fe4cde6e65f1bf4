// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/tokens.hpp"

#include <algorithm>

#include "simulst/errors.hpp"

namespace simulst {

TokenSequence::TokenSequence(std::vector<std::string> toks, std::string tag)
    : tokens(std::move(toks)), tokenizer_tag(std::move(tag)) {
  for (const auto& t : tokens) {
    if (t.empty()) throw ArgumentError("TokenSequence must not contain empty tokens");
  }
}

std::string TokenSequence::text() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

static void require_same_tag(const TokenSequence& a, const TokenSequence& b) {
  if (a.tokenizer_tag != b.tokenizer_tag) {
    throw TokenizerMismatchError("tokenizer tag mismatch: '" + a.tokenizer_tag + "' vs '" +
                                 b.tokenizer_tag + "'");
  }
}

bool starts_with(const TokenSequence& seq, const TokenSequence& prefix) {
  require_same_tag(seq, prefix);
  if (prefix.size() > seq.size()) return false;
  return std::equal(prefix.tokens.begin(), prefix.tokens.end(), seq.tokens.begin());
}

TokenSequence longest_common_prefix(const TokenSequence& a, const TokenSequence& b) {
  require_same_tag(a, b);
  std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a.tokens[i] == b.tokens[i]) ++i;
  TokenSequence out;
  out.tokenizer_tag = a.tokenizer_tag;
  out.tokens.assign(a.tokens.begin(), a.tokens.begin() + static_cast<std::ptrdiff_t>(i));
  return out;
}

TokenSequence suffix_from(const TokenSequence& seq, std::size_t from) {
  TokenSequence out;
  out.tokenizer_tag = seq.tokenizer_tag;
  if (from < seq.size()) {
    out.tokens.assign(seq.tokens.begin() + static_cast<std::ptrdiff_t>(from), seq.tokens.end());
  }
  return out;
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t j = text.find(' ', i);
    if (j == std::string::npos) j = text.size();
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

}  // namespace simulst
