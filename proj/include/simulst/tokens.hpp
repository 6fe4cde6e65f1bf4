// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace simulst {

/// An ordered list of text tokens plus the tag of the segmentation scheme
/// that produced them. Sequences are only comparable when their tags match;
/// the commit policy works on whatever unit the tag names (words, subwords)
/// and never normalizes token text itself.
struct TokenSequence {
  std::vector<std::string> tokens;
  std::string tokenizer_tag = "word";

  TokenSequence() = default;
  TokenSequence(std::vector<std::string> toks, std::string tag);

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }

  /// Space-joined token text (the display form).
  std::string text() const;

  bool operator==(const TokenSequence& other) const = default;
};

/// True when `prefix` is a (possibly equal) leading slice of `seq`.
/// Throws TokenizerMismatchError when the tags differ.
bool starts_with(const TokenSequence& seq, const TokenSequence& prefix);

/// The maximal sequence that is a prefix of both `a` and `b`.
/// Throws TokenizerMismatchError when the tags differ.
TokenSequence longest_common_prefix(const TokenSequence& a, const TokenSequence& b);

/// Tokens from `seq` starting at position `from` (clamped to size).
TokenSequence suffix_from(const TokenSequence& seq, std::size_t from);

/// Splits text on single spaces, dropping empty fields.
std::vector<std::string> split_tokens(const std::string& text);

}  // namespace simulst
