// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace simulst {

/// Corpus BLEU signature. Defaults reproduce the classic WMT configuration:
/// mixed case, one reference per hypothesis, exponential (mteval-style)
/// smoothing of zero n-gram counts, and the "13a" international tokenizer.
struct BleuConfig {
  int max_ngram_order = 4;
  /// When true, hypothesis and reference are lowercased (ASCII only) before
  /// tokenization. The standard signature keeps mixed case.
  bool lowercase = false;
  enum class Smoothing { kExp, kNone };
  Smoothing smoothing = Smoothing::kExp;
  enum class Tokenization { k13a, kWhitespace };
  Tokenization tokenization = Tokenization::k13a;
};

/// "13a" tokenizer: normalizes a handful of SGML entities, strips skipped
/// markup, then splits punctuation from words the way the classic mteval-v13a
/// script does (symbols always split; periods and commas split unless they
/// sit between digits; dashes split when preceded by a digit). The final
/// split is on Unicode whitespace.
std::vector<std::string> tokenize_13a(std::string_view line);

/// Splits on Unicode whitespace, dropping empty fields (the `\s+` split used
/// both as the 13a finale and as the bare "whitespace" tokenization mode).
std::vector<std::string> split_unicode_whitespace(std::string_view line);

/// Removes trailing Unicode whitespace. Scoring trims line ends so that
/// newline-terminated and bare lines score identically.
std::string_view rstrip_unicode(std::string_view line);

/// Sufficient statistics for corpus BLEU: per-order matched and total n-gram
/// counts plus hypothesis/reference token lengths. Statistics of a corpus are
/// the element-wise sum over its sentence pairs, which makes the corpus score
/// independent of sentence order.
struct BleuStats {
  std::vector<std::int64_t> correct;
  std::vector<std::int64_t> total;
  std::int64_t sys_len = 0;
  std::int64_t ref_len = 0;

  BleuStats() = default;
  explicit BleuStats(int max_ngram_order);

  BleuStats& operator+=(const BleuStats& other);
  bool operator==(const BleuStats&) const = default;
};

/// Statistics of one hypothesis/reference pair (clipped n-gram matches).
BleuStats sentence_stats(std::string_view hypothesis, std::string_view reference,
                         const BleuConfig& config = BleuConfig{});

/// Statistics of a corpus; requires equally many hypotheses and references
/// (throws PairingError otherwise) and at least one pair (ArgumentError).
/// The plain entry point parallelizes over sentence pairs when OpenMP is
/// available; the _serial variant is the reference implementation.
BleuStats corpus_stats(std::span<const std::string> hypotheses,
                       std::span<const std::string> references,
                       const BleuConfig& config = BleuConfig{});
BleuStats corpus_stats_serial(std::span<const std::string> hypotheses,
                              std::span<const std::string> references,
                              const BleuConfig& config = BleuConfig{});

/// Score in [0, 100] from accumulated statistics: brevity penalty times the
/// geometric mean of modified n-gram precisions, with exponential smoothing
/// of zero match counts when configured.
double bleu_from_stats(const BleuStats& stats, const BleuConfig& config = BleuConfig{});

/// Corpus BLEU of paired hypothesis/reference lines.
double corpus_bleu(std::span<const std::string> hypotheses,
                   std::span<const std::string> references,
                   const BleuConfig& config = BleuConfig{});

/// Quality loss of `system` relative to `baseline` in BLEU points (positive
/// when the system scores lower), plus the loss as a share of the baseline in
/// percent. The percent is meaningless for a zero baseline and is left empty.
struct BleuDelta {
  double difference = 0.0;
  std::optional<double> percent_loss;
};
BleuDelta delta_bleu(double system, double baseline);

}  // namespace simulst
