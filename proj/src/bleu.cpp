// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/bleu.hpp"

#include <cmath>
#include <cstddef>
#include <exception>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "simulst/errors.hpp"

namespace simulst {
namespace {

// Sentinel for log(0): large enough that one zero precision drives the
// geometric mean (and therefore the score) to exactly 0 after exp().
constexpr double kLogZero = -9999999999.0;

bool is_ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }

// Punctuation class split unconditionally by the 13a rules: the ASCII ranges
// {-~, [-`, space-&, (-+, :-@ plus the slash. Everything here is a single
// byte, so byte-wise scanning matches character-wise scanning.
bool is_13a_symbol(unsigned char c) {
  return (c >= 0x7b && c <= 0x7e) || (c >= 0x5b && c <= 0x60) || (c >= 0x20 && c <= 0x26) ||
         (c >= 0x28 && c <= 0x2b) || (c >= 0x3a && c <= 0x40) || c == '/';
}

// Left-to-right, non-overlapping literal replacement.
void replace_all(std::string& text, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

// " x " around every symbol in the unconditional punctuation class.
std::string pad_symbols(const std::string& text) {
  std::string out;
  out.reserve(text.size() * 2);
  for (unsigned char c : text) {
    if (is_13a_symbol(c)) {
      out += ' ';
      out += static_cast<char>(c);
      out += ' ';
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

// Split "X." / "X," after a non-digit: "X. " stays glued only inside numbers.
// Matches consume both bytes, so "a.b.c" tokenizes both periods.
std::string split_period_after_nondigit(const std::string& text) {
  std::string out;
  out.reserve(text.size() * 2);
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (i + 1 < text.size() && !is_ascii_digit(c) &&
        (text[i + 1] == '.' || text[i + 1] == ',')) {
      out += static_cast<char>(c);
      out += ' ';
      out += text[i + 1];
      out += ' ';
      i += 2;
    } else {
      out += static_cast<char>(c);
      i += 1;
    }
  }
  return out;
}

// Split ".X" / ",X" before a non-digit.
std::string split_period_before_nondigit(const std::string& text) {
  std::string out;
  out.reserve(text.size() * 2);
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (i + 1 < text.size() && (c == '.' || c == ',') &&
        !is_ascii_digit(static_cast<unsigned char>(text[i + 1]))) {
      out += ' ';
      out += c;
      out += ' ';
      out += text[i + 1];
      i += 2;
    } else {
      out += c;
      i += 1;
    }
  }
  return out;
}

// Split a dash that follows a digit ("10-year" -> "10 - year").
std::string split_dash_after_digit(const std::string& text) {
  std::string out;
  out.reserve(text.size() * 2);
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (i + 1 < text.size() && is_ascii_digit(c) && text[i + 1] == '-') {
      out += static_cast<char>(c);
      out += ' ';
      out += '-';
      out += ' ';
      i += 2;
    } else {
      out += static_cast<char>(c);
      i += 1;
    }
  }
  return out;
}

// Decodes the UTF-8 code point starting at `i` and advances `i` past it.
// Malformed bytes decode as themselves so that splitting degrades gracefully.
char32_t next_codepoint(std::string_view text, std::size_t& i) {
  unsigned char b0 = static_cast<unsigned char>(text[i]);
  std::size_t remaining = text.size() - i;
  if (b0 < 0x80) {
    i += 1;
    return b0;
  }
  auto continuation = [&](std::size_t k) {
    return k < remaining && (static_cast<unsigned char>(text[i + k]) & 0xc0) == 0x80;
  };
  if ((b0 & 0xe0) == 0xc0 && continuation(1)) {
    char32_t cp = (static_cast<char32_t>(b0 & 0x1f) << 6) |
                  (static_cast<unsigned char>(text[i + 1]) & 0x3f);
    i += 2;
    return cp;
  }
  if ((b0 & 0xf0) == 0xe0 && continuation(1) && continuation(2)) {
    char32_t cp = (static_cast<char32_t>(b0 & 0x0f) << 12) |
                  (static_cast<char32_t>(static_cast<unsigned char>(text[i + 1]) & 0x3f) << 6) |
                  (static_cast<unsigned char>(text[i + 2]) & 0x3f);
    i += 3;
    return cp;
  }
  if ((b0 & 0xf8) == 0xf0 && continuation(1) && continuation(2) && continuation(3)) {
    char32_t cp = (static_cast<char32_t>(b0 & 0x07) << 18) |
                  (static_cast<char32_t>(static_cast<unsigned char>(text[i + 1]) & 0x3f) << 12) |
                  (static_cast<char32_t>(static_cast<unsigned char>(text[i + 2]) & 0x3f) << 6) |
                  (static_cast<unsigned char>(text[i + 3]) & 0x3f);
    i += 4;
    return cp;
  }
  i += 1;
  return b0;
}

bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case 0x09:
    case 0x0a:
    case 0x0b:
    case 0x0c:
    case 0x0d:
    case 0x1c:
    case 0x1d:
    case 0x1e:
    case 0x1f:
    case 0x20:
    case 0x85:
    case 0xa0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202f:
    case 0x205f:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200a;
  }
}

void validate_config(const BleuConfig& config) {
  if (config.max_ngram_order < 1 || config.max_ngram_order > 9) {
    throw ArgumentError("BLEU n-gram order must be in [1, 9], got " +
                        std::to_string(config.max_ngram_order));
  }
}

std::vector<std::string> tokenize_line(std::string_view raw, const BleuConfig& config) {
  std::string line(rstrip_unicode(raw));
  if (config.lowercase) {
    for (char& c : line) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
  }
  if (config.tokenization == BleuConfig::Tokenization::k13a) {
    return tokenize_13a(line);
  }
  return split_unicode_whitespace(line);
}

// Clipped n-gram matches of one tokenized hypothesis against one reference.
void accumulate_pair_stats(const std::vector<std::string>& hyp_tokens,
                           const std::vector<std::string>& ref_tokens, int max_order,
                           BleuStats& stats) {
  stats.sys_len += static_cast<std::int64_t>(hyp_tokens.size());
  stats.ref_len += static_cast<std::int64_t>(ref_tokens.size());

  // Tokens never contain whitespace, so joining with a space is injective.
  auto join = [](const std::vector<std::string>& tokens, std::size_t begin, std::size_t n) {
    std::string key = tokens[begin];
    for (std::size_t k = 1; k < n; ++k) {
      key += ' ';
      key += tokens[begin + k];
    }
    return key;
  };

  std::unordered_map<std::string, std::int64_t> ref_counts;
  for (int n = 1; n <= max_order; ++n) {
    if (ref_tokens.size() < static_cast<std::size_t>(n)) break;
    for (std::size_t i = 0; i + n <= ref_tokens.size(); ++i) {
      ref_counts[join(ref_tokens, i, static_cast<std::size_t>(n))] += 1;
    }
  }

  std::unordered_map<std::string, std::int64_t> hyp_counts;
  for (int n = 1; n <= max_order; ++n) {
    if (hyp_tokens.size() < static_cast<std::size_t>(n)) break;
    for (std::size_t i = 0; i + n <= hyp_tokens.size(); ++i) {
      hyp_counts[join(hyp_tokens, i, static_cast<std::size_t>(n))] += 1;
    }
    // Totals can be derived without the map, but clipping needs the counts.
  }
  for (const auto& [ngram, count] : hyp_counts) {
    int n = 1;
    for (char c : ngram) {
      if (c == ' ') ++n;
    }
    auto it = ref_counts.find(ngram);
    std::int64_t matched = it == ref_counts.end() ? 0 : std::min(count, it->second);
    stats.correct[static_cast<std::size_t>(n - 1)] += matched;
    stats.total[static_cast<std::size_t>(n - 1)] += count;
  }
}

}  // namespace

std::vector<std::string> split_unicode_whitespace(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  std::size_t token_begin = 0;
  bool in_token = false;
  while (i < line.size()) {
    std::size_t cp_begin = i;
    char32_t cp = next_codepoint(line, i);
    if (is_unicode_space(cp)) {
      if (in_token) {
        tokens.emplace_back(line.substr(token_begin, cp_begin - token_begin));
        in_token = false;
      }
    } else if (!in_token) {
      token_begin = cp_begin;
      in_token = true;
    }
  }
  if (in_token) {
    tokens.emplace_back(line.substr(token_begin));
  }
  return tokens;
}

std::string_view rstrip_unicode(std::string_view line) {
  std::size_t keep = 0;
  std::size_t i = 0;
  while (i < line.size()) {
    char32_t cp = next_codepoint(line, i);
    if (!is_unicode_space(cp)) {
      keep = i;
    }
  }
  return line.substr(0, keep);
}

std::vector<std::string> tokenize_13a(std::string_view line) {
  std::string norm(line);
  replace_all(norm, "<skipped>", "");
  replace_all(norm, "-\n", "");
  replace_all(norm, "\n", " ");
  replace_all(norm, "&quot;", "\"");
  replace_all(norm, "&amp;", "&");
  replace_all(norm, "&lt;", "<");
  replace_all(norm, "&gt;", ">");
  norm = " " + norm + " ";
  norm = pad_symbols(norm);
  norm = split_period_after_nondigit(norm);
  norm = split_period_before_nondigit(norm);
  norm = split_dash_after_digit(norm);
  return split_unicode_whitespace(norm);
}

BleuStats::BleuStats(int max_ngram_order)
    : correct(static_cast<std::size_t>(max_ngram_order), 0),
      total(static_cast<std::size_t>(max_ngram_order), 0) {}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  if (correct.size() != other.correct.size()) {
    throw ArgumentError("cannot combine BLEU statistics of different n-gram orders");
  }
  for (std::size_t n = 0; n < correct.size(); ++n) {
    correct[n] += other.correct[n];
    total[n] += other.total[n];
  }
  sys_len += other.sys_len;
  ref_len += other.ref_len;
  return *this;
}

BleuStats sentence_stats(std::string_view hypothesis, std::string_view reference,
                         const BleuConfig& config) {
  validate_config(config);
  BleuStats stats(config.max_ngram_order);
  accumulate_pair_stats(tokenize_line(hypothesis, config), tokenize_line(reference, config),
                        config.max_ngram_order, stats);
  return stats;
}

BleuStats corpus_stats_serial(std::span<const std::string> hypotheses,
                              std::span<const std::string> references,
                              const BleuConfig& config) {
  validate_config(config);
  if (hypotheses.size() != references.size()) {
    throw PairingError("corpus has " + std::to_string(hypotheses.size()) + " hypotheses but " +
                       std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) {
    throw ArgumentError("BLEU of an empty corpus is undefined");
  }
  BleuStats stats(config.max_ngram_order);
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    accumulate_pair_stats(tokenize_line(hypotheses[i], config),
                          tokenize_line(references[i], config), config.max_ngram_order, stats);
  }
  return stats;
}

BleuStats corpus_stats(std::span<const std::string> hypotheses,
                       std::span<const std::string> references, const BleuConfig& config) {
#ifdef _OPENMP
  validate_config(config);
  if (hypotheses.size() != references.size()) {
    throw PairingError("corpus has " + std::to_string(hypotheses.size()) + " hypotheses but " +
                       std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) {
    throw ArgumentError("BLEU of an empty corpus is undefined");
  }
  BleuStats stats(config.max_ngram_order);
  std::exception_ptr failure;
  const std::int64_t count = static_cast<std::int64_t>(hypotheses.size());
#pragma omp parallel
  {
    BleuStats local(config.max_ngram_order);
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < count; ++i) {
      try {
        accumulate_pair_stats(tokenize_line(hypotheses[static_cast<std::size_t>(i)], config),
                              tokenize_line(references[static_cast<std::size_t>(i)], config),
                              config.max_ngram_order, local);
      } catch (...) {
#pragma omp critical(simulst_bleu_failure)
        {
          if (!failure) failure = std::current_exception();
        }
      }
    }
#pragma omp critical(simulst_bleu_merge)
    stats += local;
  }
  if (failure) std::rethrow_exception(failure);
  return stats;
#else
  return corpus_stats_serial(hypotheses, references, config);
#endif
}

double bleu_from_stats(const BleuStats& stats, const BleuConfig& config) {
  validate_config(config);
  const std::size_t order = static_cast<std::size_t>(config.max_ngram_order);
  if (stats.correct.size() != order || stats.total.size() != order) {
    throw ArgumentError("BLEU statistics carry a different n-gram order than the configuration");
  }
  std::vector<double> precisions(order, 0.0);
  double smooth = 1.0;
  for (std::size_t n = 0; n < order; ++n) {
    if (stats.total[n] == 0) break;
    if (stats.correct[n] == 0) {
      if (config.smoothing == BleuConfig::Smoothing::kExp) {
        smooth *= 2.0;
        precisions[n] = 100.0 / (smooth * static_cast<double>(stats.total[n]));
      } else {
        precisions[n] = 0.0;
      }
    } else {
      precisions[n] =
          100.0 * static_cast<double>(stats.correct[n]) / static_cast<double>(stats.total[n]);
    }
  }
  double brevity_penalty = 1.0;
  if (stats.sys_len < stats.ref_len) {
    brevity_penalty =
        stats.sys_len > 0
            ? std::exp(1.0 - static_cast<double>(stats.ref_len) / static_cast<double>(stats.sys_len))
            : 0.0;
  }
  double log_sum = 0.0;
  for (std::size_t n = 0; n < order; ++n) {
    log_sum += precisions[n] == 0.0 ? kLogZero : std::log(precisions[n]);
  }
  return brevity_penalty * std::exp(log_sum / static_cast<double>(order));
}

double corpus_bleu(std::span<const std::string> hypotheses,
                   std::span<const std::string> references, const BleuConfig& config) {
  return bleu_from_stats(corpus_stats(hypotheses, references, config), config);
}

BleuDelta delta_bleu(double system, double baseline) {
  BleuDelta delta;
  delta.difference = baseline - system;
  if (baseline != 0.0) {
    delta.percent_loss = 100.0 * (baseline - system) / baseline;
  }
  return delta;
}

}  // namespace simulst
