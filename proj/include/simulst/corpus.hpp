// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "simulst/tokens.hpp"

namespace simulst {

/// Audio source referenced by path; frames are never embedded in manifests.
struct FrameRef {
  std::string path;
  std::uint64_t count = 0;

  bool operator==(const FrameRef&) const = default;
};

/// One training example: a source (audio frames by reference, or source
/// text tokens) paired with a target token sequence. Partial examples carry
/// the truncation ratio they were built with; full examples carry none.
struct CorpusExample {
  enum class Kind { kFull, kPartial };

  std::string id;
  std::variant<FrameRef, TokenSequence> source;
  TokenSequence target;
  Kind kind = Kind::kFull;
  std::optional<double> ratio;

  bool operator==(const CorpusExample&) const = default;
};

/// Output of build_mix: examples in final (shuffled) order plus audit stats.
struct MixManifest {
  std::vector<CorpusExample> examples;
  std::uint64_t seed = 0;
  std::uint64_t full_count = 0;
  std::uint64_t partial_count = 0;
  /// Ratio histogram over equal-width bins spanning [lo, hi].
  std::vector<std::uint64_t> ratio_histogram;
};

/// Bounds of the truncation-ratio draw.
struct RatioRange {
  double lo = 0.10;
  double hi = 0.40;
};

/// Truncates a full example to its leading part: the target keeps
/// max(1, floor(ratio * |target|)) tokens and the source the same share of
/// its frames (or source tokens). The id gains a "#partial" suffix.
/// Throws ArgumentError when the example is not full or the ratio is outside
/// the configured range.
CorpusExample make_partial(const CorpusExample& example, double ratio,
                           const RatioRange& range = RatioRange{});

/// For every full input example emits the original plus one partial twin
/// with a ratio drawn uniformly from [range.lo, range.hi], then shuffles the
/// combined list; all randomness comes from `seed`, so equal inputs and seed
/// reproduce the manifest byte for byte. Throws ArgumentError on an empty or
/// non-full corpus and ManifestError on duplicate ids.
MixManifest build_mix(const std::vector<CorpusExample>& corpus, std::uint64_t seed,
                      const RatioRange& range = RatioRange{});

/// JSONL serialization, one example per line:
/// {"id", "source": {"frames": path, "count": n} | {"tokens": [...]},
///  "target": [...], "kind": "full"|"partial", "ratio": r}.
/// "kind" and "ratio" are absent from full-corpus inputs written by hand;
/// kind defaults to full.
std::string to_jsonl_line(const CorpusExample& example);
CorpusExample example_from_jsonl_line(const std::string& line);
std::vector<CorpusExample> load_corpus_jsonl(const std::string& path);
void save_corpus_jsonl(const std::vector<CorpusExample>& examples, const std::string& path);

}  // namespace simulst
