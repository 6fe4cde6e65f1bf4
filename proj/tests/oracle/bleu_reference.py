#!/usr/bin/env python3
# Copyright (c) 2026 The simulst Authors
# SPDX-License-Identifier: Apache-2.0
"""Reference BLEU scorer used to freeze golden fixture values.

Implements the WMT scoring signature BLEU+case.mixed+numrefs.1+smooth.exp+tok.13a
directly from the published rule set (mteval-v13a tokenization, NIST exponential
smoothing, multiplicative brevity penalty). Kept deliberately independent of the
C++ implementation: this file is the oracle, the C++ library is the subject.

Usage:
    python3 bleu_reference.py --fixture ../fixtures/bleu_corpus.json \
        --out ../fixtures/bleu_golden.json
"""

import argparse
import json
import math
import re
from collections import Counter

NGRAM_ORDER = 4


def tokenize_13a(line: str) -> str:
    norm = line
    # language-independent part
    norm = norm.replace("<skipped>", "")
    norm = norm.replace("-\n", "")
    norm = norm.replace("\n", " ")
    norm = norm.replace("&quot;", '"')
    norm = norm.replace("&amp;", "&")
    norm = norm.replace("&lt;", "<")
    norm = norm.replace("&gt;", ">")
    # language-dependent part (assuming Western languages)
    norm = " {} ".format(norm)
    norm = re.sub(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])", " \\1 ", norm)
    norm = re.sub(r"([^0-9])([\.,])", "\\1 \\2 ", norm)
    norm = re.sub(r"([\.,])([^0-9])", " \\1 \\2", norm)
    norm = re.sub(r"([0-9])(-)", "\\1 \\2 ", norm)
    norm = re.sub(r"\s+", " ", norm)
    norm = norm.strip()
    return norm


def extract_ngrams(line: str, max_order: int = NGRAM_ORDER) -> Counter:
    ngrams = Counter()
    tokens = line.split()
    for n in range(1, max_order + 1):
        for i in range(0, len(tokens) - n + 1):
            ngrams[" ".join(tokens[i : i + n])] += 1
    return ngrams


def corpus_stats(hyps, refs):
    correct = [0] * NGRAM_ORDER
    total = [0] * NGRAM_ORDER
    sys_len = 0
    ref_len = 0
    for hyp, ref in zip(hyps, refs):
        hyp_tok = tokenize_13a(hyp.rstrip())
        ref_tok = tokenize_13a(ref.rstrip())
        sys_len += len(hyp_tok.split())
        ref_len += len(ref_tok.split())
        ref_ngrams = extract_ngrams(ref_tok)
        sys_ngrams = extract_ngrams(hyp_tok)
        for ngram, cnt in sys_ngrams.items():
            n = ngram.count(" ") + 1
            correct[n - 1] += min(cnt, ref_ngrams.get(ngram, 0))
            total[n - 1] += cnt
    return correct, total, sys_len, ref_len


def my_log(x):
    if x == 0.0:
        return -9999999999
    return math.log(x)


def compute_bleu(correct, total, sys_len, ref_len):
    precisions = [0.0] * NGRAM_ORDER
    smooth_mteval = 1.0
    for n in range(NGRAM_ORDER):
        if total[n] == 0:
            break
        if correct[n] == 0:
            smooth_mteval *= 2
            precisions[n] = 100.0 / (smooth_mteval * total[n])
        else:
            precisions[n] = 100.0 * correct[n] / total[n]
    brevity_penalty = 1.0
    if sys_len < ref_len:
        brevity_penalty = math.exp(1 - ref_len / sys_len) if sys_len > 0 else 0.0
    return brevity_penalty * math.exp(sum(map(my_log, precisions)) / NGRAM_ORDER)


def corpus_bleu(hyps, refs):
    if len(hyps) != len(refs):
        raise ValueError("hypothesis/reference length mismatch")
    return compute_bleu(*corpus_stats(hyps, refs))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--fixture", required=True)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    with open(args.fixture, encoding="utf-8") as f:
        fixture = json.load(f)

    hyps = [p["hyp"] for p in fixture["pairs"]]
    refs = [p["ref"] for p in fixture["pairs"]]

    golden = {
        "scorer": "bleu_reference.py",
        "signature": "BLEU+case.mixed+numrefs.1+smooth.exp+tok.13a",
        "corpus_bleu": corpus_bleu(hyps, refs),
        "first_half_bleu": corpus_bleu(hyps[: len(hyps) // 2], refs[: len(refs) // 2]),
        "per_pair_bleu": [corpus_bleu([h], [r]) for h, r in zip(hyps, refs)],
        "identity_bleu": corpus_bleu(refs, refs),
        "tokenized": {
            "hyps": [tokenize_13a(h.rstrip()).split() for h in hyps],
            "refs": [tokenize_13a(r.rstrip()).split() for r in refs],
        },
    }

    with open(args.out, "w", encoding="utf-8") as f:
        json.dump(golden, f, ensure_ascii=False, indent=1)
        f.write("\n")
    print(f"wrote {args.out}: corpus_bleu={golden['corpus_bleu']:.6f}")


if __name__ == "__main__":
    main()
