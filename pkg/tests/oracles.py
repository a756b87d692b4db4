"""Independent brute-force oracles.

These deliberately avoid the library's code paths: n-gram counting with plain
dicts and a product-form geometric mean for BLEU, and rational term-by-term
summation for anticipation. They exist to catch the implementations drifting,
so keep them dumb.
"""

import math
from fractions import Fraction


def ngram_counts(tokens, n):
    counts = {}
    for start in range(0, len(tokens) - n + 1):
        gram = tuple(tokens[start : start + n])
        counts[gram] = counts.get(gram, 0) + 1
    return counts


def bleu_oracle(hyps, refs):
    """Corpus BLEU-4, no smoothing, 0-100 scale."""
    assert len(hyps) == len(refs)
    match = {n: 0 for n in range(1, 5)}
    total = {n: 0 for n in range(1, 5)}
    hyp_len = sum(len(h) for h in hyps)
    ref_len = sum(len(r) for r in refs)
    for hyp, ref in zip(hyps, refs):
        for n in range(1, 5):
            hyp_counts = ngram_counts(hyp, n)
            ref_counts = ngram_counts(ref, n)
            for gram, count in hyp_counts.items():
                match[n] += min(count, ref_counts.get(gram, 0))
                total[n] += count
    if hyp_len == 0:
        return 0.0
    precisions = []
    for n in range(1, 5):
        if total[n] == 0 or match[n] == 0:
            return 0.0
        precisions.append(match[n] / total[n])
    geo_mean = (precisions[0] * precisions[1] * precisions[2] * precisions[3]) ** 0.25
    if hyp_len >= ref_len:
        brevity = 1.0
    else:
        brevity = math.exp(1.0 - ref_len / hyp_len)
    return 100.0 * brevity * geo_mean


def aa_oracle(links):
    """Average anticipation by direct rational enumeration of the terms."""
    assert len(links) > 0
    total = Fraction(0)
    for i, j in links:
        if i - j > 0:
            total += i - j
    return total / len(links)


def al_oracle(g, source_len):
    """Average lagging by literal rational evaluation of the definition."""
    target_len = len(g)
    assert target_len >= 1 and source_len >= 1
    cutoff = target_len
    for t in range(1, target_len + 1):
        if g[t - 1] == source_len:
            cutoff = t
            break
    rate = Fraction(target_len, source_len)
    acc = Fraction(0)
    for t in range(1, cutoff + 1):
        acc += Fraction(g[t - 1]) - Fraction(t - 1) / rate
    return acc / cutoff
