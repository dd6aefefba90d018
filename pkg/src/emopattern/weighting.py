"""Pattern-frequency / inverse-emotion-frequency scores and per-emotion ranks.

pf(p, e)  = ln((sum_i freq(p_i, e) + 1) / (freq(p, e) + 1))
ief(p, e) = ln((freq(p, e) + 1) / (sum_j freq(p, e_j) + 1))
ps(p, e)  = pf(p, e) * ief(p, e)

The formulas are used as written: pf grows as a pattern gets rarer within an
emotion and ief is never positive, so ps <= 0 and patterns exclusive to an
emotion score 0, the best possible value.
"""

from dataclasses import dataclass

import numpy as np

from .patterns import PatternMatcher


@dataclass
class PatternEmotionCounts:
    patterns: list
    emotions: list
    freq: np.ndarray  # (n_patterns, n_emotions) int64

    @property
    def totals(self):
        return self.freq.sum(axis=0)

    def get(self, p, e):
        return int(self.freq[p, self.emotions.index(e) if isinstance(e, str) else e])


def count(patterns, docs, emotions, clusters=None, generalize=False):
    """freq(p, e) = total matches of p over documents labeled e."""
    emotions = list(emotions)
    col = {e: j for j, e in enumerate(emotions)}
    matcher = PatternMatcher(patterns, clusters, generalize)
    freq = np.zeros((len(matcher), len(emotions)), dtype=np.int64)
    for doc in docs:
        j = col.get(doc.label)
        if j is not None:
            freq[:, j] += matcher.counts(doc)
    return PatternEmotionCounts(list(patterns), emotions, freq)


def _freq(counts):
    return counts.freq if isinstance(counts, PatternEmotionCounts) else np.asarray(counts)


def pf_matrix(counts):
    f = _freq(counts).astype(np.float64)
    return np.log((f.sum(axis=0, keepdims=True) + 1.0) / (f + 1.0))


def ief_matrix(counts):
    f = _freq(counts).astype(np.float64)
    return np.log((f + 1.0) / (f.sum(axis=1, keepdims=True) + 1.0))


def pf(counts, p, e):
    return float(pf_matrix(counts)[p, e])


def ief(counts, p, e):
    return float(ief_matrix(counts)[p, e])


def score(counts):
    """ps = pf * ief for every (pattern, emotion) pair."""
    return pf_matrix(counts) * ief_matrix(counts)


def rank(scores):
    """Dense per-column ranks, 1 for the highest score; equal scores share a rank."""
    scores = np.asarray(scores, dtype=np.float64)
    ranks = np.zeros(scores.shape, dtype=np.int64)
    for j in range(scores.shape[1]):
        uniq, inv = np.unique(-scores[:, j], return_inverse=True)
        ranks[:, j] = inv.ravel() + 1
    return ranks
