"""Emotion vector model: es = f . EM, pick the emotion with the smallest score."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import weighting
from .patterns import Pattern, PatternMatcher

MAGIC = "#emopattern-model\t1"


class ModelError(ValueError):
    pass


@dataclass
class EmotionScores:
    es: np.ndarray
    matched: int


@dataclass
class EvmModel:
    """Rank matrix EM with rows in ``patterns`` order and columns in ``emotions`` order.

    ``fallback`` is the emotion returned for documents no pattern matches;
    None means abstain.
    """

    patterns: list
    emotions: list
    em: np.ndarray
    fallback: Optional[str] = None
    clusters: Optional[dict] = None
    generalize: bool = False
    _matcher: PatternMatcher = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.em = np.asarray(self.em, dtype=np.int64).reshape(len(self.patterns), len(self.emotions))
        if self.fallback is not None and self.fallback not in self.emotions:
            raise ModelError(f"fallback {self.fallback!r} is not a model emotion")

    @property
    def matcher(self):
        if self._matcher is None:
            self._matcher = PatternMatcher(self.patterns, self.clusters, self.generalize)
        return self._matcher

    @classmethod
    def from_counts(cls, counts, fallback=None):
        """Rank the pf-ief scores; rows are stored sorted by pattern surface."""
        ranks = weighting.rank(weighting.score(counts))
        order = sorted(range(len(counts.patterns)), key=lambda i: counts.patterns[i].surface)
        return cls([counts.patterns[i] for i in order], list(counts.emotions), ranks[order], fallback)


def frequency_vector(doc, model):
    return model.matcher.counts(doc)


def scores(f, em):
    """Exact integer es = f . EM."""
    return np.asarray(f, dtype=np.int64) @ np.asarray(em, dtype=np.int64)


def classify(doc, model):
    """Return ``(emotion or None, EmotionScores)``.

    Ties go to the earlier emotion in model order.
    """
    f = frequency_vector(doc, model)
    es = scores(f, model.em)
    matched = int(np.count_nonzero(f))
    if matched == 0:
        return model.fallback, EmotionScores(es, 0)
    return model.emotions[int(np.argmin(es))], EmotionScores(es, matched)


def classify_all(docs, model):
    return [classify(d, model) for d in docs]


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(MAGIC + "\n")
        fh.write("#emotions\t" + "\t".join(model.emotions) + "\n")
        fh.write(f"#patterns\t{len(model.patterns)}\n")
        for p, row in zip(model.patterns, model.em):
            fh.write(p.surface + "\t" + "\t".join(str(int(r)) for r in row) + "\n")


def load_model(path, fallback=None):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if len(lines) < 3 or lines[0] != MAGIC:
        raise ModelError(f"{path}: not an emopattern model file")
    head_e = lines[1].split("\t")
    head_n = lines[2].split("\t")
    if head_e[0] != "#emotions" or head_n[0] != "#patterns":
        raise ModelError(f"{path}: bad header")
    emotions = head_e[1:]
    n = int(head_n[1])
    rows = [l for l in lines[3:] if l]
    if len(rows) != n:
        raise ModelError(f"{path}: header says {n} patterns, found {len(rows)}")
    patterns, em = [], []
    for lineno, line in enumerate(rows, 4):
        parts = line.split("\t")
        if len(parts) != len(emotions) + 1:
            raise ModelError(f"{path}:{lineno}: expected {len(emotions)} ranks")
        patterns.append(Pattern.from_surface(parts[0]))
        em.append([int(x) for x in parts[1:]])
    return EvmModel(patterns, emotions, np.asarray(em, dtype=np.int64).reshape(n, len(emotions)), fallback)
