"""Evaluation: confusion matrices, F1 reports, pattern coverage, TF-IDF baseline."""

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .patterns import PatternMatcher

ABSTAIN = None


class EvaluationError(ValueError):
    pass


@dataclass
class ConfusionMatrix:
    """Rows are gold labels, columns predicted labels plus a final abstain column."""

    labels: list
    counts: np.ndarray

    @classmethod
    def from_pairs(cls, gold, pred, labels):
        labels = list(labels)
        col = {lab: i for i, lab in enumerate(labels)}
        counts = np.zeros((len(labels), len(labels) + 1), dtype=np.int64)
        for g, p in zip(gold, pred, strict=True):
            if g not in col:
                raise EvaluationError(f"gold label {g!r} not in label set")
            if p is not ABSTAIN and p not in col:
                raise EvaluationError(f"predicted label {p!r} not in label set")
            counts[col[g], len(labels) if p is ABSTAIN else col[p]] += 1
        return cls(labels, counts)

    @property
    def total(self):
        return int(self.counts.sum())

    @property
    def abstained(self):
        return int(self.counts[:, -1].sum())


@dataclass
class F1Report:
    labels: list
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    macro_f1: float
    weighted_f1: float
    abstained: int = 0

    @property
    def zero_support(self):
        return [lab for lab, s in zip(self.labels, self.support) if s == 0]

    def to_records(self, prefix=None):
        recs = []
        for i, lab in enumerate(self.labels):
            recs.append({
                "type": "class", "model": prefix, "emotion": lab,
                "precision": float(self.precision[i]), "recall": float(self.recall[i]),
                "f1": float(self.f1[i]), "support": int(self.support[i]),
                "zero_support": bool(self.support[i] == 0),
            })
        recs.append({
            "type": "summary", "model": prefix, "macro_f1": self.macro_f1,
            "weighted_f1": self.weighted_f1, "abstained": self.abstained,
            "n": int(self.support.sum()),
        })
        return recs


def _div(a, b):
    return a / b if b else 0.0


def f1_report(cm):
    """Per-class precision/recall/F1 with 0 for empty denominators.

    Abstentions only add false negatives to their gold class.
    """
    m = len(cm.labels)
    c = cm.counts
    tp = np.diag(c[:, :m])
    fp = c[:, :m].sum(axis=0) - tp
    support = c.sum(axis=1)
    fn = support - tp
    precision = np.array([_div(tp[i], tp[i] + fp[i]) for i in range(m)])
    recall = np.array([_div(tp[i], tp[i] + fn[i]) for i in range(m)])
    f1 = np.array([_div(2 * tp[i], 2 * tp[i] + fp[i] + fn[i]) for i in range(m)])
    macro = float(f1.mean()) if m else 0.0
    weighted = float(_div(float((f1 * support).sum()), float(support.sum())))
    return F1Report(list(cm.labels), precision, recall, f1, support, macro, weighted, cm.abstained)


def evaluate_predictions(gold, pred, labels):
    return f1_report(ConfusionMatrix.from_pairs(gold, pred, labels))


def coverage(docs, patterns):
    """Fraction of documents with at least one pattern match."""
    docs = list(docs)
    if not docs or not patterns:
        return 0.0
    matcher = PatternMatcher(patterns)
    hit = sum(bool(matcher.counts(d).any()) for d in docs)
    return hit / len(docs)


class TfidfSgdClassifier:
    """Unigram TF-IDF features with one-vs-rest hinge-loss SGD.

    idf = ln((1 + N) / (1 + df)) + 1 and rows are L2-normalized.  The step
    size follows eta0 / (1 + eta0 * alpha * t) with L2 shrinkage alpha.
    """

    def __init__(self, epochs=10, seed=0, alpha=1e-4, eta0=0.5):
        self.epochs = epochs
        self.seed = seed
        self.alpha = alpha
        self.eta0 = eta0

    def _features(self, docs):
        rows = []
        for d in docs:
            tf = Counter(t for t in d.tokens if t in self.vocab_)
            idx = np.array(sorted(self.vocab_[t] for t in tf), dtype=np.int64)
            val = np.array([tf[self.words_[i]] * self.idf_[i] for i in idx], dtype=np.float64)
            norm = math.sqrt(float(val @ val)) if val.size else 0.0
            rows.append((idx, val / norm if norm else val))
        return rows

    def fit(self, docs, labels=None):
        docs = [d for d in docs if d.label is not None]
        present = sorted({d.label for d in docs})
        self.classes_ = list(labels) if labels is not None else present
        if len(present) < 2:
            raise EvaluationError("baseline needs at least two classes in training data")
        df = Counter()
        for d in docs:
            df.update(set(d.tokens))
        self.words_ = sorted(df)
        self.vocab_ = {w: i for i, w in enumerate(self.words_)}
        n = len(docs)
        self.idf_ = np.array([math.log((1 + n) / (1 + df[w])) + 1.0 for w in self.words_])
        X = self._features(docs)
        cls_idx = {c: i for i, c in enumerate(self.classes_)}
        y = np.array([cls_idx[d.label] for d in docs])

        n_cls = len(self.classes_)
        W = np.zeros((n_cls, len(self.words_)))
        b = np.zeros(n_cls)
        rng = np.random.default_rng(self.seed)
        t = 0
        for _ in range(self.epochs):
            for r in rng.permutation(n):
                idx, val = X[r]
                eta = self.eta0 / (1.0 + self.eta0 * self.alpha * t)
                sign = np.where(np.arange(n_cls) == y[r], 1.0, -1.0)
                margin = sign * (W[:, idx] @ val + b)
                W *= 1.0 - eta * self.alpha
                viol = np.flatnonzero(margin < 1.0)
                if viol.size:
                    W[np.ix_(viol, idx)] += eta * sign[viol, None] * val[None, :]
                    b[viol] += eta * sign[viol]
                t += 1
        self.coef_, self.intercept_ = W, b
        self.trained_classes_ = set(present)
        return self

    def decision_function(self, docs):
        X = self._features(docs)
        return np.array([self.coef_[:, idx] @ val + self.intercept_ for idx, val in X])

    def predict(self, docs):
        docs = list(docs)
        if not docs:
            return []
        return [self.classes_[i] for i in np.argmax(self.decision_function(docs), axis=1)]


def tfidf_baseline(train, test, epochs=10, seed=0, labels=None):
    """Train the TF-IDF/SGD baseline on ``train`` and report F1 on ``test``."""
    train = [d for d in train if d.label is not None]
    test = [d for d in test if d.label is not None]
    clf = TfidfSgdClassifier(epochs=epochs, seed=seed).fit(train, labels)
    missing = sorted({d.label for d in test} - clf.trained_classes_)
    if missing:
        raise EvaluationError(f"test labels absent from training: {missing}")
    pred = clf.predict(test)
    return evaluate_predictions([d.label for d in test], pred, clf.classes_)
