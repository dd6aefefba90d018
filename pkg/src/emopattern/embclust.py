"""Word embeddings: loading, tf-idf vocabulary reduction, Ward clustering, validation.

Ward linkage needs squared Euclidean distance.  Vectors are L2-normalized
first, which makes squared Euclidean distance equal to 2 - 2 cos, so merges
follow cosine distance.
"""

import logging
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

logger = logging.getLogger(__name__)


class EmbeddingError(ValueError):
    pass


@dataclass
class EmbeddingTable:
    words: list
    vectors: np.ndarray

    @property
    def dim(self):
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    @property
    def index(self):
        return {w: i for i, w in enumerate(self.words)}

    def subset(self, words):
        idx = self.index
        keep = [w for w in words if w in idx]
        rows = [idx[w] for w in keep]
        return EmbeddingTable(keep, self.vectors[rows].reshape(len(rows), self.dim))


@dataclass
class ClusterAssignment:
    k: int
    assignment: dict
    merge_costs: np.ndarray = field(default=None, repr=False)

    def __contains__(self, word):
        return word in self.assignment

    def get(self, word, default=None):
        return self.assignment.get(word, default)

    def members(self):
        out = {}
        for w, c in sorted(self.assignment.items()):
            out.setdefault(c, []).append(w)
        return out


def load_embeddings(path):
    """Parse ``word v1 ... vd`` lines.  A leading ``count dim`` header is skipped."""
    words, rows = [], []
    seen = set()
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").rstrip().split(" ")
            if not line.strip():
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue
            if len(parts) < 2:
                raise EmbeddingError(f"{path}:{lineno}: malformed line")
            word = parts[0]
            try:
                vec = [float(v) for v in parts[1:]]
            except ValueError:
                raise EmbeddingError(f"{path}:{lineno}: non-numeric vector entry") from None
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise EmbeddingError(f"{path}:{lineno}: expected {dim} values, got {len(vec)}")
            if not all(math.isfinite(v) for v in vec):
                raise EmbeddingError(f"{path}:{lineno}: non-finite value")
            if word in seen:
                warnings.warn(f"{path}:{lineno}: duplicate word {word!r}, keeping first", stacklevel=2)
                continue
            seen.add(word)
            words.append(word)
            rows.append(vec)
    if dim is None:
        raise EmbeddingError(f"{path}: no vectors")
    return EmbeddingTable(words, np.asarray(rows, dtype=np.float64).reshape(len(rows), dim))


def save_embeddings(table, path):
    with open(path, "w", encoding="utf-8") as fh:
        for w, v in zip(table.words, table.vectors):
            fh.write(w + " " + " ".join(repr(float(x)) for x in v) + "\n")


def tfidf_max_scores(docs):
    """Max over documents of count * ln(N / df) for every word."""
    docs = [getattr(d, "tokens", d) for d in docs]
    n = len(docs)
    df = Counter()
    for tokens in docs:
        df.update(set(tokens))
    best = {}
    for tokens in docs:
        for w, tf in Counter(tokens).items():
            s = tf * math.log(n / df[w])
            if s > best.get(w, -1.0):
                best[w] = s
    return best


def reduce_vocab(table, docs, top_n):
    """Keep the ``top_n`` table words with the highest max tf-idf in ``docs``."""
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    scores = tfidf_max_scores(docs)
    ranked = sorted((w for w in scores if w in table), key=lambda w: (-scores[w], w))
    return table.subset(sorted(ranked[:top_n]))


def default_k(n_words, cap=1500):
    return max(1, min(cap, n_words // 4))


def cosine_ward_distances(vectors):
    x = np.asarray(vectors, dtype=np.float64)
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    x = np.divide(x, norms, out=np.zeros_like(x), where=norms > 0)
    sq = np.einsum("ij,ij->i", x, x)
    d = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    d = np.maximum(np.triu(d, 1), 0.0)
    return d + d.T


def cluster(table, k, backend=None):
    """Agglomerative Ward clustering of the table's words into ``k`` clusters.

    Words are sorted before indexing, so the result does not depend on the
    table's word order.  Cluster ids follow the order of each cluster's
    alphabetically first word.
    """
    n = len(table)
    if not 1 <= k <= n:
        raise EmbeddingError(f"k must be in [1, {n}], got {k}")
    order = sorted(range(n), key=lambda i: table.words[i])
    words = [table.words[i] for i in order]
    dist = cosine_ward_distances(table.vectors[order])
    roots, costs = _kernels.ward_agglomerate(dist, k, backend)
    relabel = {r: c for c, r in enumerate(sorted(set(roots.tolist())))}
    return ClusterAssignment(k, {w: relabel[int(r)] for w, r in zip(words, roots)}, costs)


def _entropy(counts):
    counts = np.asarray([c for c in counts if c > 0], dtype=np.float64)
    if counts.size == 0:
        return 0.0
    p = counts / counts.sum()
    return float(-(p * np.log(p)).sum())


def _conditional_entropy(pairs, given):
    """H(X | Y) for ``pairs`` of (x, y); ``given`` selects y's position."""
    joint = Counter(pairs)
    marg = Counter(p[given] for p in pairs)
    n = len(pairs)
    return float(-sum(c / n * math.log(c / marg[key[given]]) for key, c in joint.items()))


def _shared_pairs(assignment, reference):
    a = assignment.assignment if isinstance(assignment, ClusterAssignment) else assignment
    pairs = [(reference[w], a[w]) for w in sorted(a) if w in reference]
    if not pairs:
        raise ValueError("assignment and reference share no words")
    return pairs


def homogeneity(assignment, reference):
    """1 - H(class | cluster) / H(class) over shared words."""
    pairs = _shared_pairs(assignment, reference)
    h_cond = _conditional_entropy(pairs, given=1)
    if h_cond == 0.0:
        return 1.0
    return min(1.0, max(0.0, 1.0 - h_cond / _entropy(Counter(p[0] for p in pairs).values())))


def completeness(assignment, reference):
    """1 - H(cluster | class) / H(cluster) over shared words."""
    pairs = _shared_pairs(assignment, reference)
    h_cond = _conditional_entropy(pairs, given=0)
    if h_cond == 0.0:
        return 1.0
    return min(1.0, max(0.0, 1.0 - h_cond / _entropy(Counter(p[1] for p in pairs).values())))


def save_clusters(assignment, path):
    with open(path, "w", encoding="utf-8") as fh:
        for w in sorted(assignment.assignment):
            fh.write(f"{w}\t{assignment.assignment[w]}\n")


def load_clusters(path):
    mapping = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'word<TAB>cluster_id'")
            mapping[parts[0]] = int(parts[1])
    return ClusterAssignment(len(set(mapping.values())), mapping)


def load_reference(path):
    """``word<TAB>class`` synset file."""
    ref = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'word<TAB>class'")
            ref[parts[0]] = parts[1]
    return ref
