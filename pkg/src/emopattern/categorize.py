"""Token categorization into connector words and subject words.

The pruned emotion graph is symmetrized into a 0/1 adjacency matrix.
Eigenvector centrality singles out connector words; the (size-scaled) local
clustering coefficient singles out subject words.
"""

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

logger = logging.getLogger(__name__)

CW = "CW"
SW = "SW"


class NonConvergence(RuntimeError):
    def __init__(self, iterations):
        super().__init__(f"power iteration did not converge after {iterations} iterations")
        self.iterations = iterations


@dataclass
class AdjacencyMatrix:
    """Symmetric 0/1 matrix in CSR form (sorted columns, empty diagonal)."""

    nodes: list
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def n(self):
        return len(self.nodes)

    def degree(self):
        return np.diff(self.indptr)

    def dense(self):
        m = np.zeros((self.n, self.n), dtype=np.int64)
        rows = np.repeat(np.arange(self.n), self.degree())
        m[rows, self.indices] = 1
        return m

    @classmethod
    def from_dense(cls, matrix, nodes=None):
        m = np.asarray(matrix)
        n = m.shape[0]
        nodes = list(range(n)) if nodes is None else list(nodes)
        src, dst = np.nonzero((m != 0) | (m.T != 0))
        keep = src != dst
        return cls._from_pairs(nodes, src[keep], dst[keep])

    @classmethod
    def _from_pairs(cls, nodes, src, dst):
        n = len(nodes)
        key = np.unique(np.asarray(src, dtype=np.int64) * n + np.asarray(dst, dtype=np.int64))
        rows, cols = np.divmod(key, n) if n else (key, key)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(nodes, indptr, cols.astype(np.int64))


@dataclass
class NodeScores:
    nodes: list
    centrality: np.ndarray
    clustering: np.ndarray
    iterations: int = 0

    def as_maps(self):
        return (dict(zip(self.nodes, self.centrality.tolist())),
                dict(zip(self.nodes, self.clustering.tolist())))


@dataclass
class TokenSets:
    connector: set = field(default_factory=set)
    subject: set = field(default_factory=set)

    def kind(self, token):
        if token in self.connector:
            return CW
        if token in self.subject:
            return SW
        return None


def adjacency(g):
    """Undirected 0/1 adjacency of a (pruned) graph over its sorted nodes."""
    nodes = list(g.nodes)
    ids = {t: i for i, t in enumerate(nodes)}
    src, dst = [], []
    for a, b in g.freq:
        if a == b:
            continue
        i, j = ids[a], ids[b]
        src += (i, j)
        dst += (j, i)
    return AdjacencyMatrix._from_pairs(nodes, src, dst)


def eigenvector_centrality(m, tol=1e-10, max_iter=1000, backend=None):
    """Unit-norm, non-negative principal eigenvector of ``m``.

    Raises NonConvergence when ``max_iter`` iterations are not enough.
    """
    vec, iters, ok = _kernels.power_iteration(m.indptr, m.indices, tol, max_iter, backend)
    if not ok:
        raise NonConvergence(iters)
    logger.debug("power iteration converged in %d iterations", iters)
    return np.abs(vec), iters


def clustering_fractions(m, backend=None):
    """Exact per-node ``(numerator, denominator)`` of the scaled coefficient.

    numerator = ordered linked neighbour pairs; denominator = ordered
    neighbour pairs times the node count.  Degree < 2 yields (0, 1).
    """
    closed, wedges = _kernels.triangle_counts(m.indptr, m.indices, backend)
    den = np.where(wedges > 0, wedges * m.n, 1)
    return closed, den


def clustering_coefficients(m, backend=None):
    num, den = clustering_fractions(m, backend)
    # single correctly-rounded division of exact integers
    return num / den


def score_nodes(m, tol=1e-10, max_iter=1000, backend=None):
    cent, iters = eigenvector_centrality(m, tol, max_iter, backend)
    return NodeScores(list(m.nodes), cent, clustering_coefficients(m, backend), iters)


def resolve_threshold(threshold, values):
    """Turn ``pNN`` (percentile of ``values``) or a number into a float."""
    if isinstance(threshold, str):
        s = threshold.strip().lower()
        if s.startswith("p"):
            q = float(s[1:])
            if not 0 <= q <= 100:
                raise ValueError(f"percentile out of range: {threshold!r}")
            if len(values) == 0:
                return np.inf
            return float(np.percentile(values, q))
        return float(s)
    return float(threshold)


def categorize(scores, phi_eig="p90", phi_cl="p90"):
    """CW = centrality above phi_eig; SW = clustering above phi_cl, minus CW."""
    t_eig = resolve_threshold(phi_eig, scores.centrality)
    t_cl = resolve_threshold(phi_cl, scores.clustering)
    cw = {t for t, c in zip(scores.nodes, scores.centrality) if c > t_eig}
    sw = {t for t, c in zip(scores.nodes, scores.clustering) if c > t_cl} - cw
    if not cw:
        warnings.warn(f"no connector words above threshold {t_eig:g}", stacklevel=2)
    if not sw:
        warnings.warn(f"no subject words above threshold {t_cl:g}", stacklevel=2)
    return TokenSets(cw, sw)


def save_token_sets(sets, scores, path):
    """``token<TAB>CW|SW<TAB>centrality<TAB>clustering`` for categorized tokens."""
    cent, clus = scores.as_maps()
    with open(path, "w", encoding="utf-8") as fh:
        for tok in sorted(sets.connector | sets.subject):
            fh.write(f"{tok}\t{sets.kind(tok)}\t{cent[tok]!r}\t{clus[tok]!r}\n")


def load_token_sets(path):
    sets = TokenSets()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) < 2 or parts[1] not in (CW, SW):
                raise ValueError(f"{path}:{lineno}: expected 'token<TAB>CW|SW...'")
            (sets.connector if parts[1] == CW else sets.subject).add(parts[0])
    return sets
