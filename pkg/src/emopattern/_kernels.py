"""Hot numeric kernels.

Every kernel exists twice: a loop version compiled with numba and a
vectorized numpy/scipy version.  ``EMOPATTERN_BACKEND=numpy`` (or a missing
numba install) selects the fallback; anything else uses numba.  Both paths
implement identical arithmetic and tie-breaking, so results agree exactly for
the integer and merge kernels and to round-off for power iteration.
"""

import logging
import os

import numpy as np
import scipy.sparse as sp

logger = logging.getLogger(__name__)

try:
    import numba
    from numba import njit, prange
except ImportError:  # pragma: no cover
    numba = None
else:
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # skip the TBB probe; it warns on older TBB builds
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

BACKENDS = ("numba", "numpy")


def default_backend():
    env = os.environ.get("EMOPATTERN_BACKEND", "").strip().lower()
    if env == "numpy" or numba is None:
        return "numpy"
    return "numba"


def _resolve(backend):
    backend = backend or default_backend()
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if backend == "numba" and numba is None:  # pragma: no cover
        logger.warning("numba is not installed, falling back to numpy kernels")
        return "numpy"
    return backend


def set_threads(n):
    """Cap intra-kernel parallelism (numba threading layer)."""
    if numba is not None and n:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


# ---------------------------------------------------------------------------
# power iteration on (M + I) for a symmetric CSR pattern matrix
# ---------------------------------------------------------------------------

def _power_iteration_np(indptr, indices, tol, max_iter):
    n = indptr.size - 1
    rows = np.repeat(np.arange(n), np.diff(indptr))
    x = np.full(n, 1.0 / np.sqrt(n))
    for it in range(1, max_iter + 1):
        y = x + np.bincount(rows, weights=x[indices], minlength=n)
        y /= np.sqrt(np.dot(y, y))
        diff = np.max(np.abs(y - x))
        x = y
        if diff < tol:
            return x, it, True
    return x, max_iter, False


if numba is not None:

    @njit(cache=True, parallel=True)
    def _power_iteration_nb(indptr, indices, tol, max_iter):
        n = indptr.size - 1
        x = np.full(n, 1.0 / np.sqrt(n))
        y = np.empty(n)
        for it in range(1, max_iter + 1):
            for i in prange(n):
                s = x[i]
                for p in range(indptr[i], indptr[i + 1]):
                    s += x[indices[p]]
                y[i] = s
            norm = 0.0
            for i in range(n):
                norm += y[i] * y[i]
            norm = np.sqrt(norm)
            diff = 0.0
            for i in range(n):
                v = y[i] / norm
                d = abs(v - x[i])
                if d > diff:
                    diff = d
                x[i] = v
            if diff < tol:
                return x, it, True
        return x, max_iter, False


def power_iteration(indptr, indices, tol=1e-10, max_iter=1000, backend=None):
    """Principal eigenvector of a symmetric 0/1 CSR matrix.

    Iterates with M + I rather than M: same eigenvectors, but the shift
    removes the +/- lambda oscillation that bipartite graphs (stars, paths)
    cause in plain power iteration.

    Returns ``(vector, iterations, converged)``.
    """
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    if indptr.size <= 1:
        return np.zeros(0), 0, True
    if _resolve(backend) == "numba":
        return _power_iteration_nb(indptr, indices, float(tol), int(max_iter))
    return _power_iteration_np(indptr, indices, float(tol), int(max_iter))


# ---------------------------------------------------------------------------
# ordered-triple counts for the local clustering coefficient
# ---------------------------------------------------------------------------

def _triangles_np(indptr, indices):
    n = indptr.size - 1
    a = sp.csr_matrix((np.ones(indices.size, dtype=np.int64), indices, indptr), shape=(n, n))
    closed = np.asarray((a @ a).multiply(a).sum(axis=1), dtype=np.int64).ravel()
    deg = np.diff(indptr).astype(np.int64)
    return closed, deg * (deg - 1)


if numba is not None:

    @njit(cache=True, parallel=True)
    def _triangles_nb(indptr, indices):
        n = indptr.size - 1
        closed = np.zeros(n, dtype=np.int64)
        wedges = np.zeros(n, dtype=np.int64)
        for i in prange(n):
            lo, hi = indptr[i], indptr[i + 1]
            deg = hi - lo
            wedges[i] = deg * (deg - 1)
            total = 0
            for p in range(lo, hi):
                j = indices[p]
                # sorted-merge intersection of N(i) and N(j)
                a, b = lo, indptr[j]
                bend = indptr[j + 1]
                while a < hi and b < bend:
                    u, v = indices[a], indices[b]
                    if u == v:
                        total += 1
                        a += 1
                        b += 1
                    elif u < v:
                        a += 1
                    else:
                        b += 1
            closed[i] = total
        return closed, wedges


def triangle_counts(indptr, indices, backend=None):
    """Per-node numerator and denominator of the local clustering coefficient.

    ``closed[i]`` counts ordered neighbour pairs (j, k) of i that are linked
    (twice the triangle count); ``wedges[i]`` counts all ordered neighbour
    pairs, deg * (deg - 1).  Column indices must be sorted within each row.
    """
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    if indptr.size <= 1:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    if _resolve(backend) == "numba":
        return _triangles_nb(indptr, indices)
    return _triangles_np(indptr, indices)


# ---------------------------------------------------------------------------
# Ward agglomeration (Lance-Williams, cached upper-triangle nearest neighbours)
# ---------------------------------------------------------------------------

def _ward_np(dist, n_clusters):
    n = dist.shape[0]
    d = dist.copy()
    upper = np.triu(d, 1)
    upper[np.tril_indices(n)] = np.inf
    size = np.ones(n)
    active = np.ones(n, dtype=bool)
    parent = np.arange(n)
    nn = np.argmin(upper, axis=1)
    mind = upper[np.arange(n), nn]
    costs = np.empty(n - n_clusters)
    idx = np.arange(n)
    for step in range(n - n_clusters):
        a = int(np.argmin(mind))
        b = int(nn[a])
        cost = mind[a]
        costs[step] = cost
        others = active.copy()
        others[a] = others[b] = False
        nr = size[others]
        na, nb = size[a], size[b]
        new = ((na + nr) * d[a, others] + (nb + nr) * d[b, others] - nr * cost) / (na + nb + nr)
        d[a, others] = new
        d[others, a] = new
        size[a] = na + nb
        active[b] = False
        parent[b] = a
        upper[b, :] = np.inf
        upper[:, b] = np.inf
        mind[b] = np.inf
        after = others & (idx > a)
        upper[a, after] = d[a, after]
        before = others & (idx < a)
        upper[before, a] = d[before, a]
        rescan = active & ((idx == a) | (nn == a) | (nn == b))
        rows = np.flatnonzero(rescan)
        if rows.size:
            nn[rows] = np.argmin(upper[rows], axis=1)
            mind[rows] = upper[rows, nn[rows]]
        cand = np.flatnonzero(before & ~rescan)
        if cand.size:
            val = d[cand, a]
            better = (val < mind[cand]) | ((val == mind[cand]) & (a < nn[cand]))
            hit = cand[better]
            nn[hit] = a
            mind[hit] = val[better]
    return parent, costs


if numba is not None:

    @njit(cache=True)
    def _ward_rescan(d, active, nn, mind, r, n):
        best = np.inf
        arg = -1
        for j in range(r + 1, n):
            if active[j] and d[r, j] < best:
                best = d[r, j]
                arg = j
        nn[r] = arg
        mind[r] = best

    @njit(cache=True)
    def _ward_nb(dist, n_clusters):
        n = dist.shape[0]
        d = dist.copy()
        size = np.ones(n)
        active = np.ones(n, dtype=np.bool_)
        parent = np.arange(n)
        nn = np.full(n, -1, dtype=np.int64)
        mind = np.full(n, np.inf)
        for r in range(n):
            _ward_rescan(d, active, nn, mind, r, n)
        costs = np.empty(n - n_clusters)
        for step in range(n - n_clusters):
            a = -1
            cost = np.inf
            for r in range(n):
                if active[r] and mind[r] < cost:
                    cost = mind[r]
                    a = r
            b = nn[a]
            costs[step] = cost
            na = size[a]
            nb = size[b]
            for r in range(n):
                if active[r] and r != a and r != b:
                    nr = size[r]
                    v = ((na + nr) * d[a, r] + (nb + nr) * d[b, r] - nr * cost) / (na + nb + nr)
                    d[a, r] = v
                    d[r, a] = v
            size[a] = na + nb
            active[b] = False
            parent[b] = a
            nn[b] = -1
            mind[b] = np.inf
            for r in range(n):
                if not active[r]:
                    continue
                if r == a or nn[r] == a or nn[r] == b:
                    _ward_rescan(d, active, nn, mind, r, n)
                elif r < a:
                    v = d[r, a]
                    if v < mind[r] or (v == mind[r] and a < nn[r]):
                        nn[r] = a
                        mind[r] = v
        return parent, costs


def ward_agglomerate(dist, n_clusters, backend=None):
    """Greedy Ward merging down to ``n_clusters`` clusters.

    ``dist`` holds squared Euclidean distances.  At every step the pair with
    the smallest merge cost is merged, ties going to the lexicographically
    smallest (row, column) pair; the merged cluster keeps the smaller index.

    Returns ``(roots, costs)``: the representative index of every point and
    the merge-cost sequence.
    """
    dist = np.ascontiguousarray(dist, dtype=np.float64)
    n = dist.shape[0]
    if not 1 <= n_clusters <= n:
        raise ValueError(f"n_clusters must be in [1, {n}], got {n_clusters}")
    if _resolve(backend) == "numba":
        parent, costs = _ward_nb(dist, int(n_clusters))
    else:
        parent, costs = _ward_np(dist, int(n_clusters))
    roots = np.asarray(parent).copy()
    # parents always point to a smaller index, so one forward pass resolves chains
    for i in range(n):
        roots[i] = roots[roots[i]]
    return roots, np.asarray(costs)
