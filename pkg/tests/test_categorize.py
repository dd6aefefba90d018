import math
import warnings
from fractions import Fraction

import numpy as np
import pytest

from emopattern import categorize as cat
from emopattern.categorize import AdjacencyMatrix, NodeScores, NonConvergence
from emopattern.cograph import TokenGraph

from conftest import random_connected, random_graph

# frozen from numpy.linalg.eigh on the dense matrices
STAR_RATIO = 1.7320508075688776
PATH_RATIO = 1.4142135623730945
BACKENDS = ("numba", "numpy")


def graph(arcs):
    return TokenGraph(sorted({t for a in arcs for t in a}), {a: 1 for a in arcs}, {a: 1.0 for a in arcs})


def test_adjacency_symmetrizes():
    m = cat.adjacency(graph([("a", "b")]))
    assert m.dense().tolist() == [[0, 1], [1, 0]]
    both = cat.adjacency(graph([("a", "b"), ("b", "a")]))
    assert both.dense().tolist() == m.dense().tolist()
    assert cat.adjacency(TokenGraph()).dense().shape == (0, 0)


def test_adjacency_drops_self_loops():
    m = cat.adjacency(graph([("a", "a"), ("a", "b")]))
    assert np.trace(m.dense()) == 0


def test_from_dense_matches_pairs():
    rng = np.random.default_rng(0)
    a = random_graph(rng, 7)
    m = AdjacencyMatrix.from_dense(a)
    assert (m.dense() == a).all()
    for i in range(m.n):
        row = m.indices[m.indptr[i]:m.indptr[i + 1]]
        assert (np.diff(row) > 0).all()


@pytest.mark.parametrize("backend", BACKENDS)
def test_k3_centrality(backend):
    m = AdjacencyMatrix.from_dense(np.ones((3, 3)) - np.eye(3))
    c, _ = cat.eigenvector_centrality(m, backend=backend)
    assert np.allclose(c, 1 / math.sqrt(3), atol=1e-9)


@pytest.mark.parametrize("backend", BACKENDS)
def test_star_and_path_ratios(backend):
    star = np.zeros((4, 4))
    star[0, 1:] = star[1:, 0] = 1
    c, _ = cat.eigenvector_centrality(AdjacencyMatrix.from_dense(star), backend=backend)
    assert c[0] / c[1] == pytest.approx(STAR_RATIO, abs=1e-8)
    path = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    c, _ = cat.eigenvector_centrality(AdjacencyMatrix.from_dense(path), backend=backend)
    assert c[1] / c[0] == pytest.approx(PATH_RATIO, abs=1e-8)


@pytest.mark.parametrize("backend", BACKENDS)
def test_centrality_unit_norm_nonnegative(backend):
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = AdjacencyMatrix.from_dense(random_connected(rng, int(rng.integers(2, 30))))
        c, _ = cat.eigenvector_centrality(m, backend=backend)
        assert (c >= 0).all()
        assert np.linalg.norm(c) == pytest.approx(1.0, abs=1e-12)


def test_centrality_permutation_equivariant():
    rng = np.random.default_rng(4)
    a = random_connected(rng, 12)
    perm = rng.permutation(12)
    c, _ = cat.eigenvector_centrality(AdjacencyMatrix.from_dense(a))
    cp, _ = cat.eigenvector_centrality(AdjacencyMatrix.from_dense(a[np.ix_(perm, perm)]))
    assert np.allclose(cp, c[perm], atol=1e-9)


def test_nonconvergence_raises():
    m = AdjacencyMatrix.from_dense(random_connected(np.random.default_rng(5), 20))
    with pytest.raises(NonConvergence) as err:
        cat.eigenvector_centrality(m, tol=1e-15, max_iter=2)
    assert err.value.iterations == 2


def brute_clustering(a):
    n = a.shape[0]
    out = []
    for i in range(n):
        nb = [j for j in range(n) if a[i, j]]
        num = sum(1 for j in nb for k in nb if j != k and a[j, k])
        den = len(nb) * (len(nb) - 1)
        out.append(Fraction(num, den * n) if den else Fraction(0))
    return out


@pytest.mark.parametrize("backend", BACKENDS)
def test_k3_clustering(backend):
    m = AdjacencyMatrix.from_dense(np.ones((3, 3)) - np.eye(3))
    assert cat.clustering_coefficients(m, backend).tolist() == [1 / 3] * 3


@pytest.mark.parametrize("backend", BACKENDS)
def test_star_and_isolated_clustering(backend):
    a = np.zeros((5, 5), dtype=int)
    a[0, 1:4] = a[1:4, 0] = 1  # node 4 isolated
    assert cat.clustering_coefficients(AdjacencyMatrix.from_dense(a), backend).tolist() == [0.0] * 5


@pytest.mark.parametrize("backend", BACKENDS)
def test_clustering_fractions_match_brute_force(backend):
    rng = np.random.default_rng(6)
    for _ in range(30):
        a = random_graph(rng, int(rng.integers(1, 9)), p=float(rng.random()))
        num, den = cat.clustering_fractions(AdjacencyMatrix.from_dense(a), backend)
        assert [Fraction(int(x), int(y)) for x, y in zip(num, den)] == brute_clustering(a)


def test_resolve_threshold():
    vals = np.arange(11, dtype=float)
    assert cat.resolve_threshold("p90", vals) == 9.0
    assert cat.resolve_threshold("0.25", vals) == 0.25
    assert cat.resolve_threshold(0.5, vals) == 0.5
    assert cat.resolve_threshold("p50", []) == math.inf
    with pytest.raises(ValueError):
        cat.resolve_threshold("p101", vals)


def scores(cent, clus):
    nodes = sorted(cent)
    return NodeScores(nodes, np.array([cent[t] for t in nodes]), np.array([clus[t] for t in nodes]))


def test_categorize_example():
    s = scores({"a": 0.9, "b": 0.1}, {"a": 0.001, "b": 0.2})
    sets = cat.categorize(s, 0.5, 0.1)
    assert sets.connector == {"a"} and sets.subject == {"b"}
    assert sets.kind("a") == cat.CW and sets.kind("b") == cat.SW and sets.kind("z") is None


def test_categorize_precedence_and_empty_warning():
    s = scores({"a": 0.9, "b": 0.1}, {"a": 0.5, "b": 0.0})
    with pytest.warns(UserWarning, match="subject"):
        sets = cat.categorize(s, 0.5, 0.1)
    assert sets.connector == {"a"} and sets.subject == set()
    with pytest.warns(UserWarning, match="connector"):
        sets = cat.categorize(s, 1.1, 0.1)
    assert sets.connector == set() and sets.subject == {"a"}


def test_categorize_percentiles_strict():
    s = scores({t: i / 10 for i, t in enumerate("abcdefghijk")}, {t: 0.0 for t in "abcdefghijk"})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sets = cat.categorize(s, "p90", "p90")
    assert sets.connector == {"k"}


def test_token_sets_roundtrip(tmp_path):
    s = scores({"a": 0.9, "b": 0.1, "c": 0.0}, {"a": 0.0, "b": 0.2, "c": 0.0})
    sets = cat.categorize(s, 0.5, 0.1)
    p = tmp_path / "tokens.tsv"
    cat.save_token_sets(sets, s, p)
    assert p.read_text().splitlines()[0].split("\t")[:2] == ["a", "CW"]
    back = cat.load_token_sets(p)
    assert back.connector == sets.connector and back.subject == sets.subject
    p.write_text("a\tXX\n", encoding="utf-8")
    with pytest.raises(ValueError, match=":1:"):
        cat.load_token_sets(p)
