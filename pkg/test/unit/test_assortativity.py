"""
Assortativity matrix, NAC and gamma from NAC.
"""
from mixedgraph import assortativity, graph
from mixedgraph.assortativity import AssortativityMatrix, FallbackRequired, NacUndefinedError
from mixedgraph.graph import SIMILAR
import numpy as np
import pytest

BALANCED = np.array([1, 1, 2, 2])


def single_graph(n, edges):
    return graph.build_graph(n, [(u, v, w, SIMILAR) for u, v, w in edges]).similar


def test_pure_homophily():
    g = single_graph(4, [(0, 1, 1.0), (2, 3, 1.0)])
    C = assortativity.assortativity_matrix(g, BALANCED, restrict_to_labeled=False)
    np.testing.assert_allclose(C.c, [[0.5, 0.0], [0.0, 0.5]])
    assert assortativity.nac(C) == pytest.approx(1.0)


def test_pure_heterophily():
    g = single_graph(4, [(0, 2, 1.0), (1, 3, 1.0)])
    C = assortativity.assortativity_matrix(g, BALANCED, restrict_to_labeled=False)
    np.testing.assert_allclose(C.c, [[0.0, 0.5], [0.5, 0.0]])
    assert assortativity.nac(C) == pytest.approx(-1.0)


def test_averaged_fractions():
    """
    Every class-1 node sends 0.8 of its weight to class 1, every class-2 node 0.8 to class 2.
    """
    g = single_graph(4, [(0, 1, 4.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 4.0)])
    C = assortativity.assortativity_matrix(g, BALANCED, restrict_to_labeled=False)
    np.testing.assert_allclose(C.c, [[0.4, 0.1], [0.1, 0.4]])
    np.testing.assert_allclose(C.a, [0.5, 0.5])
    np.testing.assert_allclose(C.b, [0.5, 0.5])
    assert assortativity.nac(C) == pytest.approx(0.6, abs=1e-12)


def test_matrix_sums_to_one():
    rng = np.random.default_rng(0)
    n = 30
    classes = rng.integers(1, 3, size=n)
    u, v = np.triu_indices(n, k=1)
    keep = rng.random(len(u)) < 0.2
    g = graph.SparseUndirectedGraph.from_arrays(n, u[keep], v[keep], rng.uniform(0.1, 1.0, keep.sum()))
    C = assortativity.assortativity_matrix(g, classes, restrict_to_labeled=False)
    assert C.c.sum() == pytest.approx(1.0, abs=1e-12)
    assert -1.0 <= assortativity.nac(C) <= 1.0


@pytest.mark.parametrize("c,expected", [
    ([[0.5, 0.0], [0.0, 0.5]], 1.0),
    ([[0.0, 0.5], [0.5, 0.0]], -1.0),
    ([[0.4, 0.1], [0.1, 0.4]], 0.6),
])
def test_nac_closed_forms(c, expected):
    assert assortativity.nac(AssortativityMatrix(np.array(c))) == pytest.approx(expected, abs=1e-12)


def test_nac_undefined_for_single_class_matrix():
    with pytest.raises(NacUndefinedError):
        assortativity.nac(AssortativityMatrix(np.array([[1.0, 0.0], [0.0, 0.0]])))


def test_restricted_matrix_ignores_unlabeled_endpoints():
    g = single_graph(5, [(0, 1, 1.0), (2, 3, 1.0), (0, 4, 1.0), (2, 4, 1.0)])
    classes = np.array([1, 1, 2, 2, 0])
    assert assortativity.graph_nac(g, classes, restrict_to_labeled=True) == pytest.approx(1.0)


def test_restricted_matrix_without_labeled_edges_is_undefined():
    g = single_graph(4, [(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(NacUndefinedError):
        assortativity.graph_nac(g, np.array([1, 0, 2, 0]), restrict_to_labeled=True)


def test_unrestricted_matrix_needs_every_label():
    g = single_graph(3, [(0, 1, 1.0)])
    with pytest.raises(ValueError):
        assortativity.assortativity_matrix(g, np.array([1, 2, 0]), restrict_to_labeled=False)


@pytest.mark.parametrize("n_s,n_d,expected", [
    (0.5, -1.0, 1 / 3),
    (1.0, -1.0, 0.5),
    (0.0, -1.0, 0.0),
    (1.0, 0.0, 1.0),
])
def test_gamma_from_nac(n_s, n_d, expected):
    assert assortativity.gamma_from_nac(n_s, n_d) == pytest.approx(expected)


@pytest.mark.parametrize("n_s,n_d", [(-0.1, -1.0), (0.5, 0.2), (0.0, 0.0)])
def test_gamma_from_nac_requires_fallback(n_s, n_d):
    with pytest.raises(FallbackRequired):
        assortativity.gamma_from_nac(n_s, n_d)


def test_nac_range_and_scale_invariance_on_random_graphs():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(10_000):
        n = int(rng.integers(3, 10))
        u, v = np.triu_indices(n, k=1)
        keep = rng.random(len(u)) < 0.5
        weight = rng.uniform(0.1, 2.0, keep.sum())
        g = graph.SparseUndirectedGraph.from_arrays(n, u[keep], v[keep], weight)
        scaled = graph.SparseUndirectedGraph.from_arrays(n, u[keep], v[keep], 7.3 * weight)
        classes = rng.integers(0, 3, size=n)
        try:
            value = assortativity.graph_nac(g, classes, restrict_to_labeled=True)
        except NacUndefinedError:
            with pytest.raises(NacUndefinedError):
                assortativity.graph_nac(scaled, classes, restrict_to_labeled=True)
            continue
        assert -1.0 - 1e-12 <= value <= 1.0 + 1e-12
        assert assortativity.graph_nac(scaled, classes, restrict_to_labeled=True) == pytest.approx(value, abs=1e-9)
        checked += 1
    assert checked > 1_000
