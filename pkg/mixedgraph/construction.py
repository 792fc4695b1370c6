"""
Graph builders: kNN graphs with Gaussian weights from feature vectors, two-Gaussian synthetic
data, oracle-based extraction of a mixed graph from a single graph, and planted noisy mixed
graphs.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.stats import norm
from sklearn.neighbors import NearestNeighbors

from .graph import CLASS_1, CLASS_2, MixedGraph, SparseUndirectedGraph

log = logging.getLogger(__name__)

EXTRACT = "extract"
GOLDBERG = "goldberg"


@dataclass(frozen=True)
class ExtractionSpec:
    p_percent: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_percent <= 100.0:
            raise ValueError(f"p_percent must lie in [0, 100], got {self.p_percent}")


def as_feature_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] < 1:
        raise ValueError(f"Features must be an (n, d) matrix with d >= 1, got shape {X.shape}")
    return X


def gauss_affinity(d_sq: np.ndarray, sig_sq: float) -> np.ndarray:
    """
    a(i, j) = exp(-d(i, j)**2 / (2 sigma**2))
    """
    return np.exp(-d_sq / (2.0 * sig_sq))


def knn_gaussian_graph(X, k: int, sigma: Union[float, str] = "auto") -> SparseUndirectedGraph:
    """
    Union-symmetrized k-nearest-neighbour graph: {i, j} is an edge when either point is among
    the k nearest of the other. With sigma="auto" the scale is the mean distance of each point
    to its k-th neighbour.
    """
    X = as_feature_matrix(X)
    n = X.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k must lie in [1, {n}), got {k}")

    dists, neighbors = NearestNeighbors(n_neighbors=k).fit(X).kneighbors()
    if sigma == "auto":
        sigma = float(np.mean(dists[:, -1]))
        if sigma <= 0:
            raise ValueError("Cannot pick sigma automatically: all k-th neighbour distances are zero")
        log.info("Using sigma=%g for the kNN graph", sigma)
    elif float(sigma) <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    sigma = float(sigma)

    rows = np.repeat(np.arange(n), k)
    cols = neighbors.ravel()
    directed = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()
    union = sp.triu(directed + directed.T, k=1).tocoo()
    u, v = union.row.astype(np.int64), union.col.astype(np.int64)
    d_sq = np.sum((X[u] - X[v]) ** 2, axis=1)
    g = SparseUndirectedGraph.from_arrays(n, u, v, gauss_affinity(d_sq, sigma ** 2))
    log.info("Built kNN graph with %d nodes and %d edges (k=%d)", n, g.edge_count, k)
    return g


def gen_two_gaussians(
    n: int,
    d: int,
    bayes_error: float = 0.05,
    balance: float = 0.5,
    seed: int = 0,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Two unit-covariance Gaussians whose means, placed symmetrically on the first axis, are
    2 * Phi^-1(1 - bayes_error) apart. Returns (features, classes in {1, 2}).
    """
    if n < 2 or d < 1:
        raise ValueError(f"Need n >= 2 and d >= 1, got n={n}, d={d}")
    if not 0.0 < bayes_error < 0.5:
        raise ValueError(f"bayes_error must lie in (0, 0.5), got {bayes_error}")
    if not 0.0 < balance < 1.0:
        raise ValueError(f"balance must lie in (0, 1), got {balance}")

    rng = np.random.default_rng(seed)
    classes = np.where(rng.random(n) < balance, CLASS_1, CLASS_2).astype(np.int8)
    half_gap = norm.ppf(1.0 - bayes_error)
    X = rng.standard_normal((n, d))
    X[:, 0] += np.where(classes == CLASS_1, half_gap, -half_gap)
    return X, classes


def mean_separation(bayes_error: float) -> float:
    return 2.0 * float(norm.ppf(1.0 - bayes_error))


def _dissimilar_unlabeled(g: SparseUndirectedGraph, truth: np.ndarray, labeled: np.ndarray) -> np.ndarray:
    is_labeled = np.zeros(g.node_count, dtype=bool)
    is_labeled[np.asarray(labeled, dtype=np.int64)] = True
    return np.flatnonzero(
        ~is_labeled[g.u] & ~is_labeled[g.v] & (truth[g.u] != truth[g.v])
    )


def extract_mixed(g: SparseUndirectedGraph, truth, labeled, spec: ExtractionSpec) -> MixedGraph:
    """
    Moves a random floor(P% of D_UU) subset of D_UU, the opposite-label edges between two
    unlabeled nodes, into the dissimilar graph; all other edges stay similar.
    """
    truth = np.asarray(truth)
    candidates = _dissimilar_unlabeled(g, truth, labeled)
    count = int(np.floor(spec.p_percent * len(candidates) / 100.0))
    rng = np.random.default_rng(spec.seed)
    picked = np.zeros(g.edge_count, dtype=bool)
    picked[rng.choice(candidates, size=count, replace=False)] = True

    log.debug("Extracted %d of %d unlabeled dissimilar edges", count, len(candidates))
    return MixedGraph(
        similar=SparseUndirectedGraph.from_arrays(g.node_count, g.u[~picked], g.v[~picked], g.weight[~picked]),
        dissimilar=SparseUndirectedGraph.from_arrays(g.node_count, g.u[picked], g.v[picked], g.weight[picked]),
    )


def goldberg_mixed(g: SparseUndirectedGraph, truth, labeled, spec: ExtractionSpec) -> MixedGraph:
    """
    Keeps g whole as the similar graph and adds floor(P% of |D_UU|) new unit-weight dissimilar
    edges between random non-adjacent opposite-label unlabeled pairs.
    """
    truth = np.asarray(truth)
    count = int(np.floor(spec.p_percent * len(_dissimilar_unlabeled(g, truth, labeled)) / 100.0))
    is_labeled = np.zeros(g.node_count, dtype=bool)
    is_labeled[np.asarray(labeled, dtype=np.int64)] = True
    pool_1 = np.flatnonzero(~is_labeled & (truth == CLASS_1))
    pool_2 = np.flatnonzero(~is_labeled & (truth == CLASS_2))

    n = g.node_count
    taken = set(g.edge_keys().tolist())
    added = []
    rng = np.random.default_rng(spec.seed)
    attempts = 0
    max_attempts = 100 * count + 1000
    while len(added) < count and len(pool_1) and len(pool_2) and attempts < max_attempts:
        attempts += 1
        a, b = int(rng.choice(pool_1)), int(rng.choice(pool_2))
        key = min(a, b) * n + max(a, b)
        if key in taken:
            continue
        taken.add(key)
        added.append((min(a, b), max(a, b)))
    if len(added) < count:
        log.warning("Only found %d of %d non-adjacent opposite-label pairs", len(added), count)

    u = np.array([a for a, _ in added], dtype=np.int64)
    v = np.array([b for _, b in added], dtype=np.int64)
    return MixedGraph(
        similar=g,
        dissimilar=SparseUndirectedGraph.from_arrays(n, u, v, np.ones(len(added))),
    )


def planted_mixed_graph(
    truth,
    similar_edges: int,
    dissimilar_edges: int,
    similar_noise: float = 0.0,
    dissimilar_noise: float = 0.0,
    seed: int = 0,
) -> MixedGraph:
    """
    Random unit-weight mixed graph over the given classes. Each similar edge joins two nodes of
    the same class except with probability similar_noise; each dissimilar edge joins opposite
    classes except with probability dissimilar_noise.
    """
    truth = np.asarray(truth)
    n = len(truth)
    for rate in (similar_noise, dissimilar_noise):
        if not 0.0 <= rate <= 1.0:
            raise ValueError(f"Noise rates must lie in [0, 1], got {rate}")
    pools = {label: np.flatnonzero(truth == label) for label in (CLASS_1, CLASS_2)}
    if any(len(pool) < 2 for pool in pools.values()):
        raise ValueError("Each class needs at least two nodes")

    rng = np.random.default_rng(seed)
    taken = set()

    def draw(count, agree_rate):
        edges = []
        attempts = 0
        while len(edges) < count and attempts < 100 * count + 1000:
            attempts += 1
            first = CLASS_1 if rng.random() < 0.5 else CLASS_2
            same = rng.random() < agree_rate
            second = first if same else (CLASS_2 if first == CLASS_1 else CLASS_1)
            a, b = int(rng.choice(pools[first])), int(rng.choice(pools[second]))
            key = (min(a, b), max(a, b))
            if a == b or key in taken:
                continue
            taken.add(key)
            edges.append(key)
        return edges

    similar = draw(similar_edges, 1.0 - similar_noise)
    dissimilar = draw(dissimilar_edges, dissimilar_noise)

    def to_graph(edges):
        u = np.array([a for a, _ in edges], dtype=np.int64)
        v = np.array([b for _, b in edges], dtype=np.int64)
        return SparseUndirectedGraph.from_arrays(n, u, v, np.ones(len(edges)))

    return MixedGraph(similar=to_graph(similar), dissimilar=to_graph(dissimilar))
