"""
Sparse weighted undirected graphs, the mixed (similar + dissimilar) graph container,
partial label assignments and the per-graph degree normalization used by the propagation
algorithms.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Literal, Mapping, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)

SIMILAR = "S"
DISSIMILAR = "D"
EdgeKind = Literal["S", "D"]
Edge = Tuple[int, int, float, EdgeKind]

CLASS_1 = 1
CLASS_2 = 2
UNLABELED = 0


class GraphError(ValueError):
    """
    Raised when an edge list or a label map breaks one of the graph invariants.
    """


def _readonly(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class SparseUndirectedGraph:
    """
    The W of a single edge type. Edges are kept canonically (u < v, sorted) alongside a
    symmetric CSR adjacency with sorted neighbour lists.
    """
    node_count: int
    u: np.ndarray
    v: np.ndarray
    weight: np.ndarray
    adjacency: sp.csr_matrix

    @classmethod
    def from_arrays(cls, node_count: int, u, v, weight) -> "SparseUndirectedGraph":
        """
        Builds a graph from already validated canonical edge arrays.
        """
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        weight = np.asarray(weight, dtype=float)
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        order = np.lexsort((hi, lo))
        lo, hi, weight = lo[order], hi[order], weight[order]

        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        data = np.concatenate([weight, weight])
        adjacency = sp.csr_matrix((data, (rows, cols)), shape=(node_count, node_count))
        adjacency.sort_indices()
        for array in (adjacency.data, adjacency.indices, adjacency.indptr):
            _readonly(array)

        return cls(
            node_count=node_count,
            u=_readonly(lo),
            v=_readonly(hi),
            weight=_readonly(weight),
            adjacency=adjacency,
        )

    @classmethod
    def empty(cls, node_count: int) -> "SparseUndirectedGraph":
        return cls.from_arrays(node_count, [], [], [])

    @property
    def edge_count(self) -> int:
        return len(self.u)

    def edges(self) -> Iterator[Tuple[int, int, float]]:
        """
        Enumerates the undirected edges once each, as (u, v, weight) with u < v.
        """
        for a, b, w in zip(self.u.tolist(), self.v.tolist(), self.weight.tolist()):
            yield a, b, w

    def edge_keys(self) -> np.ndarray:
        """
        A single integer per undirected edge, used for set operations between graphs.
        """
        return self.u * self.node_count + self.v

    def degree(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    def same_edges(self, other: "SparseUndirectedGraph") -> bool:
        return (
            self.node_count == other.node_count
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.weight, other.weight)
        )


@dataclass(frozen=True, eq=False)
class MixedGraph:
    similar: SparseUndirectedGraph
    dissimilar: SparseUndirectedGraph

    def __post_init__(self):
        if self.similar.node_count != self.dissimilar.node_count:
            raise GraphError(
                f"Similar graph has {self.similar.node_count} nodes but dissimilar graph "
                f"has {self.dissimilar.node_count}"
            )
        shared = np.intersect1d(self.similar.edge_keys(), self.dissimilar.edge_keys())
        if len(shared):
            n = self.node_count
            u, v = divmod(int(shared[0]), n)
            raise GraphError(f"Edge ({u}, {v}) is listed as both S and D")

    @property
    def node_count(self) -> int:
        return self.similar.node_count

    @classmethod
    def similar_only(cls, g: SparseUndirectedGraph) -> "MixedGraph":
        return cls(similar=g, dissimilar=SparseUndirectedGraph.empty(g.node_count))

    def flattened(self) -> SparseUndirectedGraph:
        """
        The union of both edge sets as a single graph, i.e. the original graph G.
        """
        return SparseUndirectedGraph.from_arrays(
            self.node_count,
            np.concatenate([self.similar.u, self.dissimilar.u]),
            np.concatenate([self.similar.v, self.dissimilar.v]),
            np.concatenate([self.similar.weight, self.dissimilar.weight]),
        )

    def edges(self) -> Iterator[Edge]:
        """
        Every edge with its kind, ordered by (u, v).
        """
        merged = sorted(
            [(u, v, w, SIMILAR) for u, v, w in self.similar.edges()]
            + [(u, v, w, DISSIMILAR) for u, v, w in self.dissimilar.edges()]
        )
        yield from merged


def build_graph(node_count: int, edge_list: Iterable[Sequence]) -> MixedGraph:
    """
    Validates an edge list of (u, v, weight, kind) tuples and splits it into the similar and
    dissimilar graphs over one node index space.
    """
    if node_count < 0:
        raise GraphError(f"Node count must be non-negative, got {node_count}")

    seen: Dict[Tuple[int, int], str] = {}
    columns = {SIMILAR: ([], [], []), DISSIMILAR: ([], [], [])}
    for u, v, weight, kind in edge_list:
        if kind not in columns:
            raise GraphError(f"Edge ({u}, {v}) has unknown kind {kind!r}, must be S or D")
        if not (0 <= u < node_count and 0 <= v < node_count):
            raise GraphError(f"Edge ({u}, {v}) is out of range for {node_count} nodes")
        if u == v:
            raise GraphError(f"Edge ({u}, {v}) is a self-loop")
        if not np.isfinite(weight) or weight < 0:
            raise GraphError(f"Edge ({u}, {v}) has invalid weight {weight}")

        key = (min(u, v), max(u, v))
        if key in seen:
            if seen[key] != kind:
                raise GraphError(f"Edge {key} is listed as both S and D")
            raise GraphError(f"Duplicate undirected edge {key}")
        seen[key] = kind

        us, vs, ws = columns[kind]
        us.append(key[0])
        vs.append(key[1])
        ws.append(float(weight))

    graphs = {
        kind: SparseUndirectedGraph.from_arrays(node_count, *cols) for kind, cols in columns.items()
    }
    log.debug(
        "Built mixed graph with %d nodes, %d similar and %d dissimilar edges",
        node_count, graphs[SIMILAR].edge_count, graphs[DISSIMILAR].edge_count
    )
    return MixedGraph(similar=graphs[SIMILAR], dissimilar=graphs[DISSIMILAR])


@dataclass(frozen=True, eq=False)
class EdgeView:
    """
    Directed weighted entries (rows[k] -> cols[k] with weights[k]) derived from one graph.
    Both directions of every undirected edge appear.
    """
    node_count: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray

    def out_weights(self, node: int) -> Dict[int, float]:
        mask = self.rows == node
        return dict(zip(self.cols[mask].tolist(), self.weights[mask].tolist()))

    def row_sums(self) -> np.ndarray:
        return np.bincount(self.rows, weights=self.weights, minlength=self.node_count)

    def aggregate(self, values: np.ndarray) -> np.ndarray:
        """
        Per-row weighted sums: out[i] = sum over entries k with rows[k] == i of
        weights[k] * values[k]. values has one row per entry.
        """
        weighted = self.weights[:, None] * values
        return np.column_stack([
            np.bincount(self.rows, weights=weighted[:, k], minlength=self.node_count)
            for k in range(values.shape[1])
        ])

    def restricted_to_rows(self, mask: np.ndarray) -> "EdgeView":
        keep = mask[self.rows]
        return EdgeView(self.node_count, self.rows[keep], self.cols[keep], self.weights[keep])

    def symmetrized(self) -> "EdgeView":
        """
        Entry (i, j) carries w_ij + w_ji: the total weight with which node i enters the two
        directed terms of edge {i, j}.
        """
        matrix = sp.csr_matrix(
            (self.weights, (self.rows, self.cols)), shape=(self.node_count, self.node_count)
        )
        total = (matrix + matrix.T).tocoo()
        return EdgeView(self.node_count, total.row.astype(np.int64), total.col.astype(np.int64), total.data)


def raw_view(g: SparseUndirectedGraph) -> EdgeView:
    coo = g.adjacency.tocoo()
    return EdgeView(g.node_count, coo.row.astype(np.int64), coo.col.astype(np.int64), coo.data.copy())


def row_normalize(g: SparseUndirectedGraph) -> EdgeView:
    """
    W' = D^-1 W for one graph. Rows of nodes with positive degree sum to one; zero-degree
    nodes have no outgoing entries. The result is row-stochastic, not symmetric.
    """
    view = raw_view(g)
    degree = g.degree()
    keep = degree[view.rows] > 0
    rows, cols = view.rows[keep], view.cols[keep]
    return EdgeView(g.node_count, rows, cols, view.weights[keep] / degree[rows])


@dataclass(frozen=True, eq=False)
class MixedView:
    """
    The weight views of both graphs of a mixed graph, as consumed by the propagation methods.
    """
    similar: EdgeView
    dissimilar: EdgeView

    @property
    def node_count(self) -> int:
        return self.similar.node_count


def mixed_view(g: MixedGraph, normalize: bool = True) -> MixedView:
    make = row_normalize if normalize else raw_view
    return MixedView(similar=make(g.similar), dissimilar=make(g.dissimilar))


@dataclass(frozen=True, eq=False)
class LabelAssignment:
    """
    Partial node -> class map. classes[i] is 1 or 2 for nodes in L and 0 for nodes in UL.
    """
    classes: np.ndarray

    def __post_init__(self):
        classes = np.array(self.classes, dtype=np.int8)
        bad = ~np.isin(classes, (UNLABELED, CLASS_1, CLASS_2))
        if bad.any():
            raise GraphError(f"Node {int(np.flatnonzero(bad)[0])} has a class outside {{1, 2}}")
        object.__setattr__(self, "classes", _readonly(classes))

    @classmethod
    def from_mapping(cls, node_count: int, labels: Mapping[int, int]) -> "LabelAssignment":
        classes = np.zeros(node_count, dtype=np.int8)
        for node, label in labels.items():
            if not 0 <= node < node_count:
                raise GraphError(f"Labeled node {node} is out of range for {node_count} nodes")
            if label not in (CLASS_1, CLASS_2):
                raise GraphError(f"Node {node} has class {label}, must be 1 or 2")
            classes[node] = label
        return cls(classes)

    @classmethod
    def from_truth(cls, truth: np.ndarray, labeled: Iterable[int]) -> "LabelAssignment":
        """
        Reveals the true class of the given nodes only.
        """
        truth = np.asarray(truth)
        classes = np.zeros(len(truth), dtype=np.int8)
        labeled = np.asarray(list(labeled), dtype=np.int64)
        classes[labeled] = truth[labeled]
        return cls(classes)

    @property
    def node_count(self) -> int:
        return len(self.classes)

    @property
    def labeled(self) -> np.ndarray:
        return np.flatnonzero(self.classes != UNLABELED)

    @property
    def unlabeled(self) -> np.ndarray:
        return np.flatnonzero(self.classes == UNLABELED)

    def counts(self) -> Tuple[int, int]:
        return int(np.sum(self.classes == CLASS_1)), int(np.sum(self.classes == CLASS_2))

    def as_mapping(self) -> Dict[int, int]:
        return {int(i): int(self.classes[i]) for i in self.labeled}

    def hidden(self, nodes: Iterable[int]) -> "LabelAssignment":
        """
        A copy with the given nodes moved from L to UL.
        """
        classes = self.classes.copy()
        classes[np.asarray(list(nodes), dtype=np.int64)] = UNLABELED
        return LabelAssignment(classes)

    def flipped(self) -> "LabelAssignment":
        classes = self.classes.copy()
        classes[self.classes == CLASS_1] = CLASS_2
        classes[self.classes == CLASS_2] = CLASS_1
        return LabelAssignment(classes)
