"""
Readers and writers for the on-disk formats:

    edges TSV        u<TAB>v<TAB>weight<TAB>kind   kind in {S, D}, u < v, one undirected edge per line
    labels TSV       node<TAB>label                label in {+1, -1}, +1 is class 1
    labeled set      node                          one node id per line
    features CSV     one node per row, no header
    posterior CSV    node,q1,q2,predicted          predicted in {+1, -1} by argmax, ties to +1

Every reader reports problems as a FormatError naming the file and line.
"""
import pathlib
from typing import Dict, List, Optional, Tuple

import numpy as np
import parse

from .graph import CLASS_1, CLASS_2, DISSIMILAR, SIMILAR, Edge, GraphError, MixedGraph, build_graph
from .utilities import fmt

EDGE_LINE = parse.compile("{u:d}\t{v:d}\t{weight:g}\t{kind}")
LABEL_LINE = parse.compile("{node:d}\t{label:d}")
NODE_LINE = parse.compile("{node:d}")


class FormatError(ValueError):
    def __init__(self, file, line: Optional[int], *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.file = file
        self.line = line

    def __str__(self):
        where = f"{self.file}:{self.line}" if self.line is not None else f"{self.file}"
        return f"[{where}] {super().__str__()}"


def _content_lines(path: pathlib.Path):
    with pathlib.Path(path).open() as handle:
        for number, line in enumerate(handle, start=1):
            line = line.rstrip("\r\n")
            if line.strip() and not line.lstrip().startswith("#"):
                yield number, line


def _match(pattern, path, number, line, what):
    if result := pattern.parse(line):
        return result
    raise FormatError(path, number, f"Malformed {what} line: {line!r}")


def read_edges(path: pathlib.Path) -> List[Edge]:
    edges = []
    seen: Dict[Tuple[int, int], int] = {}
    for number, line in _content_lines(path):
        result = _match(EDGE_LINE, path, number, line, "edge")
        u, v, weight, kind = result["u"], result["v"], float(result["weight"]), result["kind"].strip()
        if kind not in (SIMILAR, DISSIMILAR):
            raise FormatError(path, number, f"Edge kind must be S or D, got {kind!r}")
        if u < 0 or v < 0:
            raise FormatError(path, number, f"Node ids must be non-negative, got ({u}, {v})")
        if u == v:
            raise FormatError(path, number, f"Self-loop on node {u}")
        if not np.isfinite(weight) or weight < 0:
            raise FormatError(path, number, f"Edge weight must be a non-negative number, got {weight}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise FormatError(path, number, f"Edge {key} already appeared on line {seen[key]}")
        seen[key] = number
        edges.append((u, v, weight, kind))
    return edges


def max_node(edges: List[Edge]) -> int:
    return max((max(u, v) for u, v, _, _ in edges), default=-1)


def load_mixed(path: pathlib.Path, node_count: int = 0) -> MixedGraph:
    """
    Reads an edges file into a mixed graph with at least node_count nodes.
    """
    edges = read_edges(path)
    try:
        return build_graph(max(node_count, max_node(edges) + 1), edges)
    except GraphError as e:
        raise FormatError(path, None, str(e)) from e


def write_edges(path: pathlib.Path, g: MixedGraph):
    with pathlib.Path(path).open("w") as handle:
        for u, v, weight, kind in g.edges():
            handle.write(f"{u}\t{v}\t{weight!r}\t{kind}\n")


def read_labels(path: pathlib.Path, positive: Optional[int] = None) -> Dict[int, int]:
    """
    Returns node -> class (1 or 2). With positive set, any integer labels are accepted and the
    positive label maps to class 1, all others to class 2.
    """
    labels = {}
    for number, line in _content_lines(path):
        result = _match(LABEL_LINE, path, number, line, "label")
        node, label = result["node"], result["label"]
        if node < 0:
            raise FormatError(path, number, f"Node ids must be non-negative, got {node}")
        if node in labels:
            raise FormatError(path, number, f"Node {node} is labeled twice")
        if positive is not None:
            labels[node] = CLASS_1 if label == positive else CLASS_2
        elif label in (1, -1):
            labels[node] = CLASS_1 if label == 1 else CLASS_2
        else:
            raise FormatError(path, number, f"Label must be +1 or -1, got {label}")
    return labels


def write_labels(path: pathlib.Path, classes: np.ndarray):
    with pathlib.Path(path).open("w") as handle:
        for node, label in enumerate(np.asarray(classes).tolist()):
            handle.write(f"{node}\t{'+1' if label == CLASS_1 else '-1'}\n")


def labels_array(labels: Dict[int, int], node_count: int) -> np.ndarray:
    """
    Dense class array, 0 for nodes missing from the map.
    """
    classes = np.zeros(node_count, dtype=np.int8)
    for node, label in labels.items():
        classes[node] = label
    return classes


def read_node_set(path: pathlib.Path) -> List[int]:
    nodes = []
    for number, line in _content_lines(path):
        node = _match(NODE_LINE, path, number, line, "node id")["node"]
        if node < 0:
            raise FormatError(path, number, f"Node ids must be non-negative, got {node}")
        nodes.append(node)
    return nodes


def write_node_set(path: pathlib.Path, nodes):
    with pathlib.Path(path).open("w") as handle:
        for node in nodes:
            handle.write(f"{int(node)}\n")


def read_features(path: pathlib.Path) -> np.ndarray:
    try:
        X = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as e:
        raise FormatError(path, None, f"Malformed features: {e}") from e
    if X.shape[0] == 0:
        raise FormatError(path, None, "No feature rows")
    return X


def write_features(path: pathlib.Path, X: np.ndarray):
    np.savetxt(path, X, delimiter=",", fmt="%.17g")


def write_posterior(path: pathlib.Path, Q: np.ndarray):
    with pathlib.Path(path).open("w") as handle:
        handle.write("node,q1,q2,predicted\n")
        for node, (q1, q2) in enumerate(np.asarray(Q).tolist()):
            handle.write(f"{node},{fmt(q1)},{fmt(q2)},{'+1' if q1 >= q2 else '-1'}\n")
