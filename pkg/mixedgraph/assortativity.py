"""
Node assortativity matrix, node assortativity coefficient (NAC) and the NAC-based estimate of
the mixing parameter gamma.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import CLASS_1, CLASS_2, UNLABELED, SparseUndirectedGraph

log = logging.getLogger(__name__)


class NacUndefinedError(ArithmeticError):
    """
    Raised when the assortativity matrix or the coefficient cannot be computed, e.g. no usable
    edges or a single-class graph.
    """


class FallbackRequired(Exception):
    """
    Raised by gamma_from_nac when the NAC values do not support an estimate of gamma; the
    caller is expected to fall back to cross-validation.
    """


@dataclass(frozen=True, eq=False)
class AssortativityMatrix:
    c: np.ndarray

    @property
    def a(self) -> np.ndarray:
        return self.c.sum(axis=1)

    @property
    def b(self) -> np.ndarray:
        return self.c.sum(axis=0)


def assortativity_matrix(
    g: SparseUndirectedGraph,
    classes: np.ndarray,
    restrict_to_labeled: bool = True,
) -> AssortativityMatrix:
    """
    C[y, y'] is, over all nodes of class y, the average fraction of their edge weight that goes
    to class-y' neighbours; the matrix is then rescaled to sum to one.

    classes holds 1 or 2 per node, 0 for unknown. With restrict_to_labeled only edges between
    two known nodes count; otherwise every node must be labeled.
    """
    classes = np.asarray(classes)
    if len(classes) != g.node_count:
        raise ValueError(f"Expected {g.node_count} class entries, got {len(classes)}")
    known = classes != UNLABELED
    if not restrict_to_labeled and not known.all():
        raise ValueError("An unrestricted assortativity matrix needs every node labeled")

    onehot = np.column_stack([classes == CLASS_1, classes == CLASS_2]).astype(float)
    mask = sp.diags(known.astype(float))
    adjacency = mask @ g.adjacency @ mask

    # weight each node sends to each class, and in total
    to_class = np.asarray(adjacency @ onehot)
    total = to_class.sum(axis=1)
    qualifying = known & (total > 0)
    if not qualifying.any():
        raise NacUndefinedError("NAC undefined: no edge joins two labeled nodes")

    fractions = to_class[qualifying] / total[qualifying, None]
    node_classes = classes[qualifying]
    c = np.zeros((2, 2))
    for row, label in enumerate((CLASS_1, CLASS_2)):
        members = node_classes == label
        if members.any():
            c[row] = fractions[members].mean(axis=0)
    return AssortativityMatrix(c / c.sum())


def nac(C: AssortativityMatrix) -> float:
    """
    N = (sum_i C_ii - sum_i a_i b_i) / (1 - sum_i a_i b_i), in [-1, 1].
    """
    expected = float(np.dot(C.a, C.b))
    if abs(1.0 - expected) < 1e-12:
        raise NacUndefinedError("NAC undefined: the assortativity matrix is degenerate")
    return (float(np.trace(C.c)) - expected) / (1.0 - expected)


def graph_nac(g: SparseUndirectedGraph, classes: np.ndarray, restrict_to_labeled: bool = True) -> float:
    return nac(assortativity_matrix(g, classes, restrict_to_labeled))


def gamma_from_nac(n_s: float, n_d: float) -> float:
    """
    gamma = N_S / (N_S - N_D), only meaningful for a non-negative similar NAC and a
    non-positive dissimilar NAC.
    """
    if n_s < 0 or n_d > 0 or (n_s == 0 and n_d == 0):
        raise FallbackRequired(f"Cannot set gamma from N_S={n_s:.6g}, N_D={n_d:.6g}")
    gamma = n_s / (n_s - n_d)
    log.debug("gamma from NAC: N_S=%g N_D=%g -> %g", n_s, n_d, gamma)
    return gamma
