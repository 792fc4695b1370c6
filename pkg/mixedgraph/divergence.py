"""
Divergences between 2-component probability vectors and the mixed-graph information
regularization objective. Natural logarithms throughout, 0 * log 0 = 0.

Distributions are numpy arrays whose last axis has length 2, so every function here works
on a single distribution or on a stack of them.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import rel_entr

from .graph import MixedView

SUM_TOLERANCE = 1e-9


def as_distribution(values) -> np.ndarray:
    """
    Returns values as a float array of 2-component distributions, raising ValueError if any
    row is negative or does not sum to one.
    """
    q = np.asarray(values, dtype=float)
    if q.shape[-1:] != (2,):
        raise ValueError(f"Distributions must have 2 components, got shape {q.shape}")
    if np.any(q < 0) or np.any(np.abs(q.sum(axis=-1) - 1.0) > SUM_TOLERANCE):
        raise ValueError(f"Not a probability distribution: {q}")
    return q


def kl(p, q) -> np.ndarray:
    """
    Kullback-Leibler divergence sum_k p_k ln(p_k / q_k). Returns inf where q_k = 0 < p_k.
    """
    return np.sum(rel_entr(np.asarray(p, dtype=float), np.asarray(q, dtype=float)), axis=-1)


def js(p, q) -> np.ndarray:
    """
    Jensen-Shannon divergence, symmetric and bounded by ln 2.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    m = 0.5 * (p + q)
    return 0.5 * kl(p, m) + 0.5 * kl(q, m)


def swap(q) -> np.ndarray:
    """
    Exchanges the two class probabilities, q -> 1 - q.
    """
    return np.asarray(q, dtype=float)[..., ::-1].copy()


@dataclass(frozen=True)
class ObjectiveParams:
    lambda_s: float
    lambda_d: float

    def __post_init__(self):
        if self.lambda_s < 0 or self.lambda_d < 0:
            raise ValueError(f"Regularization constants must be non-negative, got {self}")

    @classmethod
    def from_gamma(cls, gamma: float, scale: float = 1.0) -> "ObjectiveParams":
        return cls(lambda_s=scale * gamma, lambda_d=scale * (1.0 - gamma))


def mixed_objective(
    Q,
    P: Optional[np.ndarray],
    labeled: Optional[np.ndarray],
    view: MixedView,
    params: ObjectiveParams,
    labeled_fixed: bool = True,
) -> float:
    """
    Evaluates the mixed-graph objective

        sum_{i in L} JS(p_i || q_i)
        + lambda_s * sum_{(i,j) in E_S} w_ij JS(q_i || q_j)
        + lambda_d * sum_{(i,j) in E_D} w_ij JS(q_i || 1 - q_j)

    where the edge sums run over the directed entries of the given views. With an empty
    dissimilar graph this is the plain information regularization objective. When
    labeled_fixed is set the data-fit term is skipped.

    Q may carry leading batch dimensions, (..., n, 2), in which case one value per batch
    entry is returned.
    """
    Q = np.asarray(Q, dtype=float)
    if Q.shape[-2:] != (view.node_count, 2):
        raise ValueError(f"Expected a distribution for each of {view.node_count} nodes, got {Q.shape}")

    total = np.zeros(Q.shape[:-2])
    if not labeled_fixed and labeled is not None and len(labeled):
        if P is None:
            raise ValueError("Labeled priors are required when labeled distributions are free")
        P = np.asarray(P, dtype=float)
        total = total + np.sum(js(P[labeled], Q[..., labeled, :]), axis=-1)

    s, d = view.similar, view.dissimilar
    if params.lambda_s and len(s.rows):
        total = total + params.lambda_s * (js(Q[..., s.rows, :], Q[..., s.cols, :]) @ s.weights)
    if params.lambda_d and len(d.rows):
        total = total + params.lambda_d * (js(Q[..., d.rows, :], swap(Q[..., d.cols, :])) @ d.weights)
    return float(total) if total.ndim == 0 else total