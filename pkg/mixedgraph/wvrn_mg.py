"""
Weighted-vote relational neighbour classification on mixed graphs (WvRN-MG) with annealed
relaxation labeling.
"""
import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .graph import LabelAssignment, MixedGraph, MixedView, SparseUndirectedGraph, mixed_view
from .ir_mg import PropagationResult, PropagationState, init_state

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnnealConfig:
    gamma: float = 0.5
    beta0: float = 1.0
    nu: float = 0.95
    epsilon: float = 0.001
    max_iters: int = 1000
    normalize: bool = True

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if not 0.0 < self.beta0 <= 1.0:
            raise ValueError(f"beta0 must lie in (0, 1], got {self.beta0}")
        if not 0.0 < self.nu < 1.0:
            raise ValueError(f"nu must lie in (0, 1), got {self.nu}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be positive, got {self.max_iters}")


class _WeightedVote:
    def __init__(self, view: MixedView, unlabeled: np.ndarray):
        mask = np.zeros(view.node_count, dtype=bool)
        mask[unlabeled] = True
        self.similar = view.similar.restricted_to_rows(mask)
        self.dissimilar = view.dissimilar.restricted_to_rows(mask)
        self.node_count = view.node_count

    def __call__(self, state: PropagationState, cfg: AnnealConfig, beta: float) -> PropagationState:
        Q = state.Q
        s, d = self.similar, self.dissimilar
        vote = np.zeros((self.node_count, 2))
        if cfg.gamma > 0 and len(s.rows):
            vote += cfg.gamma * s.aggregate(Q[s.cols])
        if cfg.gamma < 1 and len(d.rows):
            vote += (1.0 - cfg.gamma) * d.aggregate(Q[d.cols][:, ::-1])

        # psi normalizes the combined vote of both graphs
        psi = vote.sum(axis=1)
        free = state.unlabeled[psi[state.unlabeled] > 0]
        new_Q = Q.copy()
        if len(free):
            q_tilde = vote[free] / psi[free, None]
            new_Q[free] = beta * q_tilde + (1.0 - beta) * Q[free]

        max_delta = float(np.max(np.abs(new_Q[free] - Q[free]))) if len(free) else 0.0
        return replace(state, Q=new_Q, iteration=state.iteration + 1, max_delta=max_delta)


def wvrn_step(state: PropagationState, view: MixedView, cfg: AnnealConfig, beta: float) -> PropagationState:
    """
    One synchronous WvRN-MG iteration: the normalized two-graph vote of the frozen estimates,
    blended with the current estimate by beta.
    """
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    return _WeightedVote(view, state.unlabeled)(state, cfg, beta)


def wvrn_run(
    g: MixedGraph,
    labels: LabelAssignment,
    priors: Optional[np.ndarray] = None,
    cfg: AnnealConfig = AnnealConfig(),
    callback: Optional[Callable[[PropagationState], None]] = None,
) -> PropagationResult:
    """
    Relaxation labeling with beta decaying geometrically by cfg.nu every iteration. The
    per-iteration change is bounded by beta, so the run stops once beta < cfg.epsilon at the
    latest.
    """
    view = mixed_view(g, cfg.normalize)
    state = init_state(view, labels, priors)
    vote = _WeightedVote(view, state.unlabeled)

    beta = cfg.beta0
    converged = False
    while state.iteration < cfg.max_iters:
        state = vote(state, cfg, beta)
        beta *= cfg.nu
        if callback is not None:
            callback(state)
        if state.max_delta < cfg.epsilon:
            converged = True
            break

    if converged:
        log.debug("WvRN-MG converged after %d iterations (gamma=%g)", state.iteration, cfg.gamma)
    else:
        log.warning("WvRN-MG hit the %d iteration cap, last change %g", cfg.max_iters, state.max_delta)
    return PropagationResult(state.Q, state.iteration, converged)


def wvrn_baseline(
    g: SparseUndirectedGraph,
    labels: LabelAssignment,
    priors: Optional[np.ndarray] = None,
    cfg: AnnealConfig = AnnealConfig(gamma=1.0),
) -> PropagationResult:
    """
    Classic WvRN with annealed relaxation labeling on a single similar graph. cfg.gamma is
    ignored.
    """
    view = mixed_view(MixedGraph.similar_only(g), cfg.normalize)
    state = init_state(view, labels, priors)
    mask = np.zeros(g.node_count, dtype=bool)
    mask[state.unlabeled] = True
    edges = view.similar.restricted_to_rows(mask)

    Q, beta = state.Q, cfg.beta0
    for iteration in range(1, cfg.max_iters + 1):
        vote = edges.aggregate(Q[edges.cols])
        psi = vote.sum(axis=1)
        free = state.unlabeled[psi[state.unlabeled] > 0]
        new_Q = Q.copy()
        new_Q[free] = beta * (vote[free] / psi[free, None]) + (1.0 - beta) * Q[free]
        delta = float(np.max(np.abs(new_Q[free] - Q[free]))) if len(free) else 0.0
        Q, beta = new_Q, beta * cfg.nu
        if delta < cfg.epsilon:
            return PropagationResult(Q, iteration, True)
    return PropagationResult(Q, cfg.max_iters, False)
