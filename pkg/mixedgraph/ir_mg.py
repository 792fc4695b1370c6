"""
Information regularization on mixed graphs (IR-MG).

Labeled distributions are fixed to their priors and every unlabeled distribution is updated
from frozen estimates q(t): midpoints u_ij = (q_i + q_j) / 2 on similar edges and
z_ij = (q_i + swap(q_j)) / 2 on dissimilar edges are combined in log space and
exponentiated. The update is the exact minimizer of the objective's midpoint bound, so the
objective never increases from one iteration to the next.
"""
import logging
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Optional, Union

import numpy as np

from .graph import CLASS_1, CLASS_2, LabelAssignment, MixedGraph, MixedView, SparseUndirectedGraph, mixed_view

log = logging.getLogger(__name__)


class PropagationError(ValueError):
    """
    Raised when a propagation run cannot be started, e.g. no labeled nodes.
    """


@dataclass(frozen=True)
class PropagationConfig:
    gamma: float = 0.5
    epsilon: float = 0.001
    max_iters: int = 1000
    prob_floor: float = 1e-12
    normalize: bool = True

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be positive, got {self.max_iters}")
        if not 0.0 < self.prob_floor < 0.5:
            raise ValueError(f"prob_floor must lie in (0, 0.5), got {self.prob_floor}")


@dataclass(frozen=True, eq=False)
class PropagationState:
    Q: np.ndarray
    unlabeled: np.ndarray
    iteration: int = 0
    max_delta: float = float("inf")


class PropagationResult(NamedTuple):
    Q: np.ndarray
    iterations: int
    converged: bool


def one_hot_priors(labels: LabelAssignment) -> np.ndarray:
    """
    p_i = [1, 0] for class 1 and [0, 1] for class 2; rows of unlabeled nodes are zero.
    """
    P = np.zeros((labels.node_count, 2))
    P[labels.classes == CLASS_1, 0] = 1.0
    P[labels.classes == CLASS_2, 1] = 1.0
    return P


def class_prior(labels: LabelAssignment, prob_floor: float = 1e-12) -> np.ndarray:
    n1, n2 = labels.counts()
    if n1 + n2 == 0:
        raise PropagationError("Cannot compute a class prior without labeled nodes")
    if n1 == 0 or n2 == 0:
        log.warning("Labeled set holds a single class (%d vs %d); clamping the class prior", n1, n2)
        return np.array([1.0 - prob_floor, prob_floor]) if n2 == 0 else np.array([prob_floor, 1.0 - prob_floor])
    return np.array([n1, n2], dtype=float) / (n1 + n2)


def init_state(
    g: Union[MixedGraph, MixedView],
    labels: LabelAssignment,
    priors: Optional[np.ndarray] = None,
    prob_floor: float = 1e-12,
) -> PropagationState:
    """
    Unlabeled nodes start at the class prior of the labeled set, labeled nodes at their priors
    (one-hot unless given).
    """
    if g.node_count != labels.node_count:
        raise PropagationError(f"Graph has {g.node_count} nodes but labels cover {labels.node_count}")

    prior = class_prior(labels, prob_floor)
    Q = np.tile(prior, (labels.node_count, 1))
    labeled = labels.labeled
    P = one_hot_priors(labels) if priors is None else np.asarray(priors, dtype=float)
    if P.shape != Q.shape:
        raise PropagationError(f"Priors must have shape {Q.shape}, got {P.shape}")
    if len(labeled) and (np.any(P[labeled] < 0) or np.any(np.abs(P[labeled].sum(axis=1) - 1) > 1e-9)):
        raise PropagationError("Labeled priors must be probability distributions")
    Q[labeled] = P[labeled]
    return PropagationState(Q=Q, unlabeled=labels.unlabeled)


class _MidpointUpdate:
    """
    The entries of both graphs that feed unlabeled rows, symmetrized so that entry (i, j)
    carries the full weight with which q_i enters edge {i, j}.
    """

    def __init__(self, view: MixedView, unlabeled: np.ndarray):
        mask = np.zeros(view.node_count, dtype=bool)
        mask[unlabeled] = True
        self.similar = view.similar.symmetrized().restricted_to_rows(mask)
        self.dissimilar = view.dissimilar.symmetrized().restricted_to_rows(mask)
        self.node_count = view.node_count

    def __call__(self, state: PropagationState, cfg: PropagationConfig) -> PropagationState:
        Q = state.Q
        s, d = self.similar, self.dissimilar
        exponent = np.zeros((self.node_count, 2))
        mass = np.zeros(self.node_count)

        if cfg.gamma > 0 and len(s.rows):
            u = 0.5 * (Q[s.rows] + Q[s.cols])
            exponent += cfg.gamma * s.aggregate(np.log(u))
            mass += cfg.gamma * s.row_sums()
        if cfg.gamma < 1 and len(d.rows):
            z = 0.5 * (Q[d.rows] + Q[d.cols][:, ::-1])
            exponent += (1.0 - cfg.gamma) * d.aggregate(np.log(z))
            mass += (1.0 - cfg.gamma) * d.row_sums()

        free = state.unlabeled[mass[state.unlabeled] > 0]
        new_Q = Q.copy()
        if len(free):
            logits = exponent[free] / mass[free, None]
            logits -= logits.max(axis=1, keepdims=True)
            q = np.exp(logits)
            q /= q.sum(axis=1, keepdims=True)
            q = np.maximum(q, cfg.prob_floor)
            new_Q[free] = q / q.sum(axis=1, keepdims=True)

        max_delta = float(np.max(np.abs(new_Q[free] - Q[free]))) if len(free) else 0.0
        return replace(state, Q=new_Q, iteration=state.iteration + 1, max_delta=max_delta)


def _warm_started(state: PropagationState, initial: np.ndarray, prob_floor: float) -> PropagationState:
    initial = np.asarray(initial, dtype=float)
    if initial.shape != state.Q.shape:
        raise PropagationError(f"Initial estimate must have shape {state.Q.shape}, got {initial.shape}")
    rows = np.maximum(initial[state.unlabeled], prob_floor)
    Q = state.Q.copy()
    Q[state.unlabeled] = rows / rows.sum(axis=1, keepdims=True)
    return replace(state, Q=Q)


def ir_step(state: PropagationState, view: MixedView, cfg: PropagationConfig) -> PropagationState:
    """
    One synchronous IR-MG iteration over every unlabeled node.
    """
    return _MidpointUpdate(view, state.unlabeled)(state, cfg)


def ir_run(
    g: MixedGraph,
    labels: LabelAssignment,
    priors: Optional[np.ndarray] = None,
    cfg: PropagationConfig = PropagationConfig(),
    callback: Optional[Callable[[PropagationState], None]] = None,
    initial: Optional[np.ndarray] = None,
) -> PropagationResult:
    """
    Iterates IR-MG until the largest change of an unlabeled probability drops below
    cfg.epsilon or cfg.max_iters iterations have run. initial, when given, replaces the class
    prior as the starting estimate of the unlabeled nodes (e.g. the posteriors of a nearby
    gamma); the minimizer is the same, only the iteration count changes.
    """
    view = mixed_view(g, cfg.normalize)
    state = init_state(view, labels, priors, cfg.prob_floor)
    if initial is not None:
        state = _warm_started(state, initial, cfg.prob_floor)
    update = _MidpointUpdate(view, state.unlabeled)

    converged = False
    while state.iteration < cfg.max_iters:
        state = update(state, cfg)
        if callback is not None:
            callback(state)
        if state.max_delta < cfg.epsilon:
            converged = True
            break

    if converged:
        log.debug("IR-MG converged after %d iterations (gamma=%g)", state.iteration, cfg.gamma)
    else:
        log.warning("IR-MG hit the %d iteration cap, last change %g", cfg.max_iters, state.max_delta)
    return PropagationResult(state.Q, state.iteration, converged)


def ir_baseline(
    g: SparseUndirectedGraph,
    labels: LabelAssignment,
    priors: Optional[np.ndarray] = None,
    cfg: PropagationConfig = PropagationConfig(gamma=1.0),
) -> PropagationResult:
    """
    Plain information regularization on a single similar graph, written out directly rather
    than through the mixed-graph update. cfg.gamma is ignored.
    """
    view = mixed_view(MixedGraph.similar_only(g), cfg.normalize)
    state = init_state(view, labels, priors, cfg.prob_floor)
    mask = np.zeros(g.node_count, dtype=bool)
    mask[state.unlabeled] = True
    edges = view.similar.symmetrized().restricted_to_rows(mask)
    mass = edges.row_sums()
    free = state.unlabeled[mass[state.unlabeled] > 0]

    Q = state.Q
    for iteration in range(1, cfg.max_iters + 1):
        log_u = np.log(0.5 * (Q[edges.rows] + Q[edges.cols]))
        logits = edges.aggregate(log_u)[free] / mass[free, None]
        q = np.exp(logits - logits.max(axis=1, keepdims=True))
        q = np.maximum(q / q.sum(axis=1, keepdims=True), cfg.prob_floor)
        new_Q = Q.copy()
        new_Q[free] = q / q.sum(axis=1, keepdims=True)
        delta = float(np.max(np.abs(new_Q[free] - Q[free]))) if len(free) else 0.0
        Q = new_Q
        if delta < cfg.epsilon:
            return PropagationResult(Q, iteration, True)
    return PropagationResult(Q, cfg.max_iters, False)
