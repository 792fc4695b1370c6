"""
Scoring and the experiment protocol: AUC, stratified labeled-set draws, cross-validated and
NAC-based choice of gamma, the multi-realization runner and a brute-force optimum of the
objective for small graphs.
"""
import itertools
import logging
from dataclasses import asdict, dataclass, field, replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import rankdata
from sklearn.model_selection import StratifiedKFold

from .assortativity import FallbackRequired, NacUndefinedError, gamma_from_nac, graph_nac
from .construction import EXTRACT, ExtractionSpec
from .divergence import ObjectiveParams, mixed_objective
from .graph import CLASS_1, CLASS_2, LabelAssignment, MixedGraph, SparseUndirectedGraph, mixed_view
from .ir_mg import init_state
from .method_register import RunSettings, builtin_register

log = logging.getLogger(__name__)

DEFAULT_GRID = tuple(round(0.1 * i, 1) for i in range(11))
POLICIES = ("nac", "cv", "best")


class EvaluationError(ValueError):
    """
    Raised when a score or an experiment cannot be computed from the given inputs.
    """


def auc(scores, truth, positive_class: int = CLASS_1, nodes: Optional[Sequence[int]] = None) -> float:
    """
    Probability that a random positive node outranks a random negative one, ties counting
    one half, computed from mid-ranks over the given nodes (all nodes by default).
    """
    scores = np.asarray(scores, dtype=float)
    truth = np.asarray(truth)
    if nodes is not None:
        nodes = np.asarray(nodes, dtype=np.int64)
        scores, truth = scores[nodes], truth[nodes]

    positive = truth == positive_class
    n_pos = int(positive.sum())
    n_neg = len(truth) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise EvaluationError("AUC needs at least one positive and one negative node")

    ranks = rankdata(scores)
    return float((ranks[positive].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def stratified_sample(truth, num_labeled: int, seed: int = 0) -> np.ndarray:
    """
    Draws num_labeled nodes keeping the class proportions of truth. The rounding remainder
    goes to the larger class and each class gets at least one node.
    """
    truth = np.asarray(truth)
    n = len(truth)
    if num_labeled < 2:
        raise EvaluationError(f"Need at least 2 labeled nodes, got {num_labeled}")
    if num_labeled > n:
        raise EvaluationError(f"Cannot label {num_labeled} of {n} nodes")

    pools = [np.flatnonzero(truth == label) for label in (CLASS_1, CLASS_2)]
    sizes = np.array([len(pool) for pool in pools])
    if (sizes == 0).any():
        raise EvaluationError("Stratified sampling needs both classes present")

    take = np.floor(num_labeled * sizes / n).astype(int)
    larger = int(np.argmax(sizes))
    take[larger] += num_labeled - take.sum()
    for c in (0, 1):
        if take[c] == 0:
            take[c], take[1 - c] = 1, take[1 - c] - 1
        if take[c] > sizes[c]:
            take[1 - c] += take[c] - sizes[c]
            take[c] = sizes[c]

    rng = np.random.default_rng(seed)
    chosen = np.concatenate([rng.choice(pool, size=k, replace=False) for pool, k in zip(pools, take)])
    return np.sort(chosen)


def _best_gamma(scores: dict) -> float:
    # highest score, then closest to 0.5, then smaller
    return max(scores, key=lambda gamma: (scores[gamma], -round(abs(gamma - 0.5), 12), -gamma))


def _check_grid(grid: Sequence[float]) -> Tuple[float, ...]:
    grid = tuple(float(gamma) for gamma in grid)
    if not grid:
        raise EvaluationError("The gamma grid is empty")
    outside = [gamma for gamma in grid if not 0.0 <= gamma <= 1.0]
    if outside:
        raise EvaluationError(f"Gamma grid values must lie in [0, 1], got {outside}")
    return grid


def cv_gamma(
    g: MixedGraph,
    labels: LabelAssignment,
    method: str = "ir-mg",
    grid: Sequence[float] = DEFAULT_GRID,
    folds: int = 5,
    settings: RunSettings = RunSettings(),
    seed: int = 0,
) -> float:
    """
    Stratified k-fold cross-validation over the labeled nodes. Each validation fold is hidden
    (treated as unlabeled) while the method runs, then scored by AUC; the gamma with the best
    mean validation AUC wins.
    """
    grid = _check_grid(grid)
    labeled = labels.labeled
    y = labels.classes[labeled]
    if folds < 2 or len(labeled) < folds:
        raise EvaluationError(f"Cannot run {folds}-fold cross-validation on {len(labeled)} labeled nodes")

    try:
        splits = list(StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed).split(labeled, y))
    except ValueError as e:
        raise EvaluationError(f"Cannot split the labeled nodes into {folds} folds: {e}") from e

    validation = []
    for fold, (_, held_out) in enumerate(splits):
        if len(np.unique(y[held_out])) < 2:
            log.warning("Skipping cross-validation fold %d: it holds a single class", fold)
            continue
        validation.append(labeled[held_out])
    if not validation:
        raise EvaluationError("Every cross-validation fold was skipped")

    run = builtin_register().get("method", method)
    warm_start = getattr(run, "warm_start", False)
    fold_aucs = {gamma: [] for gamma in grid}
    for nodes in validation:
        hidden = labels.hidden(nodes)
        previous = None
        for gamma in grid:
            if warm_start:
                result = run(g, hidden, gamma, settings, initial=previous)
                previous = result.Q
            else:
                result = run(g, hidden, gamma, settings)
            fold_aucs[gamma].append(auc(result.Q[:, 0], labels.classes, CLASS_1, nodes))
    scores = {gamma: float(np.mean(aucs)) for gamma, aucs in fold_aucs.items()}

    best = _best_gamma(scores)
    log.debug("Cross-validation AUC per gamma: %s -> %g", scores, best)
    return best


def nac_gamma(g: MixedGraph, labels: LabelAssignment, dissimilar_nac: Optional[float] = None) -> float:
    """
    gamma from the NAC of both graphs over labeled-labeled edges. When the dissimilar graph
    has no such edges its NAC is taken from dissimilar_nac (the known purity of an
    oracle-built dissimilar graph); without one, FallbackRequired is raised.
    """
    try:
        n_s = graph_nac(g.similar, labels.classes, restrict_to_labeled=True)
    except NacUndefinedError as e:
        raise FallbackRequired(str(e)) from e
    try:
        n_d = graph_nac(g.dissimilar, labels.classes, restrict_to_labeled=True)
    except NacUndefinedError as e:
        if dissimilar_nac is None:
            raise FallbackRequired(str(e)) from e
        n_d = dissimilar_nac
    return gamma_from_nac(n_s, n_d)


@dataclass(frozen=True)
class ExperimentSpec:
    method: str = "ir-mg"
    num_labeled: int = 50
    p_percent: Optional[float] = None
    gamma_policy: Union[float, str] = "cv"
    realizations: int = 25
    base_seed: int = 0
    model: str = EXTRACT
    baseline: bool = False
    cv_folds: int = 5
    grid: Tuple[float, ...] = DEFAULT_GRID
    settings: RunSettings = field(default_factory=RunSettings)

    def __post_init__(self):
        if self.realizations < 1:
            raise EvaluationError(f"realizations must be at least 1, got {self.realizations}")
        if self.num_labeled < 2:
            raise EvaluationError(f"num_labeled must be at least 2, got {self.num_labeled}")
        if isinstance(self.gamma_policy, str):
            if self.gamma_policy not in POLICIES:
                raise EvaluationError(f"Unknown gamma policy {self.gamma_policy!r}, expected a number or one of {POLICIES}")
        elif not 0.0 <= self.gamma_policy <= 1.0:
            raise EvaluationError(f"A fixed gamma must lie in [0, 1], got {self.gamma_policy}")
        if self.p_percent is not None and not 0.0 <= self.p_percent <= 100.0:
            raise EvaluationError(f"p_percent must lie in [0, 100], got {self.p_percent}")
        object.__setattr__(self, "grid", _check_grid(self.grid))


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    True classes plus either a single graph (split into a mixed graph per realization) or a
    mixed graph used as given.
    """
    truth: np.ndarray
    graph: Optional[SparseUndirectedGraph] = None
    mixed: Optional[MixedGraph] = None

    def __post_init__(self):
        if (self.graph is None) == (self.mixed is None):
            raise EvaluationError("A dataset holds either a single graph or a mixed graph")
        source = self.graph if self.graph is not None else self.mixed
        if len(self.truth) != source.node_count:
            raise EvaluationError(f"Truth covers {len(self.truth)} nodes, the graph has {source.node_count}")
        if not np.isin(self.truth, (CLASS_1, CLASS_2)).all():
            raise EvaluationError("Every node needs a true class of 1 or 2")


@dataclass(frozen=True)
class RealizationResult:
    auc: float
    iterations: int
    converged: bool
    gamma_used: float
    seed: int


@dataclass(frozen=True)
class ExperimentSummary:
    spec: ExperimentSpec
    mean_auc: float
    std_auc: float
    realizations: List[RealizationResult]

    def to_dict(self) -> dict:
        spec = self.spec
        return {
            "method": spec.method,
            "num_labeled": spec.num_labeled,
            "p_percent": spec.p_percent,
            "gamma_policy": spec.gamma_policy,
            "model": spec.model,
            "baseline": spec.baseline,
            "mean_auc": self.mean_auc,
            "std_auc": self.std_auc,
            "realizations": [asdict(r) for r in self.realizations],
        }


def realization_graph(dataset: Dataset, spec: ExperimentSpec, labeled: np.ndarray, seed: int) -> MixedGraph:
    if dataset.mixed is not None:
        if spec.baseline:
            return MixedGraph.similar_only(dataset.mixed.flattened())
        return dataset.mixed
    if spec.baseline or not spec.p_percent:
        return MixedGraph.similar_only(dataset.graph)
    extract = builtin_register().get("model", spec.model)
    return extract(dataset.graph, dataset.truth, labeled, ExtractionSpec(spec.p_percent, seed))


def resolve_gamma(
    g: MixedGraph,
    labels: LabelAssignment,
    dataset: Dataset,
    spec: ExperimentSpec,
    seed: int,
) -> float:
    policy = spec.gamma_policy
    if not isinstance(policy, str):
        return float(policy)
    if policy == "nac":
        # oracle-built dissimilar graphs are pure by construction
        purity = -1.0 if dataset.graph is not None and not spec.baseline else None
        try:
            return nac_gamma(g, labels, purity)
        except FallbackRequired as e:
            log.info("Falling back to cross-validation for gamma: %s", e)
            policy = "cv"
    if policy == "cv":
        return cv_gamma(g, labels, spec.method, spec.grid, spec.cv_folds, spec.settings, seed)

    # "best": the grid value with the highest test AUC, a reference for the other policies
    run = builtin_register().get("method", spec.method)
    scores = {
        gamma: auc(run(g, labels, gamma, spec.settings).Q[:, 0], dataset.truth, CLASS_1, labels.unlabeled)
        for gamma in spec.grid
    }
    return _best_gamma(scores)


def run_realization(dataset: Dataset, spec: ExperimentSpec, index: int) -> RealizationResult:
    seed = spec.base_seed + index
    labeled = stratified_sample(dataset.truth, spec.num_labeled, seed)
    labels = LabelAssignment.from_truth(dataset.truth, labeled)
    g = realization_graph(dataset, spec, labeled, seed)
    gamma = resolve_gamma(g, labels, dataset, spec, seed)

    result = builtin_register().get("method", spec.method)(g, labels, gamma, spec.settings)
    score = auc(result.Q[:, 0], dataset.truth, CLASS_1, labels.unlabeled)
    log.debug("Realization %d: gamma=%g auc=%.6g iterations=%d", index, gamma, score, result.iterations)
    return RealizationResult(
        auc=score,
        iterations=int(result.iterations),
        converged=bool(result.converged),
        gamma_used=float(gamma),
        seed=seed,
    )


def run_experiment(dataset: Dataset, spec: ExperimentSpec, jobs: int = 1) -> ExperimentSummary:
    """
    Runs spec.realizations independent realizations (seeds base_seed + 1, base_seed + 2, ...)
    and aggregates the AUC as mean and sample standard deviation.
    """
    indices = range(1, spec.realizations + 1)
    if jobs == 1:
        results = [run_realization(dataset, spec, r) for r in indices]
    else:
        results = Parallel(n_jobs=jobs)(delayed(run_realization)(dataset, spec, r) for r in indices)

    aucs = np.array([r.auc for r in results])
    std = float(np.std(aucs, ddof=1)) if len(aucs) > 1 else 0.0
    summary = ExperimentSummary(spec=spec, mean_auc=float(np.mean(aucs)), std_auc=std, realizations=list(results))
    log.info(
        "%s L=%d P=%s gamma=%s: AUC %.4f +- %.4f over %d realizations",
        spec.method, spec.num_labeled, spec.p_percent, spec.gamma_policy,
        summary.mean_auc, summary.std_auc, len(results)
    )
    return summary


def gamma_sweep(
    dataset: Dataset,
    spec: ExperimentSpec,
    grid: Sequence[float] = DEFAULT_GRID,
    jobs: int = 1,
) -> List[Tuple[float, ExperimentSummary]]:
    """
    The same experiment at each fixed gamma of the grid, for AUC-versus-gamma curves.
    """
    return [
        (gamma, run_experiment(dataset, replace(spec, gamma_policy=gamma), jobs))
        for gamma in _check_grid(grid)
    ]


def grid_search_oracle(
    g: MixedGraph,
    labels: LabelAssignment,
    priors: Optional[np.ndarray] = None,
    gamma: float = 0.5,
    step: float = 0.01,
    prob_floor: float = 1e-12,
    normalize: bool = True,
    max_unlabeled: int = 4,
    chunk: int = 100_000,
) -> Tuple[np.ndarray, float]:
    """
    Exhaustive minimum of the labeled-fixed objective (lambda_s = gamma, lambda_d = 1 - gamma)
    with every unlabeled q_i1 drawn from {floor, step, 2 step, ..., 1 - floor}. Returns the
    full posterior matrix and its objective value.
    """
    unlabeled = labels.unlabeled
    if len(unlabeled) > max_unlabeled:
        raise EvaluationError(f"Brute force supports at most {max_unlabeled} unlabeled nodes, got {len(unlabeled)}")
    if not 0.0 < step < 1.0:
        raise EvaluationError(f"step must lie in (0, 1), got {step}")

    view = mixed_view(g, normalize)
    params = ObjectiveParams.from_gamma(gamma)
    base = init_state(view, labels, priors, prob_floor).Q

    inner = np.arange(1, int(round(1.0 / step))) * step
    values = np.concatenate([[prob_floor], inner[inner < 1.0 - prob_floor], [1.0 - prob_floor]])

    best_Q, best_value = base, float("inf")
    if not len(unlabeled):
        return base, mixed_objective(base, None, None, view, params)

    combos = itertools.product(values, repeat=len(unlabeled))
    while True:
        block = np.array(list(itertools.islice(combos, chunk)))
        if not len(block):
            break
        Q = np.repeat(base[None], len(block), axis=0)
        Q[:, unlabeled, 0] = block
        Q[:, unlabeled, 1] = 1.0 - block
        objective = mixed_objective(Q, None, None, view, params)
        k = int(np.argmin(objective))
        if objective[k] < best_value:
            best_Q, best_value = Q[k].copy(), float(objective[k])
    return best_Q, best_value
