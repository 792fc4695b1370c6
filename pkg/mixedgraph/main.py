"""
Entry points for the mixedgraph commands, one main_* function per subcommand.
"""
import json
import logging
import pathlib
from dataclasses import asdict, dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from . import __version__, construction, evaluation, formats, validator
from .assortativity import FallbackRequired, NacUndefinedError, graph_nac
from .graph import DISSIMILAR, SIMILAR, LabelAssignment, MixedGraph
from .method_register import RunSettings, builtin_register
from .utilities import file_digest, fmt, resolve_jobs, rounded

log = logging.getLogger(__name__)

SPEC_DEFAULTS = {
    "num_labeled": [50],
    "p_percent": None,
    "gamma_policies": ["cv"],
    "model": construction.EXTRACT,
    "baseline": False,
    "realizations": 25,
    "base_seed": 0,
    "cv_folds": 5,
    "grid": list(evaluation.DEFAULT_GRID),
    "epsilon": 0.001,
    "nu": 0.95,
    "max_iters": 1000,
    "normalize": True,
}

G50C_DEFAULTS = {"bayes_error": 0.05, "balance": 0.5, "seed": 0, "sigma": "auto"}


@dataclass
class RunManifest:
    """
    What produced an output: enough to re-run the command and get the same bytes back.
    """
    command: str
    argv: List[str]
    flags: Dict[str, object]
    seeds: Dict[str, int] = field(default_factory=dict)
    inputs: Dict[str, str] = field(default_factory=dict)
    version: str = __version__

    def add_input(self, path: pathlib.Path):
        self.inputs[str(path)] = file_digest(path)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        try:
            return cls(**data)
        except TypeError as e:
            raise ValueError(f"Malformed manifest: {e}") from e


def manifest_path(output: pathlib.Path) -> pathlib.Path:
    return output.with_name(output.name + ".manifest.json")


def write_manifest(output: pathlib.Path, manifest: RunManifest):
    with manifest_path(output).open("w") as handle:
        json.dump(manifest.to_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_manifest(path: pathlib.Path) -> RunManifest:
    with path.open() as handle:
        manifest = RunManifest.from_dict(json.load(handle))
    if manifest.version != __version__:
        log.warning("Manifest was written by version %s, replaying with %s", manifest.version, __version__)
    for name, digest in manifest.inputs.items():
        if not pathlib.Path(name).exists():
            log.warning("Input %s no longer exists", name)
        elif file_digest(pathlib.Path(name)) != digest:
            log.warning("Input %s has changed since the manifest was written", name)
    return manifest


def load_spec(specfile: pathlib.Path):
    with specfile.open() as specfile_handle:
        spec = json.load(specfile_handle)
    fill_spec_defaults(spec)
    validator.run(spec)
    return spec


def fill_spec_defaults(spec):
    if not isinstance(spec, dict):
        return
    for key, value in SPEC_DEFAULTS.items():
        spec.setdefault(key, value)
    dataset = spec.get("dataset")
    if isinstance(dataset, dict) and dataset.get("type") == "g50c":
        for key, value in G50C_DEFAULTS.items():
            dataset.setdefault(key, value)


def _node_count(*groups) -> int:
    return max((max(group) + 1 for group in groups if len(group)), default=0)


def _truth(labels: Dict[int, int], node_count: int, labels_file) -> np.ndarray:
    truth = formats.labels_array(labels, node_count)
    if missing := np.flatnonzero(truth == 0).tolist():
        raise formats.FormatError(labels_file, None, f"No label for nodes {missing[:10]}")
    return truth


def _labeled_nodes(labeled_file, node_count: int) -> np.ndarray:
    nodes = formats.read_node_set(labeled_file)
    if len(set(nodes)) != len(nodes):
        raise formats.FormatError(labeled_file, None, "A node is listed twice")
    if out_of_range := [node for node in nodes if node >= node_count]:
        raise formats.FormatError(labeled_file, None, f"Nodes {out_of_range[:10]} are not in the graph")
    return np.array(nodes, dtype=np.int64)


def main_gen_g50c(
    n: int,
    d: int,
    bayes_error: float,
    balance: float,
    seed: int,
    features_out: pathlib.Path,
    labels_out: pathlib.Path,
):
    """
    Entry point for the gen-g50c tool.
    """
    X, classes = construction.gen_two_gaussians(n, d, bayes_error, balance, seed)
    formats.write_features(features_out, X)
    formats.write_labels(labels_out, classes)
    log.info("Wrote %d points in %d dimensions", n, d)
    return X, classes


def main_build_knn(features: pathlib.Path, k: int, sigma: Union[float, str], out: pathlib.Path) -> MixedGraph:
    """
    Entry point for the build-knn tool.
    """
    X = formats.read_features(features)
    g = MixedGraph.similar_only(construction.knn_gaussian_graph(X, k, sigma))
    formats.write_edges(out, g)
    log.info("Wrote %d edges over %d nodes", g.similar.edge_count, g.node_count)
    return g


def main_split_mixed(
    edges: pathlib.Path,
    labels: pathlib.Path,
    labeled: pathlib.Path,
    p_percent: float,
    model: str,
    seed: int,
    out: pathlib.Path,
    positive: Optional[int] = None,
) -> MixedGraph:
    """
    Entry point for the split-mixed tool.
    """
    label_map = formats.read_labels(labels, positive)
    graph = formats.load_mixed(edges, _node_count(label_map)).flattened()
    truth = _truth(label_map, graph.node_count, labels)
    nodes = _labeled_nodes(labeled, graph.node_count)

    extract = builtin_register().get("model", model)
    mixed = extract(graph, truth, nodes, construction.ExtractionSpec(p_percent, seed))
    formats.write_edges(out, mixed)
    log.info(
        "Wrote %d similar and %d dissimilar edges", mixed.similar.edge_count, mixed.dissimilar.edge_count
    )
    return mixed


def main_nac(
    edges: pathlib.Path,
    labels: pathlib.Path,
    labeled: Optional[pathlib.Path] = None,
    restrict_labeled: bool = False,
    positive: Optional[int] = None,
) -> Dict[str, float]:
    """
    Entry point for the nac tool. Prints the NAC of each edge kind present in the file and
    raises NacUndefinedError if any of them is undefined.
    """
    label_map = formats.read_labels(labels, positive)
    g = formats.load_mixed(edges, _node_count(label_map))
    classes = formats.labels_array(label_map, g.node_count)
    if labeled is not None:
        known = np.zeros(g.node_count, dtype=bool)
        known[_labeled_nodes(labeled, g.node_count)] = True
        classes[~known] = 0

    values, undefined = {}, []
    for kind, graph in ((SIMILAR, g.similar), (DISSIMILAR, g.dissimilar)):
        if not graph.edge_count:
            log.info("No %s edges", kind)
            continue
        try:
            values[kind] = graph_nac(graph, classes, restrict_to_labeled=restrict_labeled)
        except NacUndefinedError as e:
            undefined.append(f"{kind}: {e}")
            continue
        print(f"{kind}\t{fmt(values[kind])}")

    if undefined or not values:
        raise NacUndefinedError("; ".join(undefined) or "The edge file is empty")
    return values


def main_run(
    method: str,
    mixed: pathlib.Path,
    labels: pathlib.Path,
    labeled: Optional[pathlib.Path],
    gamma: Union[float, str],
    settings: RunSettings,
    out: pathlib.Path,
    cv_folds: int = 5,
    grid: Sequence[float] = evaluation.DEFAULT_GRID,
    seed: int = 0,
    positive: Optional[int] = None,
):
    """
    Entry point for the run tool. gamma is a number in [0, 1], "nac" (falling back to
    cross-validation when NAC cannot be computed) or "cv".
    """
    label_map = formats.read_labels(labels, positive)
    g = formats.load_mixed(mixed, _node_count(label_map))
    if labeled is not None:
        nodes = _labeled_nodes(labeled, g.node_count)
        if unknown := [int(node) for node in nodes if node not in label_map]:
            raise formats.FormatError(labels, None, f"No label for labeled nodes {unknown[:10]}")
        label_map = {int(node): label_map[int(node)] for node in nodes}
    assignment = LabelAssignment.from_mapping(g.node_count, label_map)

    run = builtin_register().get("method", method)
    if gamma == "nac":
        try:
            gamma = evaluation.nac_gamma(g, assignment)
        except FallbackRequired as e:
            log.info("Falling back to cross-validation for gamma: %s", e)
            gamma = "cv"
    if gamma == "cv":
        gamma = evaluation.cv_gamma(g, assignment, method, grid, cv_folds, settings, seed)
    log.info("Running %s with gamma=%s", method, fmt(gamma))

    result = run(g, assignment, float(gamma), settings)
    formats.write_posterior(out, result.Q)
    return result, float(gamma)


def load_dataset(dataset: dict, root: pathlib.Path) -> evaluation.Dataset:
    """
    Builds the dataset an experiment spec describes. Relative file paths are resolved against
    root, the directory of the spec file.
    """
    if dataset["type"] == "g50c":
        X, truth = construction.gen_two_gaussians(
            dataset["n"], dataset["d"], dataset["bayes_error"], dataset["balance"], dataset["seed"]
        )
        graph = construction.knn_gaussian_graph(X, dataset["k"], dataset["sigma"])
        return evaluation.Dataset(truth=truth, graph=graph)

    edges, labels = root / dataset["edges"], root / dataset["labels"]
    label_map = formats.read_labels(labels, dataset.get("positive"))
    g = formats.load_mixed(edges, _node_count(label_map))
    truth = _truth(label_map, g.node_count, labels)
    if g.dissimilar.edge_count:
        return evaluation.Dataset(truth=truth, mixed=g)
    return evaluation.Dataset(truth=truth, graph=g.similar)


def experiment_specs(spec: dict) -> List[evaluation.ExperimentSpec]:
    settings = RunSettings(
        epsilon=spec["epsilon"], max_iters=spec["max_iters"], nu=spec["nu"], normalize=spec["normalize"]
    )
    p_values = spec["p_percent"] if spec["p_percent"] is not None else [None]
    return [
        evaluation.ExperimentSpec(
            method=method,
            num_labeled=num_labeled,
            p_percent=p_percent,
            gamma_policy=policy,
            realizations=spec["realizations"],
            base_seed=spec["base_seed"],
            model=spec["model"],
            baseline=spec["baseline"],
            cv_folds=spec["cv_folds"],
            grid=tuple(spec["grid"]),
            settings=settings,
        )
        for method, num_labeled, p_percent, policy in product(
            spec["methods"], spec["num_labeled"], p_values, spec["gamma_policies"]
        )
    ]


def main_evaluate(
    specfile: pathlib.Path,
    out: pathlib.Path,
    jobs: int = 1,
    manifest: Optional[RunManifest] = None,
) -> dict:
    """
    Entry point for the evaluate tool: every combination of method, labeled-set size, P and
    gamma policy in the spec, each run over the spec's realizations.
    """
    spec = load_spec(specfile)
    dataset_spec = spec["dataset"]
    root = specfile.parent
    dataset = load_dataset(dataset_spec, root)
    if dataset.mixed is not None and spec["p_percent"] is not None:
        raise validator.InvalidSpecError("'p_percent' needs a single-graph dataset, the given one is already mixed")

    if manifest is not None:
        manifest.seeds["base_seed"] = spec["base_seed"]
        if dataset_spec["type"] == "g50c":
            manifest.seeds["dataset_seed"] = dataset_spec["seed"]
        else:
            manifest.add_input(root / dataset_spec["edges"])
            manifest.add_input(root / dataset_spec["labels"])

    workers = resolve_jobs(jobs)
    experiments = [
        evaluation.run_experiment(dataset, cell, workers).to_dict() for cell in experiment_specs(spec)
    ]
    report = {"experiments": experiments}
    if len(experiments) == 1:
        for key in ("mean_auc", "std_auc", "realizations"):
            report[key] = experiments[0][key]
    if manifest is not None:
        report["manifest"] = manifest.to_dict()

    with out.open("w") as handle:
        json.dump(rounded(report), handle, indent=2)
        handle.write("\n")
    log.info("Done! Ran %d experiments", len(experiments))
    return report
