"""
Integration tests that drive the command line through a full pipeline: synthetic data, a kNN
graph, a mixed graph, propagation, replay and a small experiment.
"""
import json
from pathlib import Path

from mixedgraph import cli, formats
import numpy as np
import pytest


# The directory that this file is in. The experiment spec is also located here.
@pytest.fixture
def src_path():
    return Path(__file__).parent


def run(*argv):
    return cli.main([str(arg) for arg in argv])


@pytest.fixture
def pipeline(tmp_path):
    """
    Generates 60 points, their kNN graph and a labeled set of five nodes per class.
    """
    features, labels, knn = tmp_path / "X.csv", tmp_path / "labels.tsv", tmp_path / "knn.tsv"
    assert run("gen-g50c", "--n", 60, "--d", 5, "--bayes-error", 0.3, "--seed", 1, "-o", features, "-o", labels) == 0
    assert run("build-knn", "--features", features, "--k", 5, "-o", knn) == 0

    classes = formats.labels_array(formats.read_labels(labels), 60)
    labeled = tmp_path / "labeled.txt"
    formats.write_node_set(labeled, np.concatenate([np.flatnonzero(classes == 1)[:5], np.flatnonzero(classes == 2)[:5]]))
    return tmp_path, labels, knn, labeled


def test_pipeline(pipeline):
    tmp_path, labels, knn, labeled = pipeline
    mixed, posterior = tmp_path / "mixed.tsv", tmp_path / "q.csv"

    assert run("split-mixed", "--edges", knn, "--labels", labels, "--labeled", labeled, "--p", 50, "-o", mixed) == 0
    g = formats.load_mixed(mixed)
    assert g.dissimilar.edge_count > 0
    assert g.flattened().same_edges(formats.load_mixed(knn).similar)

    assert run(
        "run", "--method", "ir-mg", "--mixed", mixed, "--labels", labels, "--labeled", labeled,
        "--gamma", "cv", "--grid", 0.0, 0.5, 1.0, "-o", posterior
    ) == 0
    lines = posterior.read_text().splitlines()
    assert lines[0] == "node,q1,q2,predicted"
    assert len(lines) == 61

    manifest = json.loads((tmp_path / "q.csv.manifest.json").read_text())
    assert manifest["command"] == "run"
    assert manifest["flags"]["gamma"] == "cv"
    assert set(manifest["inputs"]) == {str(mixed), str(labels), str(labeled)}
    assert (tmp_path / "X.csv.manifest.json").exists()
    assert (tmp_path / "labels.tsv.manifest.json").exists()


def test_zero_percent_split_keeps_the_graph(pipeline):
    tmp_path, labels, knn, labeled = pipeline
    p0 = tmp_path / "p0.tsv"
    assert run("split-mixed", "--edges", knn, "--labels", labels, "--labeled", labeled, "--p", 0, "-o", p0) == 0
    assert p0.read_bytes() == knn.read_bytes()

    for method in ("ir-mg", "wvrn-mg"):
        outputs = []
        for edges in (p0, knn):
            out = tmp_path / f"{method}-{edges.stem}.csv"
            assert run(
                "run", "--method", method, "--mixed", edges, "--labels", labels, "--labeled", labeled,
                "--gamma", 1.0, "-o", out
            ) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]


def test_replay_reproduces_the_output(pipeline):
    tmp_path, labels, knn, labeled = pipeline
    mixed, posterior = tmp_path / "mixed.tsv", tmp_path / "q.csv"
    assert run("split-mixed", "--edges", knn, "--labels", labels, "--labeled", labeled, "--p", 30, "--seed", 4, "-o", mixed) == 0
    assert run(
        "run", "--method", "wvrn-mg", "--mixed", mixed, "--labels", labels, "--labeled", labeled,
        "--gamma", 0.7, "-o", posterior
    ) == 0

    expected = {path: path.read_bytes() for path in (mixed, posterior)}
    for path in expected:
        path.unlink()
    assert run("replay", "--manifest", tmp_path / "mixed.tsv.manifest.json") == 0
    assert run("replay", "--manifest", tmp_path / "q.csv.manifest.json") == 0
    assert {path: path.read_bytes() for path in expected} == expected


def test_nac_prints_each_kind(tmp_path, capsys):
    edges, labels = tmp_path / "g.tsv", tmp_path / "labels.tsv"
    edges.write_text("0\t1\t1.0\tS\n2\t3\t1.0\tS\n1\t2\t1.0\tD\n")
    labels.write_text("0\t+1\n1\t+1\n2\t-1\n3\t-1\n")
    assert run("nac", "--edges", edges, "--labels", labels) == 0
    assert capsys.readouterr().out.splitlines() == ["S\t1", "D\t-1"]


def test_evaluate(src_path, tmp_path):
    report_path = tmp_path / "report.json"
    assert run("evaluate", "--spec", src_path / "experiment_spec.json", "-o", report_path) == 0

    report = json.loads(report_path.read_text())
    assert len(report["experiments"]) == 1
    assert len(report["realizations"]) == 2
    assert 0.5 < report["mean_auc"] <= 1.0
    assert report["std_auc"] >= 0.0
    assert report["manifest"]["command"] == "evaluate"
    assert report["manifest"]["seeds"]["dataset_seed"] == 3
    assert report["experiments"][0]["p_percent"] == 20


def test_evaluate_files_dataset(pipeline):
    tmp_path, labels, knn, _ = pipeline
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "dataset": {"type": "files", "edges": knn.name, "labels": labels.name},
        "methods": ["ir-mg", "wvrn-mg"],
        "num_labeled": [10],
        "p_percent": [0, 20],
        "gamma_policies": ["nac"],
        "realizations": 2,
    }))
    report_path = tmp_path / "report.json"
    assert run("evaluate", "--spec", spec, "--jobs", 2, "-o", report_path) == 0

    report = json.loads(report_path.read_text())
    assert len(report["experiments"]) == 4
    assert "mean_auc" not in report
    assert set(report["manifest"]["inputs"]) == {str(spec), str(knn), str(labels)}


def test_evaluate_rejects_extraction_on_a_mixed_dataset(pipeline):
    tmp_path, labels, knn, labeled = pipeline
    mixed = tmp_path / "mixed.tsv"
    assert run("split-mixed", "--edges", knn, "--labels", labels, "--labeled", labeled, "--p", 50, "-o", mixed) == 0
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "dataset": {"type": "files", "edges": "mixed.tsv", "labels": "labels.tsv"},
        "methods": ["ir-mg"],
        "p_percent": [10],
    }))
    assert run("evaluate", "--spec", spec, "-o", tmp_path / "report.json") == 1
    assert not (tmp_path / "report.json").exists()
