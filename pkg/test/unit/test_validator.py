"""
Validator unit tests.
"""
from mixedgraph import main, validator
from mixedgraph.validator import InvalidSpecError
import pytest


def filled(spec):
    main.fill_spec_defaults(spec)
    return spec


@pytest.fixture
def spec():
    """
    Returns a minimal valid experiment spec with the defaults filled in.
    """
    return filled({
        "dataset": {"type": "g50c", "n": 100, "d": 5, "k": 10},
        "methods": ["ir-mg", "wvrn-mg"],
        "p_percent": [0, 10],
        "gamma_policies": ["cv", "nac", 0.5],
    })


def test_valid_spec(spec):
    validator.run(spec)
    assert spec["dataset"]["sigma"] == "auto"
    assert spec["realizations"] == 25


def test_files_dataset():
    validator.run(filled({"dataset": {"type": "files", "edges": "g.tsv", "labels": "l.tsv"}, "methods": ["ir-mg"]}))


@pytest.mark.parametrize("key", ["dataset", "methods"])
def test_spec_missing_required_key(spec, key):
    del spec[key]
    with pytest.raises(InvalidSpecError):
        validator.run(spec)


def test_spec_must_be_an_object():
    with pytest.raises(InvalidSpecError):
        validator.run([])


@pytest.mark.parametrize("dataset", [
    {"n": 100, "d": 5, "k": 10},
    {"type": "mnist"},
    {"type": "g50c", "n": 100, "d": 5},
    {"type": "g50c", "n": 100, "d": 5, "k": 0},
    {"type": "g50c", "n": 100.5, "d": 5, "k": 10},
    {"type": "g50c", "n": 100, "d": 5, "k": 10, "bayes_error": 0.7},
    {"type": "g50c", "n": 100, "d": 5, "k": 10, "sigma": "wide"},
    {"type": "files", "edges": "g.tsv"},
    {"type": "files", "edges": "g.tsv", "labels": 3},
])
def test_bad_datasets(spec, dataset):
    spec["dataset"] = dataset
    with pytest.raises(InvalidSpecError):
        validator.run(spec)


@pytest.mark.parametrize("key,value", [
    ("methods", ["label-spreading"]),
    ("methods", []),
    ("num_labeled", [1]),
    ("p_percent", [120]),
    ("p_percent", 10),
    ("gamma_policies", ["median"]),
    ("gamma_policies", [1.5]),
    ("model", "random"),
    ("baseline", 1),
    ("realizations", 0),
    ("realizations", True),
    ("cv_folds", 1),
    ("epsilon", 0),
    ("max_iters", 0),
    ("nu", 1.0),
    ("nu", 0),
    ("grid", [0.5, 2.0]),
])
def test_bad_values(spec, key, value):
    spec[key] = value
    with pytest.raises(InvalidSpecError):
        validator.run(spec)


def test_p_percent_may_be_omitted(spec):
    spec["p_percent"] = None
    validator.run(spec)


def test_assert_number():
    validator.assert_number(3, low=1, integer=True)
    validator.assert_number(0.5, low=0.0, high=1.0)
    with pytest.raises(InvalidSpecError):
        validator.assert_number(False)
    with pytest.raises(InvalidSpecError):
        validator.assert_number("3")


@pytest.mark.parametrize("key,value", [
    ("bayes_error", 0.0),
    ("bayes_error", 0.5),
    ("balance", 0.0),
    ("balance", 1.0),
    ("n", 1),
])
def test_generator_parameters_reject_endpoints(spec, key, value):
    spec["dataset"][key] = value
    with pytest.raises(InvalidSpecError, match=f"'{key}'"):
        validator.run(spec)
