"""
Validates an experiment spec to make sure it is well-formed. This should also serve as
documentation for what makes a valid experiment spec:

    {
        "dataset": {"type": "g50c", "n": 550, "d": 50, "k": 50, ...}
                 | {"type": "files", "edges": "graph.tsv", "labels": "labels.tsv"},
        "methods": ["ir-mg", "wvrn-mg"],
        "num_labeled": [50],
        "p_percent": [0, 10, 20],
        "gamma_policies": ["cv", "nac", 0.5],
        ...
    }

Missing optional fields are filled in by main.fill_spec_defaults before validation.
"""
import logging
import numbers

from .construction import EXTRACT, GOLDBERG
from .evaluation import POLICIES
from .method_register import builtin_register

log = logging.getLogger(__name__)

DATASET_TYPES = ("g50c", "files")
MODELS = (EXTRACT, GOLDBERG)


class InvalidSpecError(RuntimeError):
    """
    Raised if the validation step on the experiment spec fails.
    """


def assert_type(object, expected_type):
    if not isinstance(object, expected_type):
        raise InvalidSpecError(f"{object=} must be a {expected_type}, got {type(object)}")


def assert_property(object, property: str):
    if property not in object:
        raise InvalidSpecError(f"'{property}' is missing from {object}")


def assert_number(value, low=None, high=None, integer=False):
    expected = numbers.Integral if integer else numbers.Real
    if isinstance(value, bool) or not isinstance(value, expected):
        raise InvalidSpecError(f"{value=} must be {'an integer' if integer else 'a number'}")
    if (low is not None and value < low) or (high is not None and value > high):
        raise InvalidSpecError(f"{value=} must lie in [{low}, {high}]")


def assert_open_interval(key: str, value, low, high):
    assert_number(value)
    if not low < value < high:
        raise InvalidSpecError(f"'{key}' must lie strictly between {low} and {high}, got {value}")


def assert_list(spec, key: str):
    values = spec[key]
    assert_type(values, list)
    if not values:
        raise InvalidSpecError(f"'{key}' must not be empty")
    return values


def validate_dataset(dataset):
    assert_type(dataset, dict)
    assert_property(dataset, "type")
    kind = dataset["type"]
    if kind not in DATASET_TYPES:
        raise InvalidSpecError(f"Unknown dataset type {kind!r}, expected one of {DATASET_TYPES}")

    if kind == "files":
        for key in ("edges", "labels"):
            assert_property(dataset, key)
            assert_type(dataset[key], str)
        if dataset.get("positive") is not None:
            assert_number(dataset["positive"], integer=True)
        return

    for key in ("n", "d", "k"):
        assert_property(dataset, key)
        assert_number(dataset[key], low=1, integer=True)
    if dataset["n"] < 2:
        raise InvalidSpecError(f"'n' must be at least 2, got {dataset['n']}")
    assert_open_interval("bayes_error", dataset.get("bayes_error", 0.05), 0.0, 0.5)
    assert_open_interval("balance", dataset.get("balance", 0.5), 0.0, 1.0)
    assert_number(dataset.get("seed", 0), integer=True)
    sigma = dataset.get("sigma", "auto")
    if sigma != "auto":
        assert_number(sigma, low=0.0)


def validate_gamma_policy(policy):
    if isinstance(policy, str):
        if policy not in POLICIES:
            raise InvalidSpecError(f"Unknown gamma policy {policy!r}, expected a number or one of {POLICIES}")
    else:
        assert_number(policy, low=0.0, high=1.0)


def run(spec):
    """
    Runs the validator against the given spec, raising an exception if there is an error in
    the schema.
    """
    assert_type(spec, dict)
    for key in ("dataset", "methods"):
        if key not in spec:
            raise InvalidSpecError(f"Spec must contain '{key}'")
    validate_dataset(spec["dataset"])

    known = builtin_register().names("method")
    for method in assert_list(spec, "methods"):
        if method not in known:
            raise InvalidSpecError(f"Unknown method {method!r}, expected one of {known}")

    for num_labeled in assert_list(spec, "num_labeled"):
        assert_number(num_labeled, low=2, integer=True)

    if spec["p_percent"] is not None:
        for p in assert_list(spec, "p_percent"):
            assert_number(p, low=0.0, high=100.0)

    for policy in assert_list(spec, "gamma_policies"):
        validate_gamma_policy(policy)

    if spec["model"] not in MODELS:
        raise InvalidSpecError(f"Unknown model {spec['model']!r}, expected one of {MODELS}")
    assert_type(spec["baseline"], bool)
    assert_type(spec["normalize"], bool)
    assert_number(spec["realizations"], low=1, integer=True)
    assert_number(spec["base_seed"], integer=True)
    assert_number(spec["cv_folds"], low=2, integer=True)
    assert_number(spec["epsilon"], low=0.0)
    if spec["epsilon"] == 0:
        raise InvalidSpecError("'epsilon' must be positive")
    assert_number(spec["max_iters"], low=1, integer=True)
    assert_number(spec["nu"], low=0.0, high=1.0)
    if spec["nu"] in (0, 1):
        raise InvalidSpecError("'nu' must lie strictly between 0 and 1")
    for gamma in assert_list(spec, "grid"):
        assert_number(gamma, low=0.0, high=1.0)

    log.info("Experiment spec valid")
