"""
Test driver for the builtin propagation methods and extraction models.
"""
from mixedgraph import graph, method_register
from mixedgraph.graph import SIMILAR, LabelAssignment
from mixedgraph.method_register import RunSettings
import numpy as np
import pytest


@pytest.fixture
def reg():
    """
    Returns a method register with the builtins loaded.
    """
    mreg = method_register.MethodRegister()
    mreg.load_builtins()
    return mreg


def dummy(g, labels, gamma, settings):
    return None


def test_builtin_names(reg):
    assert reg.names("method") == ["ir-mg", "wvrn-mg"]
    assert reg.names("model") == ["extract", "goldberg"]


def test_custom_function_lookup_success(reg):
    reg.propagator(dummy)
    assert reg.get("method", "dummy") == dummy
    reg.extractor(dummy, name="my-model")
    assert reg.get("model", "my-model") == dummy


def test_cannot_register_a_method_twice(reg):
    with pytest.raises(RuntimeError):
        reg.propagator(dummy, name="ir-mg")

    reg.extractor(dummy)
    with pytest.raises(RuntimeError):
        reg.extractor(dummy)


def test_same_name_in_another_namespace(reg):
    reg.extractor(dummy, name="ir-mg")
    assert reg.get("model", "ir-mg") == dummy


def test_unknown_name(reg):
    with pytest.raises(ValueError, match="ir-mg"):
        reg.get("method", "label-spreading")


@pytest.mark.parametrize("name", ["ir-mg", "wvrn-mg"])
def test_builtin_methods_run(reg, name):
    g = graph.build_graph(3, [(0, 1, 1.0, SIMILAR), (1, 2, 1.0, SIMILAR)])
    labels = LabelAssignment.from_mapping(3, {0: 1, 2: 1})
    result = reg.get("method", name)(g, labels, 1.0, RunSettings())
    assert result.converged
    assert result.Q[1, 0] > 0.99


def test_run_settings_forward_to_configs():
    settings = RunSettings(epsilon=0.01, max_iters=50, nu=0.9, normalize=False)
    propagation = settings.propagation(0.3)
    assert (propagation.gamma, propagation.epsilon, propagation.max_iters, propagation.normalize) == (0.3, 0.01, 50, False)
    anneal = settings.anneal(0.3)
    assert (anneal.gamma, anneal.nu, anneal.epsilon, anneal.max_iters) == (0.3, 0.9, 0.01, 50)


def test_builtin_register_is_fresh():
    first = method_register.builtin_register()
    first.propagator(dummy)
    assert "dummy" not in method_register.builtin_register().names("method")
    assert np.all([name in first.names("method") for name in ("dummy", "ir-mg")])


def test_only_ir_mg_chains_warm_starts(reg):
    assert reg.get("method", "ir-mg").warm_start
    assert not getattr(reg.get("method", "wvrn-mg"), "warm_start", False)
