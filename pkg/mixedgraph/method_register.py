"""
A register of the named callables the experiment runner and the command line dispatch to:
propagation methods ("ir-mg", "wvrn-mg") and mixed-graph extraction models ("extract",
"goldberg").
"""
from dataclasses import dataclass
from functools import partialmethod

from . import construction
from .ir_mg import PropagationConfig, ir_run
from .wvrn_mg import AnnealConfig, wvrn_run


@dataclass(frozen=True)
class RunSettings:
    """
    Everything a propagation method needs besides gamma.
    """
    epsilon: float = 0.001
    max_iters: int = 1000
    nu: float = 0.95
    prob_floor: float = 1e-12
    normalize: bool = True

    def propagation(self, gamma: float) -> PropagationConfig:
        return PropagationConfig(
            gamma=gamma,
            epsilon=self.epsilon,
            max_iters=self.max_iters,
            prob_floor=self.prob_floor,
            normalize=self.normalize,
        )

    def anneal(self, gamma: float) -> AnnealConfig:
        return AnnealConfig(
            gamma=gamma,
            nu=self.nu,
            epsilon=self.epsilon,
            max_iters=self.max_iters,
            normalize=self.normalize,
        )


class MethodRegister:
    def __init__(self):
        self.methods = {}

    def register_method(self, function, namespace, name=None):
        name = name or function.__name__.replace("_", "-")
        if (namespace, name) in self.methods:
            raise RuntimeError(f"An implementation already exists for {namespace}::{name}")
        self.methods[namespace, name] = function
        return function

    propagator = partialmethod(register_method, namespace="method")
    extractor = partialmethod(register_method, namespace="model")

    def get(self, namespace, name):
        try:
            return self.methods[namespace, name]
        except KeyError:
            raise ValueError(f"Unknown {namespace} {name!r}, expected one of {self.names(namespace)}") from None

    def names(self, namespace):
        return sorted(name for ns, name in self.methods if ns == namespace)

    def load_builtins(self):
        """
        Registers the two propagation methods and the two extraction models.

        Propagation methods are called as fn(mixed_graph, labels, gamma, settings) and return a
        PropagationResult; extraction models as fn(graph, truth, labeled, extraction_spec) and
        return a MixedGraph. Methods marked warm_start also take initial=, a posterior matrix
        to start the unlabeled nodes from.
        """

        @self.propagator
        def ir_mg(g, labels, gamma, settings, initial=None):
            return ir_run(g, labels, cfg=settings.propagation(gamma), initial=initial)

        # reaches a minimizer of the same convex objective from any starting estimate
        ir_mg.warm_start = True

        @self.propagator
        def wvrn_mg(g, labels, gamma, settings):
            return wvrn_run(g, labels, cfg=settings.anneal(gamma))

        self.extractor(construction.extract_mixed, name=construction.EXTRACT)
        self.extractor(construction.goldberg_mixed, name=construction.GOLDBERG)
        return self


def builtin_register() -> MethodRegister:
    return MethodRegister().load_builtins()
