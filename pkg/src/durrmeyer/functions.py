"""Registry of test functions on [0, 1] with analytic derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

SMOOTHNESS_TAGS = ("C0", "C1", "C2", "C6", "BV-derivative")


@dataclass(frozen=True)
class FunctionSpec:
    """A named function on [0, 1].

    ``derivatives`` maps an order in 1..6 to a vectorized callable.  Orders
    that are missing are simply unavailable (e.g. for non-smooth functions).
    """

    name: str
    eval: Callable[[np.ndarray], np.ndarray]
    derivatives: Mapping[int, Callable[[np.ndarray], np.ndarray]] = field(default_factory=dict)
    smoothness_tag: str = "C6"

    def __post_init__(self):
        if self.smoothness_tag not in SMOOTHNESS_TAGS:
            raise ValueError(f"unknown smoothness tag {self.smoothness_tag!r}")
        bad = [k for k in self.derivatives if not 1 <= k <= 6]
        if bad:
            raise ValueError(f"derivative orders must lie in 1..6, got {bad}")

    def __call__(self, x):
        return self.eval(np.asarray(x, dtype=float))

    def derivative(self, order: int) -> Callable[[np.ndarray], np.ndarray]:
        try:
            d = self.derivatives[order]
        except KeyError:
            raise KeyError(f"function {self.name!r} has no derivative of order {order}") from None
        return lambda x: d(np.asarray(x, dtype=float))


def _monomial(j: int) -> FunctionSpec:
    def make(order: int):
        if order > j:
            return lambda x: np.zeros_like(x)
        c = math.perm(j, order)
        p = j - order
        return lambda x: c * x**p + 0.0 * x

    return FunctionSpec(
        name=f"e{j}",
        eval=lambda x: x**j + 0.0 * x,
        derivatives={k: make(k) for k in range(1, 7)},
        smoothness_tag="C6",
    )


def _sin_pi_derivative(order: int):
    scale = math.pi**order
    # d^k/dx^k sin(pi x) = pi^k sin(pi x + k pi/2)
    return lambda x: scale * np.sin(math.pi * x + order * math.pi / 2)


def _runge_derivative(order: int):
    # 1/(1+z^2) = Im(1/(z - i)) with z = 5(x - 1/2); differentiate the pole.
    sign_fact = (-1) ** order * math.factorial(order) * 5.0**order

    def d(x):
        z = 5.0 * (x - 0.5)
        return sign_fact * np.imag(1.0 / (z - 1j) ** (order + 1))

    return d


def _build_registry() -> dict[str, FunctionSpec]:
    reg = {f"e{j}": _monomial(j) for j in range(4)}
    reg["sin_pi"] = FunctionSpec(
        "sin_pi",
        lambda x: np.sin(math.pi * x),
        {k: _sin_pi_derivative(k) for k in range(1, 7)},
        "C6",
    )
    reg["expx"] = FunctionSpec("expx", np.exp, {k: np.exp for k in range(1, 7)}, "C6")
    reg["abs_mid"] = FunctionSpec(
        "abs_mid",
        lambda x: np.abs(x - 0.5),
        {1: lambda x: np.sign(x - 0.5)},
        "BV-derivative",
    )
    reg["runge"] = FunctionSpec(
        "runge",
        lambda x: 1.0 / (1.0 + 25.0 * (x - 0.5) ** 2),
        {k: _runge_derivative(k) for k in range(1, 7)},
        "C6",
    )
    reg["sqrtx"] = FunctionSpec("sqrtx", np.sqrt, {}, "C0")
    return reg


REGISTRY: dict[str, FunctionSpec] = _build_registry()


def get_function(name: str) -> FunctionSpec:
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown function {name!r}; known: {', '.join(REGISTRY)}") from None
