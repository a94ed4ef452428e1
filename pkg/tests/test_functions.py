import numpy as np
import pytest

from durrmeyer.functions import REGISTRY, FunctionSpec, get_function

X = np.linspace(0.05, 0.95, 37)


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_derivatives_match_finite_differences(name):
    f = REGISTRY[name]
    h = 1e-5
    for order in sorted(f.derivatives):
        lower = f if order == 1 else f.derivative(order - 1)
        fd = (lower(X + h) - lower(X - h)) / (2 * h)
        exact = f.derivative(order)(X)
        if name == "abs_mid":
            keep = np.abs(X - 0.5) > 2 * h
            fd, exact = fd[keep], exact[keep]
        scale = max(1.0, float(np.max(np.abs(exact))))
        assert np.max(np.abs(fd - exact)) < 1e-4 * scale


def test_unknown_name():
    with pytest.raises(KeyError):
        get_function("nope")


def test_missing_derivative_and_bad_tag():
    with pytest.raises(KeyError):
        get_function("sqrtx").derivative(1)
    with pytest.raises(ValueError):
        FunctionSpec("g", lambda x: x, smoothness_tag="C9")
