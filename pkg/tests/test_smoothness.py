import numpy as np
import pytest

from durrmeyer.functions import FunctionSpec, get_function
from durrmeyer.smoothness import (
    conservative_dt_modulus,
    conservative_modulus,
    dt_modulus,
    dt_modulus_curve,
    modulus,
    modulus_curve,
)


def test_examples():
    assert abs(modulus(get_function("e1"), 0.1).value - 0.1) < 1e-12
    assert modulus(get_function("e0"), 0.3).value == 0
    assert abs(modulus(get_function("abs_mid"), 0.2).value - 0.2) < 1e-12
    assert abs(dt_modulus(get_function("e1"), 0.2).value - 0.1) < 1e-3


def test_subadditive_and_monotone():
    f = get_function("sqrtx")
    d = np.array([0.01, 0.02, 0.05, 0.1, 0.2])
    w = modulus_curve(f, np.concatenate([d, 2 * d]))
    w1, w2 = w[: d.size], w[d.size :]
    assert np.all(np.diff(w1) >= 0)
    assert np.all(w2 <= 2 * w1 + 1e-12)


def test_order_two_annihilates_affine():
    f = FunctionSpec("aff", lambda x: 3.0 - 2.0 * x)
    assert dt_modulus_curve(f, [0.1, 0.5, 1.0], order=2).max() <= 1e-12


def test_conservative_not_below_raw():
    f = get_function("runge")
    d = [0.05, 0.3]
    assert np.all(conservative_modulus(f, d) >= modulus_curve(f, d))
    assert np.all(conservative_dt_modulus(f, d) >= dt_modulus_curve(f, d))


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        modulus(get_function("e1"), 0.0)
    with pytest.raises(ValueError):
        dt_modulus(get_function("e1"), 0.1, order=7)
