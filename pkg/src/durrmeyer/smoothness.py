"""Grid estimates of the ordinary and Ditzian-Totik moduli of smoothness.

Both moduli are suprema over (x, h) pairs.  The estimates here scan a uniform
grid, so they are lower bounds that converge as the grid is refined.  Where a
modulus sits on the right side of an inequality, use the ``conservative_*``
helpers, which refine until stable and then inflate by 5%.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .functions import FunctionSpec

DEFAULT_XS = 512
DEFAULT_HS = 128
REFINE_RTOL = 0.01
INFLATION = 1.05
MAX_REFINEMENTS = 3


@dataclass(frozen=True)
class ModulusEstimate:
    value: float
    x_samples: int
    h_samples: int
    order: int = 1


def _lookup(h: np.ndarray, running: np.ndarray, deltas: np.ndarray) -> np.ndarray:
    # sup over grid steps h <= delta; 0 when no grid step qualifies
    idx = np.searchsorted(h, deltas * (1 + 1e-12), side="right")
    padded = np.concatenate([[0.0], running])
    return padded[idx]


def _step_grid(dmax: float, hs: int, extra: np.ndarray) -> np.ndarray:
    # uniform steps plus the queried steps themselves
    grid = dmax * np.arange(1, hs + 1) / hs
    return np.unique(np.concatenate([grid, extra[extra <= dmax]]))


def modulus_curve(f: FunctionSpec, deltas: Sequence[float], xs: int = DEFAULT_XS, hs: int = DEFAULT_HS) -> np.ndarray:
    """Ordinary modulus ``sup |f(x+h) - f(x)|`` over ``0 < h <= delta`` for each delta."""
    d = np.atleast_1d(np.asarray(deltas, dtype=float))
    if np.any(d <= 0):
        raise ValueError("modulus step must be positive")
    h = _step_grid(min(float(d.max()), 1.0), hs, d)
    x = np.linspace(0.0, 1.0, xs + 1)
    fx = f(x)
    shifted = x[:, None] + h[None, :]
    ok = shifted <= 1.0
    fs = f(np.where(ok, shifted, 1.0))
    diff = np.where(ok, np.abs(fs - fx[:, None]), 0.0)
    running = np.maximum.accumulate(diff.max(axis=0))
    return _lookup(h, running, d)


def modulus(f: FunctionSpec, delta: float, xs: int = DEFAULT_XS, hs: int = DEFAULT_HS) -> ModulusEstimate:
    """Grid estimate of the first-order modulus of continuity at ``delta``."""
    return ModulusEstimate(float(modulus_curve(f, [delta], xs, hs)[0]), xs, hs, 1)


def _difference_weights(order: int) -> list[tuple[float, int]]:
    # (offset multiplier k/2 - i, signed binomial weight)
    return [(order / 2 - i, (-1) ** i * math.comb(order, i)) for i in range(order + 1)]


def dt_modulus_curve(
    f: FunctionSpec,
    ts: Sequence[float],
    order: int = 1,
    xs: int = DEFAULT_XS,
    hs: int = DEFAULT_HS,
) -> np.ndarray:
    """Ditzian-Totik modulus of order ``order`` with step weight ``sqrt(x(1-x))``."""
    if not 1 <= order <= 6:
        raise ValueError(f"order must lie in 1..6, got {order}")
    t = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(t <= 0):
        raise ValueError("modulus step must be positive")
    h = _step_grid(float(t.max()), hs, t)
    x = np.linspace(0.0, 1.0, xs + 1)
    step = h[None, :] * np.sqrt(x * (1.0 - x))[:, None]
    reach = 0.5 * order * step
    ok = (x[:, None] - reach >= 0.0) & (x[:, None] + reach <= 1.0)
    total = np.zeros_like(step)
    for offset, w in _difference_weights(order):
        pts = np.clip(x[:, None] + offset * step, 0.0, 1.0)
        total += w * f(pts)
    diff = np.where(ok, np.abs(total), 0.0)
    running = np.maximum.accumulate(diff.max(axis=0))
    return _lookup(h, running, t)


def dt_modulus(f: FunctionSpec, t: float, order: int = 1, xs: int = DEFAULT_XS, hs: int = DEFAULT_HS) -> ModulusEstimate:
    return ModulusEstimate(float(dt_modulus_curve(f, [t], order, xs, hs)[0]), xs, hs, order)


def _refine(curve: Callable[[int, int], np.ndarray], xs: int, hs: int) -> np.ndarray:
    prev = curve(xs, hs)
    for _ in range(MAX_REFINEMENTS):
        xs, hs = 2 * xs, 2 * hs
        cur = curve(xs, hs)
        both_zero = (cur == 0) & (prev == 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.where(both_zero, 0.0, np.abs(cur - prev) / np.maximum(cur, prev))
        prev = cur
        if float(rel.max()) < REFINE_RTOL:
            break
    return prev


def conservative_modulus(f: FunctionSpec, deltas: Sequence[float], xs: int = DEFAULT_XS, hs: int = DEFAULT_HS) -> np.ndarray:
    """Modulus values safe to use on the large side of an inequality."""
    return INFLATION * _refine(lambda a, b: modulus_curve(f, deltas, a, b), xs, hs)


def conservative_dt_modulus(
    f: FunctionSpec, ts: Sequence[float], order: int = 1, xs: int = DEFAULT_XS, hs: int = DEFAULT_HS
) -> np.ndarray:
    return INFLATION * _refine(lambda a, b: dt_modulus_curve(f, ts, order, a, b), xs, hs)
