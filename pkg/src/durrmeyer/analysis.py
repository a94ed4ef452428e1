"""Convergence studies, Voronovskaya scans and pointwise bound checks."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .functions import FunctionSpec
from .moments import central_moment
from .operators import (
    OperatorSpec,
    SequencePair,
    apply,
    apply_grid,
    m2_coefficients,
    worker_count,
)
from .smoothness import conservative_dt_modulus, conservative_modulus

FIT_FLOOR = 1e-13
MARGIN_TOL = -1e-9
DEFAULT_GRID = 1000
DEFAULT_B_MARGIN = 0.05
B_CAVEAT = (
    "B excludes the endpoints: the M1 second moment is nonzero at x = 0, 1 "
    "where phi^2 vanishes, so B is a supremum over [margin, 1 - margin] only"
)


def uniform_grid(grid_size: int) -> np.ndarray:
    if grid_size < 2:
        raise ValueError(f"grid needs at least 2 intervals, got {grid_size}")
    return np.linspace(0.0, 1.0, grid_size + 1)


def sup_error(spec: OperatorSpec, f: FunctionSpec, grid_size: int = DEFAULT_GRID, nodes: int | None = None) -> tuple[float, float]:
    """``(max |L f - f|, argmax)`` over ``grid_size + 1`` uniform points."""
    g = uniform_grid(grid_size)
    err = np.abs(apply_grid(spec, f, g, nodes) - f(g))
    i = int(np.argmax(err))
    return float(err[i]), float(g[i])


def fit_loglog(ns: Sequence[float], errors: Sequence[float]) -> tuple[float, float]:
    """Least-squares line through ``(ln n, ln error)``; rows at or below 1e-13 are dropped."""
    pts = [(math.log(n), math.log(e)) for n, e in zip(ns, errors) if e > FIT_FLOOR]
    if len(pts) < 2:
        raise ValueError("need at least two rows with error above 1e-13 to fit a slope")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


@dataclass
class ConvergenceReport:
    spec: dict
    function: str
    rows: list[tuple[int, float, float]]
    slope: float
    intercept: float

    def to_dict(self) -> dict:
        return {
            "spec": self.spec,
            "function": self.function,
            "rows": [{"n": n, "sup_error": e, "argmax_x": x} for n, e, x in self.rows],
            "slope": self.slope,
            "intercept": self.intercept,
        }


def _map(fn: Callable, items: Sequence):
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def convergence_study(
    kind: str,
    f: FunctionSpec,
    n_list: Sequence[int],
    *,
    seq: SequencePair | None = None,
    mu: float | None = None,
    grid_size: int = DEFAULT_GRID,
    nodes: int | None = None,
    error_fn: Callable[[int], tuple[float, float]] | None = None,
) -> ConvergenceReport:
    """Sup errors over ``n_list`` and the fitted log-log slope.

    ``error_fn`` replaces the operator entirely (it maps ``n`` to
    ``(sup_error, argmax_x)``); it exists to feed synthetic data through the
    same fitting path.
    """
    ns = list(n_list)
    if ns != sorted(ns):
        raise ValueError("n_list must be ascending")
    if error_fn is None:
        specs = [OperatorSpec(kind, n, seq, mu) for n in ns]
        errs = _map(lambda s: sup_error(s, f, grid_size, nodes), specs)
        descriptor = specs[0].describe() if specs else {"kind": kind}
        descriptor.pop("n", None)
    else:
        errs = [error_fn(n) for n in ns]
        descriptor = {"kind": kind}
    rows = [(n, e, x) for n, (e, x) in zip(ns, errs)]
    slope, intercept = fit_loglog(ns, [e for _, e, _ in rows])
    return ConvergenceReport(descriptor, f.name, rows, slope, intercept)


@dataclass
class VoronovskayaReport:
    function: str
    x: float
    rows: list[tuple[int, float]]
    target: float

    def to_dict(self) -> dict:
        return {
            "function": self.function,
            "x": self.x,
            "target": self.target,
            "rows": [{"n": n, "scaled_error": s, "target": self.target} for n, s in self.rows],
        }


def voronovskaya_scan(f: FunctionSpec, x: float, n_list: Sequence[int], nodes: int | None = None) -> VoronovskayaReport:
    """Scaled M2 errors ``(n+2)(n+3)(D f(x) - f(x))`` against ``-1.5 f''(x)``."""
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must lie in (0, 1), got {x}")
    f2 = f.derivative(2)
    target = -1.5 * float(f2(x))
    fx = float(f(x))
    rows = []
    for n in n_list:
        value = apply(OperatorSpec("m2", n), f, x, nodes)
        rows.append((n, (n + 2) * (n + 3) * (value - fx)))
    return VoronovskayaReport(f.name, float(x), rows, target)


# ---------------------------------------------------------------------------
# bound checks

THEOREMS = ("m1_local", "m1_dt", "m2_modulus")


@dataclass
class BoundReport:
    theorem: str
    spec: dict
    function: str
    rows: list[tuple[float, float, float]]
    min_margin: float
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.min_margin >= MARGIN_TOL

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "spec": self.spec,
            "function": self.function,
            "verdict": self.verdict,
            "min_margin": self.min_margin,
            "extras": self.extras,
            "rows": [{"x": x, "lhs": l, "rhs": r, "margin": r - l} for x, l, r in self.rows],
        }


def m1_delta(n: int, x):
    """The piecewise ``delta_n(x)`` of the M1 local estimate, per branch."""
    x = np.asarray(x, dtype=float)
    phi2 = x * (1 - x)
    denom = (n + 2) * (n + 3)
    left = ((3 - 9 * x + 7 * x**2) + n * phi2) / denom
    right = ((1 - 5 * x + 7 * x**2) + n * phi2) / denom
    return left, right


def m2_delta_squared(n: int, x):
    """The piecewise ``delta_n(x)^2`` of the M2 modulus estimate, per branch."""
    x = np.asarray(x, dtype=float)
    phi2 = x * (1 - x)
    denom = (n + 2) * (n + 3)
    left = ((6 - 17 * x + 12 * x**2) + n * phi2) / denom
    right = ((1 - 7 * x + 12 * x**2) + n * phi2) / denom
    return left, right


def estimate_B_constant(
    seq: SequencePair,
    n_list: Sequence[int],
    interior_margin: float = DEFAULT_B_MARGIN,
    samples: int = 201,
) -> float:
    """Sup of ``(n+2) M1((t-x)^2; x) / phi^2(x)`` over n and interior x.

    Uses the exact second central moment, evaluated on ``samples`` points of
    ``[margin, 1 - margin]``.
    """
    if not 0.0 < interior_margin < 0.5:
        raise ValueError(f"interior_margin must lie in (0, 1/2), got {interior_margin}")
    x = np.linspace(interior_margin, 1.0 - interior_margin, samples)
    phi2 = x * (1 - x)
    best = 0.0
    for n in n_list:
        # second moments stay cheap well past the default engine cap
        moment = central_moment(OperatorSpec("m1", n, seq), 2, max_n=max(n, 128))
        best = max(best, float(np.max((n + 2) * moment.evaluate_float(x) / phi2)))
    return best


def _finish(theorem, spec, f, grid, lhs, rhs, extras) -> BoundReport:
    rows = [(float(a), float(b), float(c)) for a, b, c in zip(grid, lhs, rhs)]
    margin = min(r - l for _, l, r in rows)
    return BoundReport(theorem, spec.describe(), f.name, rows, margin, extras)


def bound_check(
    theorem: str,
    spec: OperatorSpec,
    f: FunctionSpec,
    grid_size: int = DEFAULT_GRID,
    nodes: int | None = None,
    b_constant: float | None = None,
    b_margin: float = DEFAULT_B_MARGIN,
) -> BoundReport:
    """Compare ``|L f - f|`` with a printed pointwise bound on a uniform grid.

    * ``m1_local``: ``4(sqrt2 + 1)|a0 + a1| w(f, sqrt(delta_n(x)))`` for M1.
    * ``m2_modulus``: ``2 M_2(x,n) w(f, delta_n(x))`` for M2.
    * ``m1_dt``: the constant is not given, so the report carries the
      smallest admissible ``C* = max|L f - f| / w_phi(f, sqrt(B/(n+2)))``.
    """
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem!r}; known: {', '.join(THEOREMS)}")
    expected = {"m1_local": ("m1",), "m2_modulus": ("m2",), "m1_dt": ("m1", "bezier")}[theorem]
    if spec.kind not in expected:
        raise ValueError(f"theorem {theorem} applies to {'/'.join(expected)}, not {spec.kind}")
    g = uniform_grid(grid_size)
    n = spec.n
    lhs = np.abs(apply_grid(spec, f, g, nodes) - f(g))

    if theorem == "m1_local":
        a0, a1 = (float(v) for v in spec.seq.at(n))
        left, right = m1_delta(n, g)
        delta = np.where(g <= 0.5, left, right)
        const = 4 * (math.sqrt(2) + 1) * abs(a0 + a1)
        omega = conservative_modulus(f, np.sqrt(delta))
        rhs = const * omega
        half = np.array([0.5])
        lhs_half = abs(apply(spec, f, 0.5, nodes) - float(f(0.5)))
        hl, hr = m1_delta(n, half)
        w_half = conservative_modulus(f, [math.sqrt(hl[0]), math.sqrt(hr[0])])
        extras = {
            "constant": const,
            "half_point_margin_left_branch": float(const * w_half[0] - lhs_half),
            "half_point_margin_right_branch": float(const * w_half[1] - lhs_half),
        }
        return _finish(theorem, spec, f, g, lhs, rhs, extras)

    if theorem == "m2_modulus":
        a = m2_coefficients(n, g)
        weight_sum = np.abs(a[0]) + np.abs(a[1]) + np.abs(a[2])
        left, right = m2_delta_squared(n, g)
        delta = np.sqrt(np.where(g <= 0.5, left, right))
        rhs = 2 * weight_sum * conservative_modulus(f, delta)
        return _finish(theorem, spec, f, g, lhs, rhs, {})

    if b_constant is None:
        b_constant = estimate_B_constant(spec.seq, [n], b_margin)
    t = math.sqrt(b_constant / (n + 2))
    omega = float(conservative_dt_modulus(f, [t], 1)[0])
    peak = float(lhs.max())
    if omega > 0:
        best = peak / omega
    else:
        best = 0.0 if peak == 0 else math.inf
    rhs = np.full_like(lhs, best * omega)
    extras = {
        "best_constant": best,
        "b_constant": b_constant,
        "dt_step": t,
        "dt_modulus": omega,
        "caveat": B_CAVEAT,
    }
    return _finish(theorem, spec, f, g, lhs, rhs, extras)
