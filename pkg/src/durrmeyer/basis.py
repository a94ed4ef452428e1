"""Bernstein basis evaluation, Gauss-Legendre rules and Durrmeyer coefficients.

The floating-point basis uses the triangular recurrence

    p_{m,k}(x) = (1 - x) p_{m-1,k}(x) + x p_{m-1,k-1}(x)

in which every term is nonnegative, so rounding errors stay relative.  The
factor ``1 - x`` is carried as an unevaluated sum ``hi + lo`` so that the
rounding of ``1 - x`` itself does not compound over ``n`` levels.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from .exactnum import factorial, _ibinom
from .functions import FunctionSpec


@dataclass(frozen=True)
class BasisRow:
    n: int
    x: float
    values: np.ndarray


def _check_domain(x: np.ndarray) -> None:
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("basis evaluation requires 0 <= x <= 1")


def basis_matrix(n: int, xs) -> np.ndarray:
    """Rows ``p_{n,0..n}(x)`` for every ``x`` in ``xs``; shape ``(len(xs), n+1)``."""
    if n < 0:
        raise ValueError(f"basis degree must be >= 0, got {n}")
    x = np.atleast_1d(np.asarray(xs, dtype=float))
    _check_domain(x)
    hi = 1.0 - x
    # Fast2Sum: hi + lo == 1 - x exactly (|1| >= |x| on [0, 1]).
    lo = -x - (hi - 1.0)
    xc = x[:, None]
    hic = hi[:, None]
    loc = lo[:, None]
    rows = np.zeros((x.size, n + 1))
    rows[:, 0] = 1.0
    for m in range(1, n + 1):
        old = rows[:, 1:m]
        rows[:, m] = x * rows[:, m - 1]
        if m > 1:
            rows[:, 1:m] = (hic * old + loc * old) + xc * rows[:, 0 : m - 1]
        rows[:, 0] = hi * rows[:, 0] + lo * rows[:, 0]
    return rows


def basis_row(n: int, x: float) -> BasisRow:
    """The Bernstein row ``(p_{n,0}(x), ..., p_{n,n}(x))``."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    return BasisRow(n, float(x), basis_matrix(n, [x])[0])


def monomial_coefficient(n: int, k: int, j: int) -> Fraction:
    """Exact ``(n+1) * integral_0^1 p_{n,k}(u) u^j du`` via the Beta function."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if j < 0:
        raise ValueError(f"power must be >= 0, got {j}")
    num = (n + 1) * _ibinom(n, k) * factorial(k + j) * factorial(n - k)
    return Fraction(num, factorial(n + j + 1))


_gl_lock = threading.Lock()
_gl_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _legendre_newton(m: int, tol: float = 1e-15, max_iter: int = 100):
    i = np.arange(m)
    t = np.cos(math.pi * (i + 0.75) / (m + 0.5))
    for _ in range(max_iter):
        p0 = np.ones_like(t)
        p1 = t.copy()
        for k in range(2, m + 1):
            p0, p1 = p1, ((2 * k - 1) * t * p1 - (k - 1) * p0) / k
        if m == 1:
            p0, p1 = np.ones_like(t), t
        dp = m * (t * p1 - p0) / (t * t - 1.0)
        step = p1 / dp
        t = t - step
        if np.max(np.abs(step)) < tol:
            break
    # recompute the derivative at the converged roots for the weights
    p0 = np.ones_like(t)
    p1 = t.copy()
    for k in range(2, m + 1):
        p0, p1 = p1, ((2 * k - 1) * t * p1 - (k - 1) * p0) / k
    if m == 1:
        p0, p1 = np.ones_like(t), t
    dp = m * (t * p1 - p0) / (t * t - 1.0)
    w = 2.0 / ((1.0 - t * t) * dp * dp)
    return t, w


def gauss_legendre(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``nodes``-point Gauss-Legendre rule on [0, 1].

    Nodes are returned in ascending order.  Results are cached per node count.
    """
    if nodes < 1:
        raise ValueError(f"need at least one node, got {nodes}")
    cached = _gl_cache.get(nodes)
    if cached is not None:
        return cached
    with _gl_lock:
        if nodes not in _gl_cache:
            t, w = _legendre_newton(nodes)
            order = np.argsort(t)
            u = 0.5 * (t[order] + 1.0)
            wu = 0.5 * w[order]
            u.setflags(write=False)
            wu.setflags(write=False)
            _gl_cache[nodes] = (u, wu)
        return _gl_cache[nodes]


def default_nodes(n: int) -> int:
    return n + 16


@lru_cache(maxsize=64)
def _weighted_basis(n: int, nodes: int) -> np.ndarray:
    # (n+1) * p_{n,k}(u_i) * w_i, shape (n+1, nodes)
    u, w = gauss_legendre(nodes)
    mat = basis_matrix(n, u).T * w[None, :] * (n + 1)
    mat.setflags(write=False)
    return mat


FunctionLike = Union[FunctionSpec, Callable[[np.ndarray], np.ndarray]]


def coefficient_vector(n: int, f: FunctionLike, nodes: int | None = None) -> np.ndarray:
    """All ``c_k(f) = (n+1) * integral p_{n,k} f``, k = 0..n, by Gauss-Legendre."""
    nodes = default_nodes(n) if nodes is None else nodes
    u, _ = gauss_legendre(nodes)
    fu = np.asarray(f(u), dtype=float)
    return _weighted_basis(n, nodes) @ fu


def quadrature_coefficient(n: int, k: int, f: FunctionLike, nodes: int | None = None) -> float:
    """Gauss-Legendre approximation of ``(n+1) * integral_0^1 p_{n,k}(u) f(u) du``."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    nodes = default_nodes(n) if nodes is None else nodes
    if nodes < 1:
        raise ValueError(f"need at least one node, got {nodes}")
    u, w = gauss_legendre(nodes)
    pk = basis_matrix(n, u)[:, k]
    return float((n + 1) * np.dot(pk * w, np.asarray(f(u), dtype=float)))
