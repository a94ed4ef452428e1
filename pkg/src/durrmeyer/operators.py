"""Weight rows and floating-point evaluation of the five operator kinds.

Every operator here has the shape

    L(f; x) = sum_k w_k(x) * c_k(f)

where ``c_k(f) = (n+1) * integral_0^1 p_{n,k}(u) f(u) du`` (or ``f(k/n)`` for
the Bernstein baseline) and ``w_k`` is the kind-specific weight row.
"""

from __future__ import annotations

import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .basis import basis_matrix, coefficient_vector, default_nodes
from .functions import FunctionSpec

KINDS = ("bernstein", "durrmeyer", "m1", "m2", "bezier")

J_TOLERANCE = 1e-12
CHUNK = 256


class ConstraintError(ValueError):
    """The sequence pair violates ``2 a0(n) + a1(n) = 1``."""


class NegativeBaseError(ArithmeticError):
    """A Bezier tail sum left [0, 1] while the exponent is fractional."""


@dataclass(frozen=True)
class Affine:
    """The sequence ``n -> const + inv / n`` with exact rational parts."""

    const: Fraction
    inv: Fraction = Fraction(0)

    def __call__(self, n: int) -> Fraction:
        return self.const + self.inv / n

    def __str__(self) -> str:
        if self.inv == 0:
            return str(self.const)
        return f"{self.const} + {self.inv} / n"


_RATIONAL = r"[+-]?\d+(?:/\d+)?"
_AFFINE_RE = re.compile(
    rf"^\s*(?P<c>{_RATIONAL})\s*(?:(?P<sign>[+-])\s*(?P<d>\d+(?:/\d+)?)\s*/\s*n)?\s*$"
)


def parse_affine(text: str) -> Affine:
    """Parse ``"p/q"`` or ``"p/q + r/s / n"`` into an :class:`Affine`."""
    m = _AFFINE_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse sequence {text!r}; expected 'p/q' or 'p/q + r/s / n'")
    const = Fraction(m.group("c"))
    inv = Fraction(0)
    if m.group("d") is not None:
        inv = Fraction(m.group("d"))
        if m.group("sign") == "-":
            inv = -inv
    return Affine(const, inv)


@dataclass(frozen=True)
class SequencePair:
    a0: Affine
    a1: Affine

    def __post_init__(self):
        if 2 * self.a0.const + self.a1.const != 1 or 2 * self.a0.inv + self.a1.inv != 0:
            raise ConstraintError(
                f"sequence pair ({self.a0}, {self.a1}) violates 2*a0(n) + a1(n) = 1"
            )

    @classmethod
    def constant(cls, a0, a1) -> "SequencePair":
        return cls(Affine(Fraction(a0)), Affine(Fraction(a1)))

    @classmethod
    def parse(cls, a0: str, a1: str | None = None) -> "SequencePair":
        """Build from strings; a missing ``a1`` is derived from the constraint."""
        p0 = parse_affine(a0)
        if a1 is None:
            return cls(p0, Affine(1 - 2 * p0.const, -2 * p0.inv))
        return cls(p0, parse_affine(a1))

    def at(self, n: int) -> tuple[Fraction, Fraction]:
        return self.a0(n), self.a1(n)

    def nonnegative(self, n: int) -> bool:
        """True when ``a(x, n) = a0 + a1 x`` is nonnegative on [0, 1]."""
        a0, a1 = self.at(n)
        return a0 >= 0 and a0 + a1 >= 0

    def label(self) -> str:
        return f"({self.a0}, {self.a1})"


@dataclass(frozen=True)
class OperatorSpec:
    kind: str
    n: int
    seq: SequencePair | None = None
    mu: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}; known: {', '.join(KINDS)}")
        min_n = 3 if self.kind == "m2" else 1
        if self.n < min_n:
            raise ValueError(f"{self.kind} needs n >= {min_n}, got {self.n}")
        if self.kind in ("m1", "bezier") and self.seq is None:
            raise ValueError(f"{self.kind} needs a sequence pair")
        if self.kind == "bezier":
            if self.mu is None or self.mu < 1:
                raise ValueError(f"bezier needs mu >= 1, got {self.mu}")

    def describe(self) -> dict:
        d = {"kind": self.kind, "n": self.n}
        if self.seq is not None:
            d["sequence"] = [str(self.seq.a0), str(self.seq.a1)]
        if self.mu is not None:
            d["mu"] = self.mu
        return d

    def with_n(self, n: int) -> "OperatorSpec":
        return OperatorSpec(self.kind, n, self.seq, self.mu)


def _as_grid(x) -> np.ndarray:
    g = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~np.isfinite(g)) or np.any(g < 0) or np.any(g > 1):
        raise ValueError("evaluation points must lie in [0, 1]")
    return g


def m1_weight_matrix(n: int, xs, seq: SequencePair) -> np.ndarray:
    if n < 1:
        raise ValueError(f"m1 needs n >= 1, got {n}")
    x = _as_grid(xs)[:, None]
    a0, a1 = (float(v) for v in seq.at(n))
    low = basis_matrix(n - 1, x[:, 0])
    out = np.zeros((x.shape[0], n + 1))
    out[:, :n] += (a0 + a1 * x) * low
    out[:, 1:] += (a0 + a1 * (1.0 - x)) * low
    return out


def m1_weight_row(n: int, x: float, seq: SequencePair) -> np.ndarray:
    """Row of ``a(x,n) p_{n-1,k}(x) + a(1-x,n) p_{n-1,k-1}(x)``, k = 0..n."""
    return m1_weight_matrix(n, [x], seq)[0]


def m2_coefficients(n: int, x):
    """The three multipliers ``a_0(x,n), a_1(x,n), a_2(x,n)``."""
    x = np.asarray(x, dtype=float)
    c = n + 8
    phi2 = x * (1.0 - x)
    return 1.5 - 2.0 * x - c * phi2, 2.0 * c * phi2, -0.5 + 2.0 * x - c * phi2


def m2_weight_matrix(n: int, xs) -> np.ndarray:
    if n < 3:
        raise ValueError(f"m2 needs n >= 3, got {n}")
    x = _as_grid(xs)
    low = basis_matrix(n - 2, x)
    a = m2_coefficients(n, x)
    out = np.zeros((x.shape[0], n + 1))
    for j in range(3):
        out[:, j : j + n - 1] += a[j][:, None] * low
    return out


def m2_weight_row(n: int, x: float) -> np.ndarray:
    return m2_weight_matrix(n, [x])[0]


def _is_integer(mu: float) -> bool:
    return float(mu).is_integer()


def bezier_weight_matrix(n: int, xs, mu: float, seq: SequencePair) -> np.ndarray:
    if mu < 1:
        raise ValueError(f"bezier needs mu >= 1, got {mu}")
    w = m1_weight_matrix(n, xs, seq)
    tails = np.cumsum(w[:, ::-1], axis=1)[:, ::-1]
    # J_{n,0} is exactly 1 by the constraint; pin it so the row sums telescope.
    tails[:, 0] = 1.0
    tails = np.concatenate([tails, np.zeros((w.shape[0], 1))], axis=1)
    if _is_integer(mu):
        powered = tails ** int(mu)
    else:
        if np.any(tails < -J_TOLERANCE) or np.any(tails > 1.0 + J_TOLERANCE):
            bad = float(tails.min()) if tails.min() < 0 else float(tails.max())
            raise NegativeBaseError(
                f"tail sum J = {bad:.3e} outside [0, 1] with fractional mu = {mu}"
            )
        powered = np.clip(tails, 0.0, 1.0) ** mu
    return powered[:, :-1] - powered[:, 1:]


def bezier_weight_row(n: int, x: float, mu: float, seq: SequencePair) -> np.ndarray:
    """``Q_k = J_k^mu - J_{k+1}^mu`` with ``J_k`` the tail sums of the M1 row."""
    return bezier_weight_matrix(n, [x], mu, seq)[0]


def weight_matrix(spec: OperatorSpec, xs) -> np.ndarray:
    if spec.kind in ("bernstein", "durrmeyer"):
        return basis_matrix(spec.n, _as_grid(xs))
    if spec.kind == "m1":
        return m1_weight_matrix(spec.n, xs, spec.seq)
    if spec.kind == "m2":
        return m2_weight_matrix(spec.n, xs)
    return bezier_weight_matrix(spec.n, xs, spec.mu, spec.seq)


def sample_coefficients(spec: OperatorSpec, f: FunctionSpec, nodes: int | None = None) -> np.ndarray:
    """The ``c_k(f)`` vector the weight row is paired with."""
    if spec.kind == "bernstein":
        return np.asarray(f(np.arange(spec.n + 1) / spec.n), dtype=float)
    return coefficient_vector(spec.n, f, default_nodes(spec.n) if nodes is None else nodes)


def worker_count() -> int:
    """Worker cap from ``DURRMEYER_THREADS`` (default 1)."""
    raw = os.environ.get("DURRMEYER_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def apply_grid(spec: OperatorSpec, f: FunctionSpec, grid: Sequence[float], nodes: int | None = None) -> np.ndarray:
    """Evaluate the operator at every grid point, sharing the ``c_k(f)`` vector."""
    g = _as_grid(grid)
    coeffs = sample_coefficients(spec, f, nodes)
    # fixed chunk size, so the floating-point result does not depend on the worker count
    chunks = [g[i : i + CHUNK] for i in range(0, g.size, CHUNK)]
    workers = min(worker_count(), len(chunks))
    if workers <= 1:
        parts = [weight_matrix(spec, c) @ coeffs for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: weight_matrix(spec, c) @ coeffs, chunks))
    return np.concatenate(parts)


def apply(spec: OperatorSpec, f: FunctionSpec, x: float, nodes: int | None = None) -> float:
    return float(apply_grid(spec, f, [x], nodes)[0])
