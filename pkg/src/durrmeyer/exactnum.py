"""Exact rational scalars and dense univariate polynomials over the rationals.

Rationals are :class:`fractions.Fraction` values, which are always stored in
lowest terms with a positive denominator.  A :class:`Polynomial` holds its
coefficients in ascending order of degree; the zero polynomial has no
coefficients at all.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction
Scalar = Union[int, Fraction]

DEFAULT_N_MAX = 128

_table_lock = threading.Lock()
_factorials: list[int] = [1]


def ensure_factorials(limit: int) -> None:
    """Extend the shared factorial table so it covers ``0..limit``."""
    if limit < len(_factorials):
        return
    with _table_lock:
        while len(_factorials) <= limit:
            _factorials.append(_factorials[-1] * len(_factorials))


ensure_factorials(2 * DEFAULT_N_MAX + 16)


def factorial(n: int) -> int:
    if n < 0:
        raise ValueError(f"factorial of negative number {n}")
    if n >= len(_factorials):
        ensure_factorials(n)
    return _factorials[n]


def binomial(n: int, k: int) -> Fraction:
    """C(n, k) as a rational, zero outside ``0 <= k <= n``."""
    if n < 0:
        raise ValueError(f"binomial needs n >= 0, got {n}")
    if k < 0 or k > n:
        return Fraction(0)
    return Fraction(factorial(n) // (factorial(k) * factorial(n - k)))


def _ibinom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


class Polynomial:
    """Dense polynomial in ``x`` with :class:`Fraction` coefficients.

    ``coefficients[i]`` is the coefficient of ``x**i``.  Trailing zeros are
    stripped on construction, so equality of two polynomials is equality of
    their coefficient tuples.
    """

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable[Scalar] = ()):
        coeffs = [Fraction(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coefficients: tuple[Fraction, ...] = tuple(coeffs)

    # constructors
    @classmethod
    def constant(cls, c: Scalar) -> "Polynomial":
        return cls([c])

    @classmethod
    def x(cls) -> "Polynomial":
        return cls([0, 1])

    @classmethod
    def monomial(cls, power: int, c: Scalar = 1) -> "Polynomial":
        return cls([0] * power + [c])

    # structure
    @property
    def degree(self) -> int:
        """Degree of the polynomial; ``-1`` for the zero polynomial."""
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    def __len__(self) -> int:
        return len(self.coefficients)

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self.coefficients):
            return self.coefficients[i]
        return Fraction(0)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Polynomial):
            return self.coefficients == other.coefficients
        if isinstance(other, (int, Fraction)):
            return self.coefficients == Polynomial.constant(other).coefficients
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __repr__(self) -> str:
        return f"Polynomial([{', '.join(str(c) for c in self.coefficients)}])"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i, c in enumerate(self.coefficients):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*x")
            else:
                terms.append(f"{c}*x^{i}")
        return " + ".join(terms)

    # ring operations
    def __add__(self, other: "Polynomial | Scalar") -> "Polynomial":
        other = _coerce(other)
        a, b = self.coefficients, other.coefficients
        if len(a) < len(b):
            a, b = b, a
        return Polynomial([a[i] + b[i] if i < len(b) else a[i] for i in range(len(a))])

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coefficients])

    def __sub__(self, other: "Polynomial | Scalar") -> "Polynomial":
        return self + (-_coerce(other))

    def __rsub__(self, other: Scalar) -> "Polynomial":
        return _coerce(other) - self

    def __mul__(self, other: "Polynomial | Scalar") -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        a, b = self.coefficients, other.coefficients
        if not a or not b:
            return Polynomial()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative polynomial power")
        result = Polynomial.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c: Scalar) -> "Polynomial":
        c = Fraction(c)
        return Polynomial([c * a for a in self.coefficients])

    def derivative(self) -> "Polynomial":
        return Polynomial([i * c for i, c in enumerate(self.coefficients)][1:])

    def compose_reflect(self) -> "Polynomial":
        """Return ``p(1 - x)``."""
        out = Polynomial()
        one_minus_x = Polynomial([1, -1])
        for c in reversed(self.coefficients):
            out = out * one_minus_x + c
        return out

    def __call__(self, x: Scalar) -> Fraction:
        acc = Fraction(0)
        x = Fraction(x)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def evaluate_float(self, x):
        """Horner evaluation in floating point; ``x`` may be a numpy array."""
        acc = 0.0 * x
        for c in reversed(self.coefficients):
            acc = acc * x + float(c)
        return acc

    def leading_coefficient(self) -> Fraction:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coefficients[-1]


def _coerce(p: "Polynomial | Scalar") -> Polynomial:
    if isinstance(p, Polynomial):
        return p
    return Polynomial.constant(p)


# The family of exact ring operations, as free functions.
def add(a: Polynomial, b: Polynomial) -> Polynomial:
    return a + b


def subtract(a: Polynomial, b: Polynomial) -> Polynomial:
    return a - b


def multiply(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b


def scalar_multiply(c: Scalar, a: Polynomial) -> Polynomial:
    return a.scale(c)


def differentiate(a: Polynomial) -> Polynomial:
    return a.derivative()


def evaluate(a: Polynomial, x: Scalar) -> Fraction:
    return a(x)


def leading_coefficient(p: Polynomial) -> Fraction:
    return p.leading_coefficient()


PHI2 = Polynomial([0, 1, -1])  # x(1 - x)


def bernstein_poly(n: int, k: int) -> Polynomial:
    """Power-basis expansion of ``C(n,k) x^k (1-x)^(n-k)``."""
    if n < 0:
        raise ValueError(f"bernstein_poly needs n >= 0, got {n}")
    if k < 0 or k > n:
        return Polynomial()
    c = _ibinom(n, k)
    coeffs = [0] * (n + 1)
    for i in range(n - k + 1):
        coeffs[k + i] = c * _ibinom(n - k, i) * (-1) ** i
    return Polynomial(coeffs)


def bernstein_combination(values: Sequence[Scalar]) -> Polynomial:
    """Power-basis form of ``sum_k values[k] * p_{m,k}(x)`` with ``m = len(values) - 1``.

    Uses the forward-difference form ``sum_i C(m,i) (Delta^i values)_0 x^i``,
    which is exact and avoids expanding every basis polynomial.
    """
    m = len(values) - 1
    if m < 0:
        return Polynomial()
    diffs = [Fraction(v) for v in values]
    coeffs = []
    for i in range(m + 1):
        coeffs.append(_ibinom(m, i) * diffs[0])
        diffs = [diffs[r + 1] - diffs[r] for r in range(len(diffs) - 1)]
    return Polynomial(coeffs)
