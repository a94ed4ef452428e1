"""Exact images of the operators on monomials, and identity bookkeeping.

Every image is built from the exact Beta coefficients

    c_k(t^j) = (n+1) C(n,k) (k+j)! (n-k)! / (n+j+1)!

combined with exact weight polynomials, so the result is the true polynomial
``x -> L(t^j; x)`` with rational coefficients.  Closed forms are never
trusted: each one is compared against this engine and gets a verdict.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .exactnum import PHI2, Polynomial, _ibinom, bernstein_poly, binomial, factorial
from .operators import OperatorSpec, SequencePair

MAX_POWER = 12
MAX_N = 128
BEZIER_MAX_N = 40

X = Polynomial.x()
ONE = Polynomial.constant(1)


class EngineLimitError(ValueError):
    """Requested power or degree exceeds the exact-engine cap."""


def _check_caps(n: int, j: int, max_power: int = MAX_POWER, max_n: int = MAX_N) -> None:
    if j < 0:
        raise ValueError(f"power must be >= 0, got {j}")
    if j > max_power:
        raise EngineLimitError(f"power {j} exceeds cap {max_power}")
    if n > max_n:
        raise EngineLimitError(f"n = {n} exceeds exact-engine cap {max_n}")


@lru_cache(maxsize=4096)
def _scaled_coefficients(n: int, j: int) -> tuple[tuple[int, ...], int]:
    """Integer numerators of ``c_k(t^j)``, k = 0..n, over the common denominator."""
    denom = factorial(n + j + 1)
    nums = tuple(
        (n + 1) * _ibinom(n, k) * factorial(k + j) * factorial(n - k) for k in range(n + 1)
    )
    return nums, denom


def _combination(nums: Iterable[int], denom: int) -> Polynomial:
    """``sum_k nums[k]/denom * p_{m,k}(x)`` in the power basis (m = len - 1)."""
    diffs = list(nums)
    m = len(diffs) - 1
    coeffs = []
    for i in range(m + 1):
        coeffs.append(Fraction(_ibinom(m, i) * diffs[0], denom))
        diffs = [diffs[r + 1] - diffs[r] for r in range(len(diffs) - 1)]
    return Polynomial(coeffs)


def _affine_weight(seq: SequencePair, n: int) -> tuple[Polynomial, Polynomial]:
    a0, a1 = seq.at(n)
    a = Polynomial([a0, a1])
    return a, a.compose_reflect()


def m2_weight_polynomials(n: int) -> tuple[Polynomial, Polynomial, Polynomial]:
    c = n + 8
    a0 = Polynomial([Fraction(3, 2), -2]) - PHI2.scale(c)
    a1 = PHI2.scale(2 * c)
    a2 = Polynomial([Fraction(-1, 2), 2]) - PHI2.scale(c)
    return a0, a1, a2


def component_monomial(jc: int, n: int, j: int) -> Polynomial:
    """Exact ``A_jc(t^j; x) = (n+1) sum_k p_{n-2,k-jc}(x) int p_{n,k} u^j du``."""
    if jc not in (0, 1, 2):
        raise ValueError(f"component index must be 0, 1 or 2, got {jc}")
    if n < 3:
        raise ValueError(f"components need n >= 3, got {n}")
    _check_caps(n, j)
    nums, denom = _scaled_coefficients(n, j)
    return _combination(nums[jc : jc + n - 1], denom)


def _bezier_tails(spec: OperatorSpec) -> list[Polynomial]:
    n = spec.n
    a, a_ref = _affine_weight(spec.seq, n)
    low = [bernstein_poly(n - 1, k) for k in range(n)]
    weights = []
    for k in range(n + 1):
        w = Polynomial()
        if k < n:
            w = w + a * low[k]
        if k >= 1:
            w = w + a_ref * low[k - 1]
        weights.append(w)
    tails = [Polynomial()] * (n + 2)
    for k in range(n, -1, -1):
        tails[k] = tails[k + 1] + weights[k]
    return tails


def _integer_mu(spec: OperatorSpec) -> int:
    if not float(spec.mu).is_integer():
        raise EngineLimitError(f"exact engine needs an integer mu, got {spec.mu}")
    return int(spec.mu)


def operator_monomial(spec: OperatorSpec, j: int, max_power: int = MAX_POWER, max_n: int = MAX_N) -> Polynomial:
    """The exact polynomial ``x -> L(t^j; x)`` for the operator described by ``spec``."""
    n = spec.n
    if spec.kind == "bezier":
        max_n = min(max_n, BEZIER_MAX_N)
    _check_caps(n, j, max_power, max_n)
    if spec.kind == "bernstein":
        return _combination([k**j for k in range(n + 1)], n**j)
    nums, denom = _scaled_coefficients(n, j)
    if spec.kind == "durrmeyer":
        return _combination(nums, denom)
    if spec.kind == "m1":
        a, a_ref = _affine_weight(spec.seq, n)
        return a * _combination(nums[:n], denom) + a_ref * _combination(nums[1:], denom)
    if spec.kind == "m2":
        out = Polynomial()
        for jc, a in enumerate(m2_weight_polynomials(n)):
            out = out + a * _combination(nums[jc : jc + n - 1], denom)
        return out
    mu = _integer_mu(spec)
    tails = _bezier_tails(spec)
    out = Polynomial()
    prev = 0
    for k in range(n + 1):
        diff = nums[k] - prev
        prev = nums[k]
        if diff:
            out = out + (tails[k] ** mu).scale(Fraction(diff, denom))
    return out


def exact_weight_row(spec: OperatorSpec, x: Fraction) -> list[Fraction]:
    """Exact weight row at a rational point (Bezier needs an integer ``mu``)."""
    n = spec.n
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"x must lie in [0, 1], got {x}")

    def row(m: int) -> list[Fraction]:
        return [_ibinom(m, k) * x**k * (1 - x) ** (m - k) for k in range(m + 1)]

    if spec.kind in ("bernstein", "durrmeyer"):
        return row(n)
    if spec.kind == "m2":
        low = row(n - 2)
        a = [p(x) for p in m2_weight_polynomials(n)]
        out = [Fraction(0)] * (n + 1)
        for jc in range(3):
            for k, v in enumerate(low):
                out[k + jc] += a[jc] * v
        return out
    a0, a1 = spec.seq.at(n)
    low = row(n - 1)
    ax, a1x = a0 + a1 * x, a0 + a1 * (1 - x)
    w = [Fraction(0)] * (n + 1)
    for k, v in enumerate(low):
        w[k] += ax * v
        w[k + 1] += a1x * v
    if spec.kind == "m1":
        return w
    mu = _integer_mu(spec)
    tails = [Fraction(0)] * (n + 2)
    for k in range(n, -1, -1):
        tails[k] = tails[k + 1] + w[k]
    return [tails[k] ** mu - tails[k + 1] ** mu for k in range(n + 1)]


def exact_apply_monomial(spec: OperatorSpec, j: int, x: Fraction) -> Fraction:
    """``L(t^j; x)`` at a rational point, exactly."""
    n = spec.n
    w = exact_weight_row(spec, x)
    if spec.kind == "bernstein":
        return sum((wk * Fraction(k, n) ** j for k, wk in enumerate(w)), Fraction(0))
    nums, denom = _scaled_coefficients(n, j)
    return sum((wk * nk for wk, nk in zip(w, nums)), Fraction(0)) / denom


def central_from_raw(raw: dict[int, Polynomial], m: int) -> Polynomial:
    """``sum_i C(m,i) (-x)^(m-i) raw[i]``: the image of ``(t - x)^m``."""
    out = Polynomial()
    for i in range(m + 1):
        out = out + (Polynomial.monomial(m - i, binomial(m, i) * (-1) ** (m - i))) * raw[i]
    return out


def central_moment(spec: OperatorSpec, m: int, max_n: int = MAX_N) -> Polynomial:
    """Exact ``L((t - x)^m; x)``."""
    if m > MAX_POWER:
        raise EngineLimitError(f"order {m} exceeds cap {MAX_POWER}")
    raw = {i: operator_monomial(spec, i, max_n=max_n) for i in range(m + 1)}
    return central_from_raw(raw, m)


def component_central_moment(jc: int, n: int, m: int) -> Polynomial:
    raw = {i: component_monomial(jc, n, i) for i in range(m + 1)}
    return central_from_raw(raw, m)


@dataclass
class MomentTable:
    spec: OperatorSpec
    entries: dict[int, Polynomial] = field(default_factory=dict)
    central_entries: dict[int, Polynomial] = field(default_factory=dict)
    components: dict[int, dict[int, Polynomial]] = field(default_factory=dict)


def build_moment_table(spec: OperatorSpec, max_power: int) -> MomentTable:
    table = MomentTable(spec)
    for j in range(max_power + 1):
        table.entries[j] = operator_monomial(spec, j)
    for m in range(max_power + 1):
        table.central_entries[m] = central_from_raw(table.entries, m)
    if spec.kind == "m2":
        for jc in range(3):
            table.components[jc] = {
                j: component_monomial(jc, spec.n, j) for j in range(max_power + 1)
            }
    return table


def recurrence_step(n: int, k: int, table: MomentTable) -> Polynomial:
    """Right side of the printed M2 moment recurrence, divided by ``n + k + 2``.

    The candidate for ``D(t^{k+1}; x)`` is

        [ phi^2 D'(t^k) + (k + 3 + (n-2)x) D(t^k)
          - phi^2 (a0' mu_k + a1' lambda_k + a2' eta_k)
          - 2 a0 mu_k - a1 lambda_k ] / (n + k + 2)

    with ``mu, lambda, eta`` the component images ``A_0, A_1, A_2`` of ``t^k``.
    """
    try:
        d_k = table.entries[k]
        mu_k = table.components[0][k]
        lam_k = table.components[1][k]
        eta_k = table.components[2][k]
    except KeyError:
        raise ValueError(f"moment table lacks the power-{k} entries the recurrence needs") from None
    a0, a1, a2 = m2_weight_polynomials(n)
    rhs = PHI2 * d_k.derivative() + Polynomial([k + 3, n - 2]) * d_k
    rhs = rhs - PHI2 * (a0.derivative() * mu_k + a1.derivative() * lam_k + a2.derivative() * eta_k)
    rhs = rhs - a0.scale(2) * mu_k - a1 * lam_k
    return rhs.scale(Fraction(1, n + k + 2))


def leading_coefficient(p: Polynomial) -> Fraction:
    return p.leading_coefficient()


def product_formula(n: int, k: int) -> Fraction:
    """``prod_{j=1}^{k} (n - j - 1) / (n + j + 1)``."""
    out = Fraction(1)
    for j in range(1, k + 1):
        out *= Fraction(n - j - 1, n + j + 1)
    return out


# ---------------------------------------------------------------------------
# identity verdicts

@dataclass(frozen=True)
class IdentityReport:
    identity_name: str
    printed_form: Polynomial
    oracle_form: Polynomial
    residual: Polynomial
    verdict: str
    n: int | None = None
    sequence: str | None = None

    def to_dict(self) -> dict:
        return {
            "identity_name": self.identity_name,
            "n": self.n,
            "sequence": self.sequence,
            "verdict": self.verdict,
            "residual_coefficients": [str(c) for c in self.residual.coefficients],
        }


class ErrataLedger:
    """Append-only collection of identity verdicts, safe to share across threads."""

    def __init__(self):
        self._lock = threading.Lock()
        self._reports: list[IdentityReport] = []

    def append(self, report: IdentityReport) -> None:
        with self._lock:
            self._reports.append(report)

    @property
    def reports(self) -> list[IdentityReport]:
        with self._lock:
            return list(self._reports)

    def verdicts(self, name: str) -> list[str]:
        return [r.verdict for r in self.reports if r.identity_name == name]

    def to_json(self) -> str:
        return json.dumps([r.to_dict() for r in self.reports], indent=2)


def verify_identity(
    name: str,
    oracle: Polynomial,
    printed: Polynomial,
    *,
    n: int | None = None,
    sequence: str | None = None,
    ledger: ErrataLedger | None = None,
) -> IdentityReport:
    residual = oracle - printed
    report = IdentityReport(
        identity_name=name,
        printed_form=printed,
        oracle_form=oracle,
        residual=residual,
        verdict="confirmed" if residual.is_zero() else "refuted",
        n=n,
        sequence=sequence,
    )
    if ledger is not None:
        ledger.append(report)
    return report


# ---------------------------------------------------------------------------
# closed forms as they appear in print

def printed_m2_e2(n: int) -> Polynomial:
    return Polynomial([Fraction(-3, (n + 2) * (n + 3)), 0, 1])


def printed_component_e1(jc: int, n: int) -> Polynomial:
    return Polynomial([jc + 1, n - 2]).scale(Fraction(1, n + 2))


_E2_LINEAR = {0: 4, 1: 6, 2: 8}
_E2_CONST = {0: 2, 1: 6, 2: 12}


def printed_component_e2(jc: int, n: int) -> Polynomial:
    p = Polynomial([_E2_CONST[jc], _E2_LINEAR[jc] * (n - 2), n * n - 5 * n + 6])
    return p.scale(Fraction(1, (n + 2) * (n + 3)))


_C2_LINEAR = {0: 7, 1: 12, 2: 17}


def printed_component_central2(jc: int, n: int) -> Polynomial:
    p = Polynomial([_E2_CONST[jc], 2 * (n - _C2_LINEAR[jc]), -2 * (n - 12)])
    return p.scale(Fraction(1, (n + 2) * (n + 3)))


def printed_m1_first_moment(seq: SequencePair, n: int) -> Polynomial:
    """First central moment of M1 exactly as printed (with the stray factor x)."""
    a0, a1 = seq.at(n)
    return (Polynomial([1, -2]) * X).scale((3 * a0 + 2 * a1) / (n + 2))


def corrected_m1_first_moment(seq: SequencePair, n: int) -> Polynomial:
    a0, a1 = seq.at(n)
    return Polynomial([1, -2]).scale((3 * a0 + 2 * a1) / (n + 2))


def printed_m1_second_moment(seq: SequencePair, n: int, reading: str = "times-n") -> Polynomial:
    """Second central moment of M1 as printed.

    The printed numerator has an unclosed parenthesis in the term
    ``2(1-x)x(2a0 + a1 n``.  ``reading="times-n"`` takes it as
    ``(2a0 + a1) * n``; ``reading="a1n"`` as ``2a0 + a1 * n``.
    """
    a0, a1 = seq.at(n)
    first = Polynomial(
        [3 * a1 + 4 * a0, -11 * a1 - 14 * a0, 14 * a0 + 11 * a1]
    ).scale(2)
    if reading == "times-n":
        factor = (2 * a0 + a1) * n
    elif reading == "a1n":
        factor = 2 * a0 + a1 * n
    else:
        raise ValueError(f"unknown reading {reading!r}")
    second = PHI2.scale(2 * factor)
    return (first + second).scale(Fraction(1, (n + 2) * (n + 3)))


def printed_m2_e1_condition() -> Polynomial:
    """The normalization ``D(e1; x) = 1`` as written in the M2 derivation."""
    return ONE


# ---------------------------------------------------------------------------
# errata sweep

DEFAULT_SEQUENCES = (
    SequencePair.constant(1, -1),
    SequencePair.constant(0, 1),
    SequencePair.constant(Fraction(1, 2), 0),
)


def run_errata(
    m2_range: Iterable[int] = range(3, 61),
    m1_range: Iterable[int] = range(3, 41),
    sequences: Iterable[SequencePair] = DEFAULT_SEQUENCES,
    recurrence_n: Iterable[int] = (5, 10, 20),
    recurrence_k: int = 5,
    product_k: int = 4,
    ledger: ErrataLedger | None = None,
) -> ErrataLedger:
    """Check every printed identity against the exact engine."""
    ledger = ErrataLedger() if ledger is None else ledger
    sequences = tuple(sequences)
    for n in m2_range:
        spec = OperatorSpec("m2", n)
        raw = {j: operator_monomial(spec, j) for j in range(3)}
        verify_identity("M2-e0", raw[0], ONE, n=n, ledger=ledger)
        verify_identity("M2-e1", raw[1], X, n=n, ledger=ledger)
        verify_identity("M2-e2", raw[2], printed_m2_e2(n), n=n, ledger=ledger)
        a0, a1, a2 = m2_weight_polynomials(n)
        verify_identity("M2-weights-sum", a0 + a1 + a2, ONE, n=n, ledger=ledger)
        verify_identity("M2-central-1", central_from_raw(raw, 1), Polynomial(), n=n, ledger=ledger)
        verify_identity(
            "M2-central-2",
            central_from_raw(raw, 2),
            Polynomial.constant(Fraction(-3, (n + 2) * (n + 3))),
            n=n,
            ledger=ledger,
        )
        for jc in range(3):
            comp = {j: component_monomial(jc, n, j) for j in range(3)}
            verify_identity(f"A{jc}-e0", comp[0], ONE, n=n, ledger=ledger)
            verify_identity(f"A{jc}-e1", comp[1], printed_component_e1(jc, n), n=n, ledger=ledger)
            verify_identity(f"A{jc}-e2", comp[2], printed_component_e2(jc, n), n=n, ledger=ledger)
            verify_identity(
                f"A{jc}-central-2",
                central_from_raw(comp, 2),
                printed_component_central2(jc, n),
                n=n,
                ledger=ledger,
            )
    # the normalization written as D(e1; x) = 1 is checked once, at the smallest n
    first_n = next(iter(m2_range), 3)
    verify_identity(
        "M2-e1-condition-as-printed",
        operator_monomial(OperatorSpec("m2", first_n), 1),
        printed_m2_e1_condition(),
        n=first_n,
        ledger=ledger,
    )

    for seq in sequences:
        for n in m1_range:
            spec = OperatorSpec("m1", n, seq)
            raw = {j: operator_monomial(spec, j) for j in range(3)}
            c1 = central_from_raw(raw, 1)
            c2 = central_from_raw(raw, 2)
            label = seq.label()
            verify_identity("M1-e0", raw[0], ONE, n=n, sequence=label, ledger=ledger)
            verify_identity(
                "M1-first-moment-as-printed", c1, printed_m1_first_moment(seq, n),
                n=n, sequence=label, ledger=ledger,
            )
            verify_identity(
                "M1-first-moment-corrected", c1, corrected_m1_first_moment(seq, n),
                n=n, sequence=label, ledger=ledger,
            )
            for reading in ("times-n", "a1n"):
                verify_identity(
                    f"M1-second-moment-as-printed[{reading}]", c2,
                    printed_m1_second_moment(seq, n, reading),
                    n=n, sequence=label, ledger=ledger,
                )

    for n in recurrence_n:
        table = build_moment_table(OperatorSpec("m2", n), recurrence_k + 1)
        for k in range(recurrence_k + 1):
            verify_identity(
                f"M2-recurrence-k{k}", table.entries[k + 1], recurrence_step(n, k, table),
                n=n, ledger=ledger,
            )
        for k in range(1, product_k + 1):
            expected = Polynomial.constant(product_formula(n, k))
            verify_identity(
                f"A0-leading-product-k{k}",
                Polynomial.constant(table.components[0][k][k]),
                expected, n=n, ledger=ledger,
            )
            verify_identity(
                f"M2-leading-product-k{k}",
                Polynomial.constant(table.entries[k][k]),
                expected, n=n, ledger=ledger,
            )
    return ledger


def monomial_defect(n: int, k: int) -> float:
    """Max coefficient magnitude of ``D_M2(t^k; x) - x^k``.

    Bounds the sup-norm defect on [0, 1] up to a factor ``k + 1``.
    """
    diff = operator_monomial(OperatorSpec("m2", n), k) - Polynomial.monomial(k)
    return float(max((abs(c) for c in diff.coefficients), default=Fraction(0)))


def defect_order(k: int, n_list: Iterable[int]) -> float:
    """Least-squares slope of ``log monomial_defect`` against ``log n``."""
    ns = list(n_list)
    ys = [math.log(monomial_defect(n, k)) for n in ns]
    xs = [math.log(n) for n in ns]
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    return sum((a - mx) * (b - my) for a, b in zip(xs, ys)) / sum((a - mx) ** 2 for a in xs)
