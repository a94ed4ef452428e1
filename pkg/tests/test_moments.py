from fractions import Fraction

import numpy as np
import pytest

from durrmeyer.exactnum import Polynomial
from durrmeyer.functions import FunctionSpec
from durrmeyer.moments import (
    EngineLimitError,
    build_moment_table,
    central_moment,
    component_central_moment,
    defect_order,
    exact_apply_monomial,
    operator_monomial,
    product_formula,
    recurrence_step,
    run_errata,
    verify_identity,
)
from durrmeyer.operators import OperatorSpec, SequencePair, apply

X = Polynomial.x()
PHI2 = Polynomial([0, 1, -1])


def durrmeyer_second_central(n):
    # classical closed form: (2(n-3) x(1-x) + 2) / ((n+2)(n+3))
    return (PHI2.scale(2 * (n - 3)) + Polynomial.constant(2)).scale(Fraction(1, (n + 2) * (n + 3)))


def test_m2_second_moment_example():
    assert operator_monomial(OperatorSpec("m2", 3), 2) == X * X - Polynomial.constant(Fraction(1, 10))


@pytest.mark.parametrize("n", [3, 4, 9, 30])
def test_durrmeyer_second_central_moment(n):
    assert central_moment(OperatorSpec("durrmeyer", n), 2) == durrmeyer_second_central(n)
    m1 = OperatorSpec("m1", n, SequencePair.constant(1, -1))
    assert central_moment(m1, 2) == durrmeyer_second_central(n)


def test_bernstein_second_central_moment():
    n = 7
    assert central_moment(OperatorSpec("bernstein", n), 2) == PHI2.scale(Fraction(1, n))


def test_m2_second_central_moment_is_negative():
    for n in (3, 12, 60):
        c = central_moment(OperatorSpec("m2", n), 2)
        assert c.degree == 0 and c[0] < 0


def test_even_central_moments_of_positive_operators_are_nonnegative(seq):
    xs = [Fraction(i, 16) for i in range(17)]
    for n in (3, 11):
        for m in (2, 4, 6):
            c = central_moment(OperatorSpec("m1", n, seq), m)
            assert all(c(x) >= 0 for x in xs)


def test_bezier_exact_engine(seq):
    m1 = OperatorSpec("m1", 9, seq)
    assert operator_monomial(OperatorSpec("bezier", 9, seq, 1.0), 3) == operator_monomial(m1, 3)
    spec = OperatorSpec("bezier", 9, seq, 2.0)
    p = operator_monomial(spec, 3)
    for x in (Fraction(0), Fraction(1, 3), Fraction(7, 8), Fraction(1)):
        assert p(x) == exact_apply_monomial(spec, 3, x)


def test_exact_point_evaluation_matches_float():
    f = FunctionSpec("t4", lambda t: t**4)
    spec = OperatorSpec("m2", 17)
    x = Fraction(3, 8)
    assert abs(float(exact_apply_monomial(spec, 4, x)) - apply(spec, f, 0.375)) < 1e-14


def test_engine_limits():
    with pytest.raises(EngineLimitError):
        operator_monomial(OperatorSpec("durrmeyer", 129), 2)
    with pytest.raises(EngineLimitError):
        operator_monomial(OperatorSpec("durrmeyer", 10), 13)
    seq = SequencePair.constant(1, -1)
    with pytest.raises(EngineLimitError):
        operator_monomial(OperatorSpec("bezier", 41, seq, 2.0), 2)
    with pytest.raises(EngineLimitError):
        operator_monomial(OperatorSpec("bezier", 5, seq, 1.5), 2)


def test_components_of_m2():
    n = 8
    # the three components are Durrmeyer-type and therefore positive: second central moment > 0 inside
    for jc in range(3):
        c = component_central_moment(jc, n, 2)
        assert c(Fraction(1, 2)) > 0


def test_recurrence_and_leading_coefficients():
    n = 7
    table = build_moment_table(OperatorSpec("m2", n), 5)
    for k in range(4):
        assert recurrence_step(n, k, table) == table.entries[k + 1]
        assert table.components[0][k][k] == product_formula(n, k)
    with pytest.raises(ValueError):
        recurrence_step(n, 6, table)


def test_verify_identity_verdicts():
    assert verify_identity("same", X, X).verdict == "confirmed"
    r = verify_identity("off", X, X + Polynomial.constant(1))
    assert r.verdict == "refuted" and r.residual == Polynomial.constant(-1)


def test_errata_verdicts():
    ledger = run_errata(m2_range=range(3, 8), m1_range=range(3, 8), recurrence_n=(5,), recurrence_k=3, product_k=2)
    assert set(ledger.verdicts("M2-e2")) == {"confirmed"}
    assert set(ledger.verdicts("M1-first-moment-corrected")) == {"confirmed"}
    assert set(ledger.verdicts("M1-first-moment-as-printed")) == {"refuted"}
    assert set(ledger.verdicts("M1-second-moment-as-printed[times-n]")) == {"confirmed"}
    assert "refuted" in ledger.verdicts("M1-second-moment-as-printed[a1n]")
    assert ledger.verdicts("M2-e1-condition-as-printed") == ["refuted"]
    assert set(ledger.verdicts("M2-recurrence-k3")) == {"confirmed"}
    assert set(ledger.verdicts("A0-leading-product-k2")) == {"confirmed"}
    assert set(ledger.verdicts("M2-leading-product-k2")) == {"refuted"}


def test_monomial_defect_order():
    assert -2.2 < defect_order(2, [32, 64, 128]) < -1.7
