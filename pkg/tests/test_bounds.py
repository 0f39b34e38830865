import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rdt_threshold._validation import DomainError
from rdt_threshold.bounds import (
    andor_product,
    bounded_error_scale,
    closed_form_thm1,
    closed_form_thm2,
    closed_form_thm3,
    gamma_exact,
    gamma_generic,
    gamma_matrix,
    largest_eigenvalue,
    matrix_power_cost,
    report_andor,
    report_bounds,
)
from rdt_threshold.directional import delta_matrix, exact_cost
from rdt_threshold.formula import FormulaSpec
from rdt_threshold.linalg import CostMatrix, CostPair, SpectralBound, sign_plus_root, sign_two_roots

INNER = [(k, n) for n in range(3, 26) for k in range(2, n)]


def numpy_rate(m: CostMatrix) -> float:
    return max(np.linalg.eigvals(np.array([[float(x) for x in r] for r in m.rows()])).real)


def test_gamma_examples():
    assert gamma_matrix(2, 3, F(1, 4), F(1, 4)) == CostMatrix(2, F(1, 2), F(1, 2), 2)
    for n in range(2, 10):
        assert gamma_matrix(n, n, 0, F(n - 1, 2)) == delta_matrix(n, n)
        assert gamma_matrix(1, n, F(n - 1, 2), 0) == delta_matrix(1, n)
        assert gamma_generic(1, n) == CostMatrix(1, F(n - 1, 2), 0, n) == gamma_exact(1, n)
    assert gamma_generic(2, 3) == CostMatrix(2, F(1, 2), F(1, 2), 2)
    assert gamma_generic(2, 4) == CostMatrix(2, 1, F(1, 2), 3)
    assert gamma_exact(2, 3) == CostMatrix(2, F(1, 2), F(1, 2), 2)
    assert gamma_exact(2, 4) == CostMatrix(2, F(10, 9), F(1, 2), 3)
    with pytest.raises(DomainError):
        gamma_matrix(2, 3, -1, 0)


def test_matrix_power_cost():
    g = gamma_generic(2, 3)
    assert matrix_power_cost(g, 0) == CostPair(1, 1)
    assert matrix_power_cost(g, 1) == CostPair(F(5, 2), F(5, 2))
    assert matrix_power_cost(g, 2) == CostPair(F(25, 4), F(25, 4))
    m = CostMatrix(1, 2, 3, 4)
    explicit = m @ m @ m @ m @ m
    assert matrix_power_cost(m, 5) == explicit @ CostPair(1, 1)


def test_largest_eigenvalue_examples():
    low = largest_eigenvalue(gamma_generic(2, 3))
    assert low.exact_form == (4, F(15, 4)) and low.exact() == F(5, 2)
    up = largest_eigenvalue(delta_matrix(2, 3))
    assert up.exact_form == (4, F(32, 9)) and up.exact() == F(8, 3)
    assert largest_eigenvalue(CostMatrix.identity()).exact() == 1
    with pytest.raises(DomainError):
        SpectralBound(0, 1)  # rotation-like: complex eigenvalues


@pytest.mark.parametrize("k,n", INNER[:40])
def test_eigenvalue_matches_numpy(k, n):
    for m in (delta_matrix(k, n), gamma_generic(k, n), gamma_exact(k, n)):
        assert largest_eigenvalue(m).lam == pytest.approx(numpy_rate(m), rel=1e-12)


def test_andor_product_examples():
    ab, ba, lam = andor_product(2)
    assert ab == CostMatrix(2, 1, F(1, 2), F(9, 4))
    assert lam.equals_surd(F(17, 8), F(1, 8), 33)
    assert lam.lam == pytest.approx(((1 + math.sqrt(33)) / 4) ** 2, abs=1e-12)
    assert andor_product(3)[0].det == 9
    for n in range(2, 26):
        ab, ba, lam = andor_product(n)
        assert (ab.trace, ab.det) == (n + F((n + 1) ** 2, 4), n * n)
        assert SpectralBound.of(ba).compare(lam) == 0
    with pytest.raises(DomainError):
        andor_product(1)


def test_andor_product_matches_recurrence():
    # two AND-OR levels of the directional recurrence are exactly AB
    for n in range(2, 6):
        ab, ba, _ = andor_product(n)
        for d in range(4):
            and_cost = exact_cost(FormulaSpec.alternating(n, 2 * d, "and")).as_pair()
            or_cost = exact_cost(FormulaSpec.alternating(n, 2 * d, "or")).as_pair()
            assert and_cost == matrix_power_cost(ab, d)
            assert or_cost == matrix_power_cost(ba, d)


@pytest.mark.parametrize("n", range(2, 51))
def test_thm1_forms(n):
    first, second = closed_form_thm1(n)
    assert first == pytest.approx(second, rel=1e-9)
    assert first == pytest.approx(andor_product(n)[2].lam, rel=1e-9)


def test_thm1_rejects_n1():
    with pytest.raises(DomainError):
        closed_form_thm1(1)


def test_thm2_examples():
    assert closed_form_thm2(2, 3) == pytest.approx(8 / 3, abs=1e-12)
    expected = 5 / 2 + 5 / 2 * math.sqrt(1 / 5)
    assert closed_form_thm2(2, 4) == pytest.approx(expected, abs=1e-12)
    assert closed_form_thm2(3, 4) == pytest.approx(expected, abs=1e-12)
    with pytest.raises(DomainError):
        closed_form_thm2(1, 3)


@pytest.mark.parametrize("k,n", INNER)
def test_thm2_matches_delta_rate(k, n):
    assert closed_form_thm2(k, n) == pytest.approx(largest_eigenvalue(delta_matrix(k, n)).lam, abs=1e-9)


def test_thm3_examples():
    chk = closed_form_thm3(2, 3)
    assert chk.printed == pytest.approx(2 + math.sqrt(7) / 2, abs=1e-12)
    assert chk.matrix_derived == 2.5 and not chk.consistent
    assert closed_form_thm3(2, 4).matrix_derived == pytest.approx(2.5 + math.sqrt(3) / 2, abs=1e-12)
    exact = largest_eigenvalue(gamma_exact(2, 4))
    assert exact.equals_surd(F(5, 2), F(1, 6), 29)
    assert exact >= largest_eigenvalue(gamma_generic(2, 4))


@pytest.mark.parametrize("k,n", INNER)
def test_lower_rate_below_upper(k, n):
    up = largest_eigenvalue(delta_matrix(k, n))
    g, e = largest_eigenvalue(gamma_generic(k, n)), largest_eigenvalue(gamma_exact(k, n))
    assert g <= e <= up
    assert g.lam <= e.lam + 1e-12 and e.lam <= up.lam + 1e-12


@pytest.mark.parametrize("k,n", [(k, n) for n in range(3, 13) for k in range(2, n)])
def test_exact_gamma_dominates(k, n):
    assert gamma_exact(k, n) >= gamma_generic(k, n)


def test_gamma_trace_and_det():
    for k, n in INNER[:60]:
        for m in (gamma_generic(k, n), gamma_exact(k, n)):
            alpha, beta = m.b / k, m.c / (n - k + 1)
            assert m.trace == n + 1
            assert m.det == (1 - alpha * beta) * k * (n - k + 1)
        assert gamma_generic(k, n).det == k * (n - k + 1) - F((k - 1) * (n - k), 4)


@pytest.mark.parametrize("k,n", [(2, 3), (2, 4), (3, 5), (4, 9)])
def test_power_ratio_converges(k, n):
    for m in (gamma_generic(k, n), gamma_exact(k, n), delta_matrix(k, n)):
        lam = largest_eigenvalue(m).lam
        ratios = [float(max(matrix_power_cost(m, d))) / lam**d for d in range(1, 21)]
        assert max(ratios) < 10
        diffs = np.diff(ratios)
        assert np.all(diffs >= -1e-12) or np.all(diffs <= 1e-12)
        assert abs(ratios[-1] - ratios[-2]) < 1e-6


def test_bounded_error_scale():
    assert bounded_error_scale(2.5, 0) == 2.5
    assert bounded_error_scale(2.5, 0.25) == 1.25
    assert bounded_error_scale(8 / 3, 1 / 6) == pytest.approx(16 / 9)
    with pytest.raises(DomainError):
        bounded_error_scale(1.0, 0.5)


def test_report_bounds():
    rows = report_bounds(2, 3, 3)
    assert rows[0].lower() == CostPair(1, 1) and rows[0].upper == CostPair(1, 1)
    r1 = rows[1]
    assert r1.lower_generic == CostPair(F(5, 2), F(5, 2))
    assert r1.scalar_lower() == F(5, 2)
    assert r1.upper == CostPair(F(8, 3), F(8, 3))
    rows = report_bounds(2, 4, 3)
    assert rows[3].lower_exact >= rows[3].lower_generic
    for r in rows:
        assert r.lower_exact <= r.upper
    with pytest.raises(DomainError):
        report_bounds(1, 3, 2)


def test_report_andor_lower_equals_upper():
    for r in report_andor(3, 5):
        assert r.lower() == r.upper


@given(
    st.fractions(min_value=-20, max_value=20, max_denominator=12),
    st.fractions(min_value=-5, max_value=5, max_denominator=6),
    st.fractions(min_value=0, max_value=40, max_denominator=9),
)
def test_sign_plus_root(a, b, p):
    exact = sign_plus_root(a, b, p)
    val = float(a) + float(b) * math.sqrt(p)
    if abs(val) > 1e-9:
        assert exact == (1 if val > 0 else -1)
    # squares give exact zeros
    assert sign_plus_root(-b * 3, b, F(9)) == 0


@given(
    st.fractions(min_value=-20, max_value=20, max_denominator=12),
    st.fractions(min_value=0, max_value=40, max_denominator=9),
    st.fractions(min_value=0, max_value=40, max_denominator=9),
)
def test_sign_two_roots(a, p, q):
    exact = sign_two_roots(a, p, q)
    val = float(a) + math.sqrt(p) - math.sqrt(q)
    if abs(val) > 1e-9:
        assert exact == (1 if val > 0 else -1)
    assert sign_two_roots(F(0), p, p) == 0
