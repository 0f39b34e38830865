"""Acceptance suite. Each test covers one numbered criterion; a PASS/FAIL line per
criterion is printed in the terminal summary (see conftest.py).

Run alone with ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time
from fractions import Fraction as F

import pytest

from rdt_threshold.bounds import (
    andor_product,
    closed_form_thm1,
    closed_form_thm2,
    closed_form_thm3,
    gamma_exact,
    gamma_generic,
    largest_eigenvalue,
)
from rdt_threshold.directional import delta_matrix, exact_cost, monte_carlo
from rdt_threshold.formula import FormulaSpec
from rdt_threshold.oracle import (
    UNIT,
    CostModel,
    Reluctant,
    check_shrink_inequality,
    directional_exact_small,
    optimal_expected_cost,
    optimal_tree_over_slice,
)
from rdt_threshold.pkn import STOP, DEFAULT_GRID, p, p_eta, verify_pkn_properties

ETAS = (F(0), F(1, 4), F(1, 2), F(1), F(2))
INNER_25 = [(k, n) for n in range(3, 26) for k in range(2, n)]


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_criterion_01_pkn_closed_values():
    with Timer() as t:
        for n in range(2, 31):
            assert p(1, n).value == F(n - 1, 2)
        for k in range(1, 11):
            assert p(k, k).value == 0
            assert p(k, k + 1).value == F(1, 2 * k)
    assert t.elapsed < 1.0, t.elapsed


def test_criterion_02_pkn_examples_confirmed_by_oracle():
    expected = {(2, 3): F(1, 4), (3, 4): F(1, 6), (2, 4): F(5, 9)}
    with Timer() as t:
        for (k, n), val in expected.items():
            root = p(k, n).value
            assert root == val
            # the general-tree optimum crosses zero exactly at the root
            assert optimal_tree_over_slice(k, n, root) == 0
            assert optimal_tree_over_slice(k, n, root + F(1, 1000)) < 0
            assert optimal_tree_over_slice(k, n, root - F(1, 1000)) > 0
    assert t.elapsed < 5.0, t.elapsed


def test_criterion_03_majority_rates():
    low = largest_eigenvalue(gamma_generic(2, 3))
    assert low.exact_form == (4, F(15, 4))
    assert low.exact() == F(5, 2)
    assert largest_eigenvalue(gamma_exact(2, 3)).exact() == F(5, 2)
    up = largest_eigenvalue(delta_matrix(2, 3))
    assert up.exact() == F(8, 3)


def test_criterion_04_andor_rate():
    _, _, lam = andor_product(2)
    assert lam.equals_surd(F(17, 8), F(1, 8), 33)
    target = (17 + math.sqrt(33)) / 8
    first, second = closed_form_thm1(2)
    assert abs(lam.lam - target) <= 1e-12
    assert abs(first - target) <= 1e-12 and abs(second - target) <= 1e-12
    assert abs(((1 + math.sqrt(33)) / 4) ** 2 - target) <= 1e-12
    for n in range(2, 51):
        ab, _, _ = andor_product(n)
        first, second = closed_form_thm1(n)
        assert abs(first - second) <= 1e-9 * abs(second)
        assert ab.det == n * n
        assert ab.trace == n + F((n + 1) ** 2, 4)


def test_criterion_05_closed_form_upper_rate():
    for k, n in INNER_25:
        assert abs(closed_form_thm2(k, n) - largest_eigenvalue(delta_matrix(k, n)).lam) <= 1e-9


def test_criterion_06_rate_ordering_and_printed_form_flag():
    for k, n in INNER_25:
        up = largest_eigenvalue(delta_matrix(k, n))
        assert largest_eigenvalue(gamma_generic(k, n)) <= up
        assert largest_eigenvalue(gamma_exact(k, n)) <= up
    chk = closed_form_thm3(2, 3)
    assert not chk.consistent
    assert chk.printed == pytest.approx(3.3229, abs=1e-4)
    assert chk.printed > 8 / 3
    assert chk.matrix_derived == 2.5


def test_criterion_07_oracle_equivalence_and_shrink():
    with Timer() as t:
        for n in range(1, 6):
            for k in range(0, n + 1):
                for eta in ETAS:
                    assert p_eta(k, n, eta) == optimal_tree_over_slice(k, n, eta), (k, n, eta)
        assert optimal_expected_cost(FormulaSpec.constant(2, 3, 1), Reluctant(), UNIT).value == F(8, 3)
        failures = []
        for cost in (UNIT, CostModel(c0=2, c1=1)):
            for n in range(3, 6):
                for k in range(2, n):
                    rep = check_shrink_inequality(k, n, cost)
                    if not rep.passed:
                        failures.append(f"(k={k}, n={n}, c0={cost.c0}, c1={cost.c1}): "
                                        f"lhs={rep.lhs} < rhs={rep.rhs_average}")
    assert t.elapsed < 60.0, t.elapsed
    assert not failures, "shrink inequality violated: " + "; ".join(failures)


def test_criterion_08_monotonicity_suite():
    report = verify_pkn_properties(8, DEFAULT_GRID)
    for name, res in report.items():
        assert res.passed and res.checked > 0, (name, res.counterexamples[:3])
    # direct restatement, independent of the report
    for n in range(2, 9):
        for k in range(1, n + 1):
            val = p(k, n).value
            for eta in DEFAULT_GRID:
                if n < 8:
                    assert p_eta(k, n + 1, eta) > p_eta(k, n, eta)
            if 1 < k < n:
                prev = p(k - 1, n - 1).value
                assert val < prev
                ratio = F(k - 1, k) * prev
                assert (ratio == val) == (n == k + 1) and ratio <= val
            if k < n:
                generic = F(n - k, 2 * k)
                assert generic <= val
                assert (generic == val) == (k in (1, n - 1))
            assert p(k, n).certificate[(k - 1, n - 1)] == STOP


def test_criterion_09_monte_carlo():
    f = FormulaSpec.constant(2, 3, 2)
    c = exact_cost(f)
    with Timer() as t:
        rep = monte_carlo(f, trials=100_000, seed=2024)
    assert t.elapsed < 5.0, t.elapsed
    assert abs(rep.mean - 64 / 9) <= 0.01 * 64 / 9
    for v, target in ((1, c.phi), (0, c.psi)):
        se = math.sqrt(rep.cond_variances[v] / rep.counts[v])
        assert abs(rep.cond_means[v] - float(target)) <= 4 * se
    deep = monte_carlo(FormulaSpec.constant(2, 3, 4), trials=100_000, seed=2024)
    assert abs(deep.mean - (8 / 3) ** 4) <= 4 * math.sqrt(deep.variance / deep.trials)


def small_formulas():
    out = []
    for d in range(3):
        for n in range(1, 4):
            out += [FormulaSpec.constant(k, n, d) for k in range(1, n + 1)]
        for n in range(2, 4):
            out += [FormulaSpec.alternating(n, d, root) for root in ("and", "or")]
    return out


def test_criterion_10_order_enumeration_matches_recurrence():
    for f in small_formulas():
        c = exact_cost(f)
        assert directional_exact_small(f) == (c.phi, c.psi), str(f)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
