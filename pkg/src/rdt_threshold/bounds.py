"""Generalized-cost lower bounds, directional upper bounds, and their growth rates.

Shrinking one level of a uniform formula turns a local cost pair
``(c1, c0)`` on the leaves into ``Gamma_{k,n} (c1, c0)`` on their parent,
with ``Gamma_{k,n} = [[k, alpha k], [beta (n-k+1), n-k+1]]``. Any valid
``alpha <= P(k, n)`` and ``beta <= P(n-k+1, n)`` gives a lower bound; the
closed form ``(n-k)/(2k)`` gives the generic matrix, the exact P values the
sharpest one. The per-level growth rate is the largest eigenvalue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from ._validation import DomainError, as_rational, check_gate, check_nonnegative, fmt_rational
from .directional import delta_matrix, exact_cost
from .formula import AND, FormulaSpec
from .linalg import ONES, CostMatrix, CostPair, SpectralBound
from .pkn import p_value


def gamma_matrix(k: int, n: int, alpha, beta) -> CostMatrix:
    check_gate(k, n)
    alpha = check_nonnegative(alpha, "alpha")
    beta = check_nonnegative(beta, "beta")
    return CostMatrix(k, alpha * k, beta * (n - k + 1), n - k + 1)


def generic_alpha_beta(k: int, n: int) -> Tuple[Fraction, Fraction]:
    return Fraction(n - k, 2 * k), Fraction(k - 1, 2 * (n - k + 1))


def exact_alpha_beta(k: int, n: int) -> Tuple[Fraction, Fraction]:
    return p_value(k, n), p_value(n - k + 1, n)


def gamma_generic(k: int, n: int) -> CostMatrix:
    check_gate(k, n)
    return gamma_matrix(k, n, *generic_alpha_beta(k, n))


def gamma_exact(k: int, n: int) -> CostMatrix:
    check_gate(k, n)
    return gamma_matrix(k, n, *exact_alpha_beta(k, n))


def matrix_power_cost(m: CostMatrix, d: int) -> CostPair:
    """``m^d`` applied to ``(1, 1)``."""
    return (m**d) @ ONES


def largest_eigenvalue(m: CostMatrix) -> SpectralBound:
    return SpectralBound.of(m)


def andor_product(n: int) -> Tuple[CostMatrix, CostMatrix, SpectralBound]:
    """``AB`` and ``BA`` for an AND level over an OR level, and their common growth rate.

    The rate is per two levels.
    """
    if not isinstance(n, int) or n < 2:
        raise DomainError(f"andor_product needs n >= 2, got {n!r}")
    a, b = gamma_exact(n, n), gamma_exact(1, n)
    ab, ba = a @ b, b @ a
    expected = CostMatrix(n, Fraction(n * (n - 1), 2), Fraction(n - 1, 2), Fraction((n + 1) ** 2, 4))
    assert ab == expected, f"AB mismatch for n={n}: {ab}"
    assert ab.trace == n + Fraction((n + 1) ** 2, 4) and ab.det == n * n
    assert (ba.trace, ba.det) == (ab.trace, ab.det)
    return ab, ba, largest_eigenvalue(ab)


def closed_form_thm1(n: int) -> Tuple[float, float]:
    """Both printed closed forms of the AND-OR growth rate per two levels."""
    if not isinstance(n, int) or n < 2:
        raise DomainError(f"closed form needs n >= 2, got {n!r}")
    s = math.sqrt(1 + 16 * n / (n - 1) ** 2)
    first = n + (n - 1) ** 2 / 8 + (n - 1) ** 2 / 8 * s
    second = ((n + 1) / 2) ** 2 + 2 * n / (1 + s)
    return first, second


def _check_inner(k: int, n: int) -> None:
    if not (isinstance(k, int) and isinstance(n, int) and 1 < k < n):
        raise DomainError(f"need 1 < k < n, got k={k!r}, n={n!r}")


def closed_form_thm2(k: int, n: int) -> float:
    """Closed-form growth rate of the directional algorithm on ``T_k^n`` trees."""
    _check_inner(k, n)
    h = (n + 1) / 2
    return h + h * math.sqrt(1 - 8 * k * (n - k + 1) / ((n - k + 2) * (k + 1) * (n + 1)))


@dataclass(frozen=True)
class Thm3Check:
    k: int
    n: int
    printed: float
    matrix_derived: float
    consistent: bool


def closed_form_thm3(k: int, n: int, tol: float = 1e-9) -> Thm3Check:
    """Compare the printed lower-bound closed form with the eigenvalue of the generic matrix.

    The eigenvalue is the one to use; the printed expression is only reported.
    """
    _check_inner(k, n)
    h = (n + 1) / 2
    radicand = 1 - (3 * k * (n - k + 1) - n) / (n + 1) ** 2
    printed = h + h * math.sqrt(radicand) if radicand >= 0 else math.nan
    derived = largest_eigenvalue(gamma_generic(k, n)).lam
    ok = not math.isnan(printed) and abs(printed - derived) <= tol * max(1.0, abs(derived))
    return Thm3Check(k, n, printed, derived, ok)


def bounded_error_scale(bound: float, delta: float) -> float:
    """Scale a zero-error lower bound to algorithms allowed error ``delta``."""
    if not 0 <= delta < 0.5:
        raise DomainError(f"error probability must lie in [0, 1/2), got {delta}")
    return bound * (1 - 2 * delta)


@dataclass(frozen=True)
class BoundsRow:
    d: int
    lower_generic: CostPair
    lower_exact: CostPair
    upper: CostPair
    lambda_lower_generic: SpectralBound
    lambda_lower_exact: SpectralBound
    lambda_upper: SpectralBound

    def lower(self, exact_p: bool = True) -> CostPair:
        return self.lower_exact if exact_p else self.lower_generic

    def scalar_lower(self, exact_p: bool = True) -> Fraction:
        """Bound on the expected cost of reading the last remaining variable."""
        return self.lower(exact_p).min()

    def lambda_lower(self, exact_p: bool = True) -> SpectralBound:
        return self.lambda_lower_exact if exact_p else self.lambda_lower_generic

    def csv_row(self, exact_p: bool = True, with_float: bool = False) -> List[str]:
        low = self.lower(exact_p)
        cells = [low.c1, low.c0, self.scalar_lower(exact_p), self.upper.c1, self.upper.c0]
        row = [str(self.d)] + [fmt_rational(x) for x in cells]
        row += [repr(self.lambda_lower(exact_p).lam), repr(self.lambda_upper.lam)]
        if with_float:
            row += [repr(float(x)) for x in cells]
        return row


CSV_HEADER = ["d", "c1_lower", "c0_lower", "scalar_lower", "phi_upper", "psi_upper", "lambda_lower", "lambda_upper"]


def report_bounds(k: int, n: int, d_max: int) -> List[BoundsRow]:
    """Lower and upper cost pairs for ``T_k^n`` trees of every depth up to ``d_max``."""
    _check_inner(k, n)
    if d_max < 0:
        raise DomainError("d_max must be non-negative")
    gg, ge, dm = gamma_generic(k, n), gamma_exact(k, n), delta_matrix(k, n)
    lg, le, lu = largest_eigenvalue(gg), largest_eigenvalue(ge), largest_eigenvalue(dm)
    rows = []
    low_g = low_e = up = ONES
    for d in range(d_max + 1):
        if d:
            low_g, low_e, up = gg @ low_g, ge @ low_e, dm @ up
        rows.append(BoundsRow(d, low_g, low_e, up, lg, le, lu))
    return rows


def alternating_lower(n: int, depth: int, root: str = AND) -> CostPair:
    """Generalized-cost lower pair for an alternating tree, shrinking one level at a time."""
    f = FormulaSpec.alternating(n, depth, root)
    m = CostMatrix.identity()
    for g in f.gates():
        m = m @ gamma_exact(g.k, g.n)
    return m @ ONES


def report_andor(n: int, d_max: int, root: str = AND) -> List[BoundsRow]:
    """Rows for alternating trees; lower and upper coincide level by level."""
    _, _, lam = andor_product(n)
    rows = []
    for d in range(d_max + 1):
        low = alternating_lower(n, d, root)
        up = exact_cost(FormulaSpec.alternating(n, d, root)).as_pair()
        rows.append(BoundsRow(d, low, low, up, lam, lam, lam))
    return rows
