"""The exchange rate P(k, n) between reading zeros and reading ones.

Bits are drawn uniformly from the n-bit strings with exactly k ones. Reading
a 0 costs 1, reading a 1 earns ``eta``. ``P_eta(k, n)`` is the optimal
expected cost of a decision tree that must read at least one bit, and
``P(k, n)`` is the largest ``eta`` at which that optimum is still
non-negative.

The uniform distribution is exchangeable, so the state of an optimal
strategy is just (ones left, bits left) and the optimum is a small DP with
the option to stop after every read.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple

from ._validation import DomainError, as_rational, check_nonnegative, fmt_rational

STOP = "stop"
QUERY = "query"


class EtaDPTable:
    """Stop-allowed continuation values ``V_eta(k', n')`` for all ``n' <= n_max``.

    ``values[(k', n')]`` is the best expected cost with ``k'`` ones among the
    ``n'`` unread bits, where stopping (value 0) is allowed. Ties between
    stopping and querying go to stopping.
    """

    def __init__(self, eta, n_max: int):
        self.eta = check_nonnegative(eta, "eta")
        self.n_max = n_max
        self.values: Dict[Tuple[int, int], Fraction] = {}
        self.decisions: Dict[Tuple[int, int], str] = {}
        for m in range(n_max + 1):
            for j in range(m + 1):
                q = self.query_value(j, m)
                if q is None or q >= 0:
                    self.values[(j, m)] = Fraction(0)
                    self.decisions[(j, m)] = STOP
                else:
                    self.values[(j, m)] = q
                    self.decisions[(j, m)] = QUERY

    def query_value(self, k: int, n: int) -> Optional[Fraction]:
        """Expected cost of reading one more bit and continuing optimally; None if no bits remain."""
        if n == 0:
            return None
        total = Fraction(0)
        if k:
            total += Fraction(k, n) * (-self.eta + self.values[(k - 1, n - 1)])
        if n - k:
            total += Fraction(n - k, n) * (1 + self.values[(k, n - 1)])
        return total

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        return self.values[key]


@lru_cache(maxsize=256)
def _table(eta: Fraction, n_max: int) -> EtaDPTable:
    return EtaDPTable(eta, n_max)


def dp_table(eta, n_max: int) -> EtaDPTable:
    return _table(check_nonnegative(eta, "eta"), n_max)


def _check_slice(k: int, n: int, allow_zero_k: bool = True) -> None:
    if not (isinstance(k, int) and isinstance(n, int)):
        raise DomainError(f"k and n must be integers, got {k!r}, {n!r}")
    lo = 0 if allow_zero_k else 1
    if n < 1 or not lo <= k <= n:
        raise DomainError(f"need {lo} <= k <= n and n >= 1, got k={k}, n={n}")


def v_eta(k: int, n: int, eta) -> Fraction:
    _check_slice(k, n)
    return dp_table(eta, n)[(k, n)]


def p_eta(k: int, n: int, eta) -> Fraction:
    """Optimal expected cost over the k-ones slice when the first read is forced.

    ``k = 0`` is accepted: every bit is 0, so the forced read costs exactly 1.
    """
    _check_slice(k, n)
    return dp_table(eta, n - 1).query_value(k, n) if n > 1 else _p_eta_single(k, eta)


def _p_eta_single(k: int, eta) -> Fraction:
    return -check_nonnegative(eta, "eta") if k else Fraction(1)


def _linear_pieces(table: EtaDPTable, n_max: int) -> Dict[Tuple[int, int], Tuple[Fraction, Fraction]]:
    """Value of every state as ``a + b * eta`` with the table's decisions frozen."""
    lin: Dict[Tuple[int, int], Tuple[Fraction, Fraction]] = {}
    for m in range(n_max + 1):
        for j in range(m + 1):
            if table.decisions[(j, m)] == STOP:
                lin[(j, m)] = (Fraction(0), Fraction(0))
            else:
                lin[(j, m)] = _query_linear(lin, j, m)
    return lin


def _query_linear(lin, k: int, n: int) -> Tuple[Fraction, Fraction]:
    a = b = Fraction(0)
    if k:
        a1, b1 = lin[(k - 1, n - 1)]
        a += Fraction(k, n) * a1
        b += Fraction(k, n) * (b1 - 1)
    if n - k:
        a0, b0 = lin[(k, n - 1)]
        a += Fraction(n - k, n) * (1 + a0)
        b += Fraction(n - k, n) * b0
    return a, b


def p_eta_piece(k: int, n: int, eta) -> Tuple[Fraction, Fraction]:
    """The linear piece ``(a, b)`` with ``P_eta(k, n) = a + b * eta`` active at ``eta``."""
    _check_slice(k, n)
    table = dp_table(eta, n - 1)
    return _query_linear(_linear_pieces(table, n - 1), k, n)


@dataclass(frozen=True)
class PValue:
    """P(k, n), or infinity for ``k = 0`` (``value is None``)."""

    k: int
    n: int
    value: Optional[Fraction]
    certificate: Dict[Tuple[int, int], str] = field(default_factory=dict, compare=False, repr=False)
    iterations: int = field(default=0, compare=False)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __float__(self) -> float:
        return math.inf if self.value is None else float(self.value)

    def __str__(self) -> str:
        return "inf" if self.value is None else fmt_rational(self.value)

    def lower_bound(self) -> Optional[Fraction]:
        """(n - k) / (2k), the closed-form lower bound on P(k, n)."""
        return None if self.k == 0 else Fraction(self.n - self.k, 2 * self.k)


def p(k: int, n: int) -> PValue:
    """Exact P(k, n) by iterating on the optimal decision structure.

    ``eta -> P_eta(k, n)`` is the minimum of finitely many decreasing linear
    functions (one per stop/query structure). Starting anywhere, the root of
    the active piece lands at or right of the true root, and from there each
    step moves left without overshooting, so the loop ends when the active
    piece vanishes at the current point.
    """
    _check_slice(k, n)
    if k == 0:
        return PValue(0, n, None)
    eta = Fraction(n - k, 2 * k)
    for it in range(1, 10_000):
        a, b = p_eta_piece(k, n, eta)
        if b >= 0:
            raise AssertionError(f"non-decreasing piece at eta={eta} for ({k},{n})")
        nxt = -a / b
        if nxt == eta:
            return PValue(k, n, eta, dict(dp_table(eta, n - 1).decisions), it)
        eta = nxt
    raise AssertionError(f"structure iteration did not settle for ({k},{n})")


def _p_eta_float(k: int, n: int, eta: float) -> float:
    vals: Dict[Tuple[int, int], float] = {}
    for m in range(n):
        for j in range(m + 1):
            vals[(j, m)] = min(0.0, _query_float(vals, j, m, eta)) if m else 0.0
    return _query_float(vals, k, n, eta)


def _query_float(vals, k, n, eta) -> float:
    total = 0.0
    if k:
        total += k / n * (-eta + vals[(k - 1, n - 1)])
    if n - k:
        total += (n - k) / n * (1.0 + vals[(k, n - 1)])
    return total


def p_float(k: int, n: int, tol: float = 2.0**-40) -> float:
    """P(k, n) by float bisection, for sizes where exact rationals get slow."""
    _check_slice(k, n, allow_zero_k=False)
    if k == n:
        return 0.0
    lo, hi = (n - k) / (2 * k), (n - 1) / 2 + 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if _p_eta_float(k, n, mid) >= 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


@lru_cache(maxsize=None)
def _p_cached(k: int, n: int) -> PValue:
    return p(k, n)


def p_value(k: int, n: int) -> Optional[Fraction]:
    """Cached P(k, n) as a Fraction (None for infinity)."""
    return _p_cached(k, n).value


@dataclass
class PropertyResult:
    name: str
    checked: int = 0
    counterexamples: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def fail(self, msg: str) -> None:
        self.counterexamples.append(msg)


DEFAULT_GRID = (Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2))


def _lt(x: Optional[Fraction], y: Optional[Fraction]) -> bool:
    """x < y with None meaning +infinity."""
    if x is None:
        return False
    return y is None or x < y


def verify_pkn_properties(max_n: int, eta_grid: Iterable = DEFAULT_GRID) -> Dict[str, PropertyResult]:
    """Check the structural facts about P_eta and P for every slice with n <= max_n.

    a. P_eta(k, n+1) > P_eta(k, n) for eta > 0
    b. P(k, n) < P(k-1, n-1) for 0 < k < n
    c. (k-1)/k P(k-1, n-1) <= P(k, n), with equality iff n = k+1 (1 < k < n)
    d. (n-k)/(2k) <= P(k, n), strict unless k in {1, n-1} (1 <= k < n)
    e. P(1, n) = (n-1)/2
    f. at eta = P(k, n) the optimal continuation after reading a 1 is to stop
    """
    if max_n < 2:
        raise DomainError("max_n must be at least 2")
    grid = [as_rational(e, "eta") for e in eta_grid]
    res = {key: PropertyResult(key) for key in ("a_monotone_n", "b_strict_decrease", "c_ratio_bound",
                                                "d_lower_bound", "e_p1n", "f_stop_after_one")}

    for n in range(1, max_n):
        for k in range(1, n + 1):
            for eta in grid:
                if eta <= 0:
                    continue
                lo, hi = p_eta(k, n, eta), p_eta(k, n + 1, eta)
                res["a_monotone_n"].checked += 1
                if not hi > lo:
                    res["a_monotone_n"].fail(f"P_{eta}({k},{n + 1})={hi} <= P_{eta}({k},{n})={lo}")

    for n in range(1, max_n + 1):
        for k in range(1, n + 1):
            pk = p_value(k, n)
            if k < n:
                prev = p_value(k - 1, n - 1)
                res["b_strict_decrease"].checked += 1
                if not _lt(pk, prev):
                    res["b_strict_decrease"].fail(f"P({k},{n})={pk} >= P({k - 1},{n - 1})={prev}")
            if 1 < k < n:
                bound = Fraction(k - 1, k) * p_value(k - 1, n - 1)
                res["c_ratio_bound"].checked += 1
                if bound > pk or (bound == pk) != (n == k + 1):
                    res["c_ratio_bound"].fail(f"({k},{n}): (k-1)/k P(k-1,n-1)={bound}, P={pk}")
            if k < n:
                low = Fraction(n - k, 2 * k)
                res["d_lower_bound"].checked += 1
                if low > pk or (low == pk) != (k in (1, n - 1)):
                    res["d_lower_bound"].fail(f"({k},{n}): (n-k)/(2k)={low}, P={pk}")
            if k == 1:
                res["e_p1n"].checked += 1
                if pk != Fraction(n - 1, 2):
                    res["e_p1n"].fail(f"P(1,{n})={pk}")
            res["f_stop_after_one"].checked += 1
            decision = _p_cached(k, n).certificate.get((k - 1, n - 1), STOP)
            if decision != STOP:
                res["f_stop_after_one"].fail(f"({k},{n}): decision at ({k - 1},{n - 1}) is {decision}")
    return res
