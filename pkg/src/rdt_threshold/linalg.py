"""Exact 2x2 rational matrices acting on (c1, c0) cost pairs, and their growth rates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from ._validation import DomainError, as_rational, fmt_rational


@dataclass(frozen=True)
class CostPair:
    """Cost of querying a 1 (``c1``) and a 0 (``c0``)."""

    c1: Fraction
    c0: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c1", as_rational(self.c1, "c1"))
        object.__setattr__(self, "c0", as_rational(self.c0, "c0"))

    def __iter__(self):
        return iter((self.c1, self.c0))

    def __ge__(self, other: "CostPair") -> bool:
        """Entrywise domination."""
        return self.c1 >= other.c1 and self.c0 >= other.c0

    def __le__(self, other: "CostPair") -> bool:
        return other >= self

    def min(self) -> Fraction:
        return min(self.c1, self.c0)

    def to_json(self) -> dict:
        return {"c1": fmt_rational(self.c1), "c0": fmt_rational(self.c0)}


ONES = CostPair(1, 1)


@dataclass(frozen=True)
class CostMatrix:
    """``[[a, b], [c, d]]`` mapping ``(c1, c0)`` to ``(a c1 + b c0, c c1 + d c0)``."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, as_rational(getattr(self, name), name))

    @classmethod
    def from_rows(cls, rows) -> "CostMatrix":
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    @classmethod
    def identity(cls) -> "CostMatrix":
        return cls(1, 0, 0, 1)

    def rows(self) -> Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]:
        return ((self.a, self.b), (self.c, self.d))

    def __matmul__(self, other):
        if isinstance(other, CostPair):
            return CostPair(self.a * other.c1 + self.b * other.c0, self.c * other.c1 + self.d * other.c0)
        if isinstance(other, CostMatrix):
            return CostMatrix(
                self.a * other.a + self.b * other.c,
                self.a * other.b + self.b * other.d,
                self.c * other.a + self.d * other.c,
                self.c * other.b + self.d * other.d,
            )
        return NotImplemented

    def __pow__(self, d: int) -> "CostMatrix":
        if not isinstance(d, int) or d < 0:
            raise DomainError(f"matrix power needs a non-negative integer, got {d!r}")
        result, base = CostMatrix.identity(), self
        while d:
            if d & 1:
                result = result @ base
            base = base @ base
            d >>= 1
        return result

    def __ge__(self, other: "CostMatrix") -> bool:
        """Entrywise domination."""
        return all(x >= y for x, y in zip(self.entries(), other.entries()))

    def __le__(self, other: "CostMatrix") -> bool:
        return other >= self

    def entries(self) -> Tuple[Fraction, ...]:
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self) -> Fraction:
        return self.a + self.d

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def to_json(self) -> list:
        return [[fmt_rational(x) for x in row] for row in self.rows()]

    def __str__(self) -> str:
        return "[[{}, {}], [{}, {}]]".format(*(str(x) for x in self.entries()))


def sqrt_rational(q: Fraction) -> Optional[Fraction]:
    """Exact square root of a non-negative rational, or None when irrational."""
    if q < 0:
        return None
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def sign_plus_root(a: Fraction, b: Fraction, p: Fraction) -> int:
    """Sign of ``a + b * sqrt(p)`` for rationals with ``p >= 0``, computed exactly."""
    if p < 0:
        raise DomainError("radicand must be non-negative")
    sa = (a > 0) - (a < 0)
    sb = 0 if p == 0 else (b > 0) - (b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 with b^2 p
    lhs, rhs = a * a, b * b * p
    if lhs == rhs:
        return 0
    return sa if lhs > rhs else sb


def sign_two_roots(a: Fraction, p: Fraction, q: Fraction) -> int:
    """Sign of ``a + sqrt(p) - sqrt(q)`` exactly (``p, q >= 0``)."""
    # Sign of L = a + sqrt(p); R = sqrt(q) >= 0.
    sl = sign_plus_root(a, Fraction(1), p)
    if sl < 0:
        return -1
    if sl == 0:
        return -1 if q > 0 else 0
    # L > 0, R >= 0: sign(L - R) = sign(L^2 - q) = sign(a^2 + p - q + 2 a sqrt(p)).
    return sign_plus_root(a * a + p - q, 2 * a, p)


@dataclass(frozen=True)
class SpectralBound:
    """Largest eigenvalue ``T/2 + sqrt(T^2/4 - D)`` of a 2x2 matrix, kept as the exact pair (T, D)."""

    trace: Fraction
    det: Fraction

    def __post_init__(self):
        object.__setattr__(self, "trace", as_rational(self.trace, "trace"))
        object.__setattr__(self, "det", as_rational(self.det, "det"))
        if self.radicand < 0:
            raise DomainError(f"complex eigenvalues: T^2/4 - D = {self.radicand} < 0")

    @classmethod
    def of(cls, m: CostMatrix) -> "SpectralBound":
        return cls(m.trace, m.det)

    @property
    def half_trace(self) -> Fraction:
        return self.trace / 2

    @property
    def radicand(self) -> Fraction:
        return self.trace * self.trace / 4 - self.det

    @property
    def exact_form(self) -> Tuple[Fraction, Fraction]:
        return (self.trace, self.det)

    @property
    def lam(self) -> float:
        return float(self.half_trace) + math.sqrt(self.radicand)

    def exact(self) -> Optional[Fraction]:
        """λ as a rational when the radicand is a perfect square, else None."""
        root = sqrt_rational(self.radicand)
        return None if root is None else self.half_trace + root

    def compare(self, other) -> int:
        """Exact three-way comparison with another bound or with a rational."""
        if isinstance(other, SpectralBound):
            return sign_two_roots(self.half_trace - other.half_trace, self.radicand, other.radicand)
        return sign_plus_root(self.half_trace - as_rational(other), Fraction(1), self.radicand)

    def equals_surd(self, rational: Fraction, coef: Fraction, radicand: Fraction) -> bool:
        """True iff λ equals ``rational + coef * sqrt(radicand)`` exactly (``coef >= 0``)."""
        rational, coef, radicand = (as_rational(x) for x in (rational, coef, radicand))
        if coef < 0:
            raise DomainError("coef must be non-negative")
        return sign_two_roots(self.half_trace - rational, self.radicand, coef * coef * radicand) == 0

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __float__(self) -> float:
        return self.lam

    def to_json(self) -> dict:
        return {"trace": fmt_rational(self.trace), "det": fmt_rational(self.det), "lambda": self.lam}
