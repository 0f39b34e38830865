"""Argument checks and exception types shared across the package."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class ShapeError(ValueError):
    """An assignment does not match the formula it is used with."""


class DomainError(ValueError):
    """A numeric argument lies outside the domain of an operation."""


class InstanceTooLarge(ValueError):
    """A brute-force routine refused an instance over its size guard."""

    def __init__(self, message: str, estimate: int):
        super().__init__(f"{message} (estimated size {estimate})")
        self.estimate = estimate


def check_gate(k: int, n: int) -> None:
    if not (isinstance(k, int) and isinstance(n, int)):
        raise DomainError(f"gate parameters must be integers, got k={k!r}, n={n!r}")
    if not 1 <= k <= n:
        raise DomainError(f"threshold gate needs 1 <= k <= n, got k={k}, n={n}")


def as_rational(x, name: str = "value") -> Fraction:
    """Convert ints, Fractions and decimal/fraction strings to ``Fraction``.

    Floats are accepted only when they are exactly representable as the
    caller intended (``Fraction(0.25)`` is fine, ``Fraction(0.1)`` is not
    what anyone means), so they go through ``limit_denominator``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError as exc:
            raise DomainError(f"cannot parse {name}={x!r} as a rational") from exc
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    raise DomainError(f"{name} must be rational, got {type(x).__name__}")


def check_nonnegative(x, name: str) -> Fraction:
    q = as_rational(x, name)
    if q < 0:
        raise DomainError(f"{name} must be non-negative, got {q}")
    return q


def fmt_rational(x: Fraction) -> str:
    """Serialize a rational as ``"num/den"`` (always with a denominator)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"
