"""Uniform read-once threshold formulae and their reluctant inputs.

A formula is a complete tree of a given depth whose internal nodes all have
fan-out ``n``. Every gate is a threshold gate ``T_k^n`` (output 1 iff at
least ``k`` inputs are 1). Either every level uses the same gate, or levels
alternate between AND (``k = n``) and OR (``k = 1``) starting at the root.

Leaves are indexed left to right, depth first, and an assignment is a flat
tuple of bits of length ``n ** depth``.

An input is *reluctant* when every gate sees exactly ``k`` ones (and outputs
1) or exactly ``k - 1`` ones (and outputs 0). The hard distribution is the
uniform distribution over reluctant inputs.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from math import comb
from typing import Iterator, Optional, Sequence, Tuple

from ._validation import DomainError, InstanceTooLarge, ShapeError, check_gate

Assignment = Tuple[int, ...]

AND = "and"
OR = "or"


@dataclass(frozen=True)
class GateSpec:
    k: int
    n: int

    def __post_init__(self):
        check_gate(self.k, self.n)

    @property
    def is_and(self) -> bool:
        return self.k == self.n

    @property
    def is_or(self) -> bool:
        return self.k == 1


@dataclass(frozen=True)
class FormulaSpec:
    """A uniform read-once threshold formula.

    Build instances with :meth:`constant` or :meth:`alternating` rather than
    calling the constructor directly.
    """

    depth: int
    n: int
    k: Optional[int] = None
    root: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.depth, int) or self.depth < 0:
            raise DomainError(f"depth must be a non-negative integer, got {self.depth!r}")
        if (self.k is None) == (self.root is None):
            raise DomainError("exactly one of k (constant schedule) or root (alternating) must be set")
        if self.k is not None:
            check_gate(self.k, self.n)
        else:
            if self.root not in (AND, OR):
                raise DomainError(f"root kind must be 'and' or 'or', got {self.root!r}")
            check_gate(1, self.n)

    @classmethod
    def constant(cls, k: int, n: int, depth: int) -> "FormulaSpec":
        return cls(depth=depth, n=n, k=k)

    @classmethod
    def alternating(cls, n: int, depth: int, root: str = AND) -> "FormulaSpec":
        return cls(depth=depth, n=n, root=root.lower())

    @property
    def is_alternating(self) -> bool:
        return self.root is not None

    @property
    def n_leaves(self) -> int:
        return self.n**self.depth

    def gate(self, level: int) -> GateSpec:
        """Gate used at ``level`` (0 is the root, ``depth - 1`` sits above the leaves)."""
        if not 0 <= level < self.depth:
            raise DomainError(f"level {level} outside 0..{self.depth - 1}")
        if self.k is not None:
            return GateSpec(self.k, self.n)
        and_level = (level % 2 == 0) == (self.root == AND)
        return GateSpec(self.n if and_level else 1, self.n)

    def gates(self) -> Tuple[GateSpec, ...]:
        """Gates root first."""
        return tuple(self.gate(level) for level in range(self.depth))

    def __str__(self) -> str:
        if self.k is not None:
            return f"T({self.k},{self.n})^{self.depth}"
        return f"{self.root.upper()}-{'OR' if self.root == AND else 'AND'}({self.n})^{self.depth}"


@dataclass(frozen=True)
class ReluctantCounts:
    n0: int
    n1: int

    @property
    def total(self) -> int:
        return self.n0 + self.n1

    def to_json(self) -> dict:
        return {"n0": str(self.n0), "n1": str(self.n1)}


def check_assignment(f: FormulaSpec, a: Sequence[int]) -> Assignment:
    """Validate ``a`` against ``f`` and return it as a tuple of ints."""
    if isinstance(a, str):
        a = parse_bits(a)
    bits = tuple(int(b) for b in a)
    if len(bits) != f.n_leaves:
        raise ShapeError(f"{f} has {f.n_leaves} leaves, assignment has length {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise ShapeError("assignment entries must be 0 or 1")
    return bits


def parse_bits(s: str) -> Assignment:
    s = s.strip()
    if any(ch not in "01" for ch in s):
        raise ShapeError(f"not a bit string: {s!r}")
    return tuple(int(ch) for ch in s)


def format_bits(a: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in a)


def _level_values(f: FormulaSpec, a: Assignment):
    """Yield (gate, child values, gate outputs) level by level from the leaves up."""
    values = list(a)
    for level in reversed(range(f.depth)):
        g = f.gate(level)
        groups = [values[i : i + g.n] for i in range(0, len(values), g.n)]
        outputs = [int(sum(grp) >= g.k) for grp in groups]
        yield g, groups, outputs
        values = outputs


def evaluate(f: FormulaSpec, a: Sequence[int]) -> int:
    """Root value of ``f`` under ``a``."""
    a = check_assignment(f, a)
    if f.depth == 0:
        return a[0]
    for _, _, outputs in _level_values(f, a):
        pass
    return outputs[0]


def is_reluctant(f: FormulaSpec, a: Sequence[int]) -> bool:
    a = check_assignment(f, a)
    for g, groups, outputs in _level_values(f, a):
        for grp, out in zip(groups, outputs):
            if sum(grp) != (g.k if out else g.k - 1):
                return False
    return True


def reluctant_counts(f: FormulaSpec) -> ReluctantCounts:
    n0, n1 = 1, 1
    for level in reversed(range(f.depth)):
        g = f.gate(level)
        n1, n0 = (
            comb(g.n, g.k) * n1**g.k * n0 ** (g.n - g.k),
            comb(g.n, g.k - 1) * n1 ** (g.k - 1) * n0 ** (g.n - g.k + 1),
        )
    return ReluctantCounts(n0=n0, n1=n1)


def draw_root_value(f: FormulaSpec, rng: random.Random) -> int:
    """Root value of a uniform reluctant input: 1 with probability n1/(n0+n1), exactly."""
    counts = reluctant_counts(f)
    return int(rng.randrange(counts.total) < counts.n1)


def _fill(f: FormulaSpec, level: int, value: int, rng: random.Random, out: list) -> None:
    if level == f.depth:
        out.append(value)
        return
    g = f.gate(level)
    ones = set(rng.sample(range(g.n), g.k if value else g.k - 1))
    for child in range(g.n):
        _fill(f, level + 1, int(child in ones), rng, out)


def sample_reluctant(
    f: FormulaSpec, seed=None, condition: Optional[int] = None, rng: Optional[random.Random] = None
) -> Assignment:
    """Draw a uniform reluctant input, optionally conditioned on the root value.

    Given the root value, every reluctant input with that value has the same
    number of completions below each gate, so choosing which children are 1
    uniformly at each gate yields the uniform distribution. Only the root
    value needs the exact counts.
    """
    if rng is None:
        rng = random.Random(seed)
    if condition is None:
        value = draw_root_value(f, rng)
    elif condition in (0, 1):
        value = int(condition)
    else:
        raise DomainError(f"condition must be 0, 1 or None, got {condition!r}")
    out: list = []
    _fill(f, 0, value, rng, out)
    return tuple(out)


def _enumerate(f: FormulaSpec, level: int, value: int) -> Iterator[Assignment]:
    if level == f.depth:
        yield (value,)
        return
    g = f.gate(level)
    for ones in itertools.combinations(range(g.n), g.k if value else g.k - 1):
        pattern = [int(i in ones) for i in range(g.n)]
        parts = [list(_enumerate(f, level + 1, v)) for v in pattern]
        for combo in itertools.product(*parts):
            yield tuple(itertools.chain.from_iterable(combo))


def enumerate_reluctant(
    f: FormulaSpec, cap: int = 10**6, value: Optional[int] = None
) -> Iterator[Assignment]:
    """Yield every reluctant input once (root value 0 first, then 1).

    Raises ``InstanceTooLarge`` before yielding anything if there are more
    than ``cap`` of them.
    """
    counts = reluctant_counts(f)
    values = (0, 1) if value is None else (value,)
    total = sum(counts.n1 if v else counts.n0 for v in values)
    if total > cap:
        raise InstanceTooLarge(f"{f} has too many reluctant inputs for cap {cap}", total)
    return itertools.chain.from_iterable(_enumerate(f, 0, v) for v in values)
